/*
 * simkern implementation. Single-threaded scheduler over stackful coroutines.
 *
 * Determinism: activations (process resumptions and event firings) live in
 * one binary heap ordered by (time, insertion sequence), so simultaneous
 * work runs in becoming-runnable order and two runs of the same workload
 * interleave identically.
 *
 * Built with -DSK_BUILTIN_TRACE the kernel calls the tracer hooks around the
 * traced ABI functions itself (the "intrusive" configuration used as a
 * fidelity oracle and overhead baseline for the preload shim).
 */
#include "kernel.h"

#include <inttypes.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "context.h"

#ifdef SK_BUILTIN_TRACE
#include "tracer.h"
#endif

#define SK_ABI_VERSION 1u
#define STACK_SIZE (256 * 1024)
#define SIM_HANDLE 1u

enum proc_state {
    PROC_CREATED = 0,
    PROC_RUNNING,
    PROC_WAIT_TIME,
    PROC_WAIT_EVENT,
    PROC_TERMINATED,
};

struct proc {
    uint32_t id;
    char *name;
    void (*entry)(void *);
    void *arg;
    enum proc_state state;
    uint64_t local_ps;
    int started;
    char *stack;
    sk_ctx ctx;
};

struct event {
    uint32_t id;
    char *name;
    uint32_t *waiters; /* FIFO of process ids */
    size_t n_waiters, cap_waiters;
    uint64_t pending_ps; /* SK_UNBOUNDED when no pending notification */
    uint64_t pending_gen;
};

enum act_kind { ACT_PROC = 0, ACT_EVENT_FIRE = 1 };

struct activation {
    uint64_t t;
    uint64_t seq;
    enum act_kind kind;
    uint32_t target;
    uint64_t gen; /* event generation for stale-fire detection */
};

static struct {
    int exists;
    int run_started;
    uint64_t now;
    uint64_t quantum_limit;
    uint64_t rng_seed;
    uint64_t seq;

    struct proc **procs;
    size_t n_procs, cap_procs;
    struct event **events;
    size_t n_events, cap_events;

    struct activation *heap;
    size_t heap_len, heap_cap;

    struct proc *current;
    struct proc *entering;
    sk_ctx sched_ctx;
} S;

static void die(const char *what)
{
    fprintf(stderr, "[simkern] fatal: %s\n", what);
    abort();
}

static void diag(const char *what)
{
    fprintf(stderr, "[simkern] error: %s\n", what);
}

/* ---- activation heap ---------------------------------------------------- */

static int act_before(const struct activation *a, const struct activation *b)
{
    if (a->t != b->t)
        return a->t < b->t;
    return a->seq < b->seq;
}

static void heap_push(struct activation a)
{
    if (S.heap_len == S.heap_cap) {
        S.heap_cap = S.heap_cap ? S.heap_cap * 2 : 64;
        S.heap = realloc(S.heap, S.heap_cap * sizeof(*S.heap));
        if (!S.heap)
            die("out of memory");
    }
    size_t i = S.heap_len++;
    S.heap[i] = a;
    while (i > 0) {
        size_t parent = (i - 1) / 2;
        if (!act_before(&S.heap[i], &S.heap[parent]))
            break;
        struct activation tmp = S.heap[parent];
        S.heap[parent] = S.heap[i];
        S.heap[i] = tmp;
        i = parent;
    }
}

static struct activation heap_pop(void)
{
    struct activation top = S.heap[0];
    S.heap[0] = S.heap[--S.heap_len];
    size_t i = 0;
    for (;;) {
        size_t l = 2 * i + 1, r = 2 * i + 2, m = i;
        if (l < S.heap_len && act_before(&S.heap[l], &S.heap[m]))
            m = l;
        if (r < S.heap_len && act_before(&S.heap[r], &S.heap[m]))
            m = r;
        if (m == i)
            break;
        struct activation tmp = S.heap[m];
        S.heap[m] = S.heap[i];
        S.heap[i] = tmp;
        i = m;
    }
    return top;
}

static void sched_proc(uint64_t t, uint32_t id)
{
    heap_push((struct activation){.t = t, .seq = S.seq++, .kind = ACT_PROC, .target = id, .gen = 0});
}

/* ---- handles ------------------------------------------------------------ */

static struct proc *proc_by_handle(uint64_t h)
{
    return h < S.n_procs ? S.procs[h] : NULL;
}

static struct event *event_by_handle(uint64_t h)
{
    return h < S.n_events ? S.events[h] : NULL;
}

static struct proc *require_current(const char *op)
{
    if (!S.current) {
        fprintf(stderr, "[simkern] fatal: %s called outside process context\n", op);
        abort();
    }
    return S.current;
}

/* ---- public API --------------------------------------------------------- */

uint32_t sk_abi_version(void)
{
    return SK_ABI_VERSION;
}

uint64_t sk_sim_create(uint64_t quantum_limit_ps, uint64_t rng_seed)
{
    if (S.exists) {
        diag("simulation already exists (one per process)");
        return 0;
    }
    if (quantum_limit_ps == 0) {
        diag("quantum limit must be > 0");
        return 0;
    }
    memset(&S, 0, sizeof(S));
    S.exists = 1;
    S.quantum_limit = quantum_limit_ps;
    S.rng_seed = rng_seed;
    return SIM_HANDLE;
}

uint64_t sk_spawn(uint64_t sim, const char *name, void (*entry)(void *), void *arg)
{
    (void)sim;
    if (!S.exists || S.run_started) {
        diag("spawn requires a simulation that has not started running");
        return SK_INVALID;
    }
    if (!name || !name[0] || !entry) {
        diag("spawn requires a non-empty name and an entry function");
        return SK_INVALID;
    }
    for (size_t i = 0; i < S.n_procs; i++)
        if (strcmp(S.procs[i]->name, name) == 0) {
            diag("duplicate process name");
            return SK_INVALID;
        }
    if (S.n_procs == S.cap_procs) {
        S.cap_procs = S.cap_procs ? S.cap_procs * 2 : 8;
        S.procs = realloc(S.procs, S.cap_procs * sizeof(*S.procs));
        if (!S.procs)
            die("out of memory");
    }
    struct proc *p = calloc(1, sizeof(*p));
    if (!p)
        die("out of memory");
    p->id = (uint32_t)S.n_procs;
    p->name = strdup(name);
    p->entry = entry;
    p->arg = arg;
    p->state = PROC_CREATED;
    S.procs[S.n_procs++] = p;
    return p->id;
}

uint64_t sk_event_create(uint64_t sim, const char *name)
{
    (void)sim;
    if (!S.exists || !name || !name[0]) {
        diag("event_create requires a simulation and a non-empty name");
        return SK_INVALID;
    }
    for (size_t i = 0; i < S.n_events; i++)
        if (strcmp(S.events[i]->name, name) == 0) {
            diag("duplicate event name");
            return SK_INVALID;
        }
    if (S.n_events == S.cap_events) {
        S.cap_events = S.cap_events ? S.cap_events * 2 : 8;
        S.events = realloc(S.events, S.cap_events * sizeof(*S.events));
        if (!S.events)
            die("out of memory");
    }
    struct event *e = calloc(1, sizeof(*e));
    if (!e)
        die("out of memory");
    e->id = (uint32_t)S.n_events;
    e->name = strdup(name);
    e->pending_ps = SK_UNBOUNDED;
    S.events[S.n_events++] = e;
    return e->id;
}

uint64_t sk_now(uint64_t sim)
{
    (void)sim;
    return S.now;
}

uint64_t sk_quantum_limit(uint64_t sim)
{
    (void)sim;
    return S.quantum_limit;
}

uint64_t sk_rng_seed(uint64_t sim)
{
    (void)sim;
    return S.rng_seed;
}

uint64_t sk_current_sim(void)
{
    return S.exists ? SIM_HANDLE : 0;
}

uint64_t sk_current_process(uint64_t sim)
{
    (void)sim;
    return S.current ? S.current->id : SK_INVALID;
}

const char *sk_process_name(uint64_t proc)
{
    struct proc *p = proc_by_handle(proc);
    return p ? p->name : "";
}

const char *sk_event_name(uint64_t ev)
{
    struct event *e = event_by_handle(ev);
    return e ? e->name : "";
}

const char *sk_current_process_name(uint64_t sim)
{
    (void)sim;
    return S.current ? S.current->name : "";
}

/* ---- quantum keeper ----------------------------------------------------- */

static struct proc *require_owned(uint64_t proc, const char *op)
{
    struct proc *p = require_current(op);
    if (proc != p->id) {
        fprintf(stderr, "[simkern] fatal: %s on process %" PRIu64 " from process %u\n", op, proc,
                p->id);
        abort();
    }
    return p;
}

void sk_qk_inc(uint64_t proc, uint64_t delta_ps)
{
    struct proc *p = require_owned(proc, "qk_inc");
    p->local_ps += delta_ps;
}

int sk_qk_need_sync(uint64_t proc)
{
    struct proc *p = proc_by_handle(proc);
    if (!p)
        return 0;
    return p->local_ps >= S.quantum_limit;
}

uint64_t sk_qk_local(uint64_t proc)
{
    struct proc *p = proc_by_handle(proc);
    return p ? p->local_ps : 0;
}

void sk_qk_sync(uint64_t proc)
{
    struct proc *p = require_owned(proc, "qk_sync");
    /* the timed wait is what synchronizes with the global clock; it also
     * resets the local time */
    sk_wait_time(p->local_ps);
}

/* ---- coroutine machinery ------------------------------------------------ */

static void cor_bootstrap(void)
{
    struct proc *p = S.entering;
    sk_process_entry(p->id); /* traced trampoline, resolved through the PLT */
    p->state = PROC_TERMINATED;
    sk_ctx_switch(&p->ctx, &S.sched_ctx);
    die("terminated process resumed"); /* unreachable */
}

static void dispatch(struct proc *p)
{
    p->state = PROC_RUNNING;
    S.current = p;
    if (!p->started) {
        p->started = 1;
        p->stack = malloc(STACK_SIZE);
        if (!p->stack)
            die("out of memory");
        sk_ctx_prepare(&p->ctx, p->stack, STACK_SIZE, cor_bootstrap);
        S.entering = p;
    }
    sk_ctx_switch(&S.sched_ctx, &p->ctx);
    S.current = NULL;
}

void sk_process_entry(uint64_t proc)
{
#ifdef SK_BUILTIN_TRACE
    nstt_hook_process_entry(proc);
#endif
    struct proc *p = proc_by_handle(proc);
    if (!p || p != S.current || p->state != PROC_RUNNING)
        die("process_entry outside a scheduled first activation");
    p->entry(p->arg);
}

static void suspend_current(struct proc *p, enum proc_state state)
{
    p->state = state;
    sk_ctx_switch(&p->ctx, &S.sched_ctx);
}

void sk_wait_time(uint64_t duration_ps)
{
#ifdef SK_BUILTIN_TRACE
    nstt_hook_wait_time_pre(duration_ps);
#endif
    struct proc *p = require_current("wait_time");
    sched_proc(S.now + duration_ps, p->id);
    p->local_ps = 0;
    suspend_current(p, PROC_WAIT_TIME);
#ifdef SK_BUILTIN_TRACE
    nstt_hook_wait_time_post(duration_ps);
#endif
}

void sk_wait_event(uint64_t ev)
{
#ifdef SK_BUILTIN_TRACE
    nstt_hook_wait_event_pre(ev);
#endif
    struct proc *p = require_current("wait_event");
    struct event *e = event_by_handle(ev);
    if (!e)
        die("wait_event on unknown event");
    if (e->n_waiters == e->cap_waiters) {
        e->cap_waiters = e->cap_waiters ? e->cap_waiters * 2 : 4;
        e->waiters = realloc(e->waiters, e->cap_waiters * sizeof(*e->waiters));
        if (!e->waiters)
            die("out of memory");
    }
    e->waiters[e->n_waiters++] = p->id;
    suspend_current(p, PROC_WAIT_EVENT);
#ifdef SK_BUILTIN_TRACE
    nstt_hook_wait_event_post(ev);
#endif
}

void sk_notify(uint64_t ev, uint64_t delay_ps)
{
#ifdef SK_BUILTIN_TRACE
    nstt_hook_notify(ev, delay_ps);
#endif
    struct event *e = event_by_handle(ev);
    if (!e) {
        diag("notify on unknown event");
        return;
    }
    uint64_t t = S.now + delay_ps;
    if (t < S.now) /* saturate on overflow */
        t = SK_UNBOUNDED - 1;
    if (e->pending_ps <= t)
        return; /* an earlier firing is already pending */
    e->pending_ps = t;
    e->pending_gen++;
    heap_push((struct activation){
        .t = t, .seq = S.seq++, .kind = ACT_EVENT_FIRE, .target = e->id, .gen = e->pending_gen});
}

static void fire_event(struct event *e)
{
    e->pending_ps = SK_UNBOUNDED;
    /* waiters become runnable at the firing instant, in waiting order */
    for (size_t i = 0; i < e->n_waiters; i++)
        sched_proc(S.now, e->waiters[i]);
    e->n_waiters = 0;
}

uint64_t sk_run(uint64_t sim, uint64_t until_ps)
{
    (void)sim;
    if (!S.exists) {
        diag("run without a simulation");
        return 0;
    }
    if (S.run_started) {
        diag("run called twice");
        return S.now;
    }
    if (S.n_procs == 0) {
        diag("run without processes");
        return 0;
    }
    S.run_started = 1;
    for (size_t i = 0; i < S.n_procs; i++)
        sched_proc(0, S.procs[i]->id); /* first activations, registration order */

    while (S.heap_len > 0) {
        if (S.heap[0].t > until_ps) {
            S.now = until_ps;
            return S.now;
        }
        struct activation a = heap_pop();
        S.now = a.t;
        if (a.kind == ACT_EVENT_FIRE) {
            struct event *e = S.events[a.target];
            if (a.gen != e->pending_gen || a.t != e->pending_ps)
                continue; /* superseded by an earlier notification */
            fire_event(e);
        } else {
            struct proc *p = S.procs[a.target];
            if (p->state == PROC_TERMINATED)
                continue;
            dispatch(p);
        }
    }
    return S.now;
}

#ifdef SK_BUILTIN_TRACE
/* Intrusive configuration: the tracer is compiled into the kernel and wired
 * straight to the introspection functions above. */
__attribute__((constructor)) static void sk_trace_ctor(void)
{
    struct nstt_kernel_api api = {
        .now = sk_now,
        .process_name = sk_process_name,
        .event_name = sk_event_name,
        .current_process_name = sk_current_process_name,
    };
    nstt_tracer_init(&api);
}

__attribute__((destructor)) static void sk_trace_dtor(void)
{
    nstt_tracer_close();
}
#endif
