/*
 * timer_idle: a CPU-like process alternating busy phases with idle periods.
 *
 * Idling is modeled the way virtual platforms emulate a wait-for-interrupt
 * instruction: the cpu process programs a wakeup timer with a delayed
 * notification and suspends on the interrupt event; a timer process waiting
 * on the deadline event raises the interrupt immediately when it fires.
 *
 * The three idle periods are fixed at 0.4s-1.1s, 1.1s-1.3s and 1.3s-1.8s
 * (delays 0.7s, 0.2s, 0.5s), followed by a busy phase to the end of the
 * run, so a 2s run exercises every record kind the tracer can emit.
 */
#include "wl_common.h"

static const uint64_t IDLE_START_PS = 400000000000ull; /* 0.4s */
static const uint64_t IDLE_DELAYS_PS[] = {
    700000000000ull, /* 0.7s -> wakes at 1.1s */
    200000000000ull, /* 0.2s -> wakes at 1.3s */
    500000000000ull, /* 0.5s -> wakes at 1.8s */
};
#define N_IDLE (sizeof(IDLE_DELAYS_PS) / sizeof(IDLE_DELAYS_PS[0]))

struct ti_ctx {
    uint64_t sim;
    uint64_t cpu, timer;
    uint64_t ev_irq, ev_deadline;
    uint64_t until_ps;
    uint64_t quantum_ps;
    uint64_t iterations;
    uint64_t wakeups;
    uint64_t checksum;
};

static uint64_t busy_until(struct ti_ctx *c, uint64_t self, uint64_t x, uint64_t t_ps)
{
    while (sk_now(c->sim) < t_ps) {
        x = wl_work(x, c->quantum_ps);
        sk_qk_inc(self, c->quantum_ps);
        if (sk_qk_need_sync(self))
            sk_qk_sync(self);
        c->iterations++;
    }
    return x;
}

static void cpu_main(void *arg)
{
    struct ti_ctx *c = arg;
    uint64_t x = 0x2545f4914f6cdd1dull ^ c->quantum_ps;
    x = busy_until(c, c->cpu, x, IDLE_START_PS);
    for (size_t i = 0; i < N_IDLE; i++) {
        sk_notify(c->ev_deadline, IDLE_DELAYS_PS[i]);
        sk_wait_event(c->ev_irq);
        c->wakeups++;
        x ^= sk_now(c->sim);
    }
    x = busy_until(c, c->cpu, x, c->until_ps);
    c->checksum = x;
}

static void timer_main(void *arg)
{
    struct ti_ctx *c = arg;
    for (size_t i = 0; i < N_IDLE; i++) {
        sk_wait_event(c->ev_deadline);
        sk_notify(c->ev_irq, 0);
    }
}

int main(int argc, char **argv)
{
    struct wl_opts o = {
        .until_ps = 2000000000000ull, /* 2s */
        .quantum_ps = 100000000ull,   /* 100us */
        .out = NULL,
    };
    if (!wl_parse_args(argc, argv, &o))
        return 2;

    uint64_t sim = sk_sim_create(o.quantum_ps, 0);
    if (!sim)
        return 1;
    struct ti_ctx ctx = {.sim = sim, .until_ps = o.until_ps, .quantum_ps = o.quantum_ps};
    ctx.ev_irq = sk_event_create(sim, "irq");
    ctx.ev_deadline = sk_event_create(sim, "wakeup_timer");
    ctx.cpu = sk_spawn(sim, "cpu", cpu_main, &ctx);
    ctx.timer = sk_spawn(sim, "timer", timer_main, &ctx);
    if (ctx.cpu == SK_INVALID || ctx.timer == SK_INVALID || ctx.ev_irq == SK_INVALID ||
        ctx.ev_deadline == SK_INVALID)
        return 1;

    uint64_t final_ps = sk_run(sim, o.until_ps);
    if (!wl_write_digest(o.out, "timer_idle", final_ps, ctx.iterations, ctx.wakeups, ctx.checksum))
        return 1;
    return 0;
}
