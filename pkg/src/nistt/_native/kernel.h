/*
 * simkern: a minimal loosely-timed, cooperatively scheduled discrete-event
 * simulation kernel.
 *
 * The kernel is built as a shared library. Four functions form the traced
 * ABI (see traced_symbols.txt): sk_process_entry, sk_wait_time,
 * sk_wait_event and sk_notify. They are exported, never inlined across the
 * library boundary, and take only fixed-width scalars, so a preloaded
 * library can override them by name and forward to the next definition
 * without knowing anything about the build that produced this library.
 *
 * Conventions:
 *   - all times are unsigned 64-bit picoseconds;
 *   - handles are opaque 64-bit ids; SK_INVALID marks errors, simulation
 *     handle 0 means "the current simulation" where accepted;
 *   - the kernel is single-threaded: scheduling, waits and notifications
 *     all happen on the thread that called sk_run.
 */
#ifndef SIMKERN_H
#define SIMKERN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SK_API __attribute__((visibility("default")))

#define SK_UNBOUNDED ((uint64_t)-1)
#define SK_INVALID ((uint64_t)-1)

SK_API uint32_t sk_abi_version(void);

/* ---- lifecycle --------------------------------------------------------- */

/* One live simulation per process. quantum_limit_ps must be > 0 (the
 * default used by the bundled workloads is 100us). Returns the simulation
 * handle, or 0 on invalid configuration. */
SK_API uint64_t sk_sim_create(uint64_t quantum_limit_ps, uint64_t rng_seed);

/* Register a process before sk_run. Names must be unique and non-empty.
 * Process handles are the registration indices 0,1,2,... Returns SK_INVALID
 * on duplicate names or late registration. */
SK_API uint64_t sk_spawn(uint64_t sim, const char *name,
                         void (*entry)(void *), void *arg);

/* Create a named event. Event handles count from 0 in creation order. */
SK_API uint64_t sk_event_create(uint64_t sim, const char *name);

/* Run the scheduler until no runnable or timed work remains, or until the
 * given simulation time is reached (SK_UNBOUNDED for no limit). Returns the
 * final simulation time: `until` when the limit cut the run short, the time
 * of the last dispatched activation otherwise. */
SK_API uint64_t sk_run(uint64_t sim, uint64_t until_ps);

/* ---- clocks and quantum keeping ---------------------------------------- */

SK_API uint64_t sk_now(uint64_t sim);
SK_API uint64_t sk_quantum_limit(uint64_t sim);
SK_API uint64_t sk_rng_seed(uint64_t sim);

/* Temporal decoupling: a process accumulates local run-ahead time with
 * sk_qk_inc and synchronizes with the global clock via sk_qk_sync, which
 * waits out the accumulated local time (a timed wait, so it is visible to
 * tracers) and zeroes it. proc must be the running process. */
SK_API void sk_qk_inc(uint64_t proc, uint64_t delta_ps);
SK_API int sk_qk_need_sync(uint64_t proc);
SK_API void sk_qk_sync(uint64_t proc);
SK_API uint64_t sk_qk_local(uint64_t proc);

/* ---- introspection (lets tracers label records without debug symbols) -- */

SK_API uint64_t sk_current_sim(void);
SK_API uint64_t sk_current_process(uint64_t sim); /* SK_INVALID if none */
SK_API const char *sk_process_name(uint64_t proc); /* "" if unknown */
SK_API const char *sk_event_name(uint64_t ev);     /* "" if unknown */
SK_API const char *sk_current_process_name(uint64_t sim); /* "" if none */

/* ---- traced ABI --------------------------------------------------------- */

/* Coroutine entry trampoline: every process is first invoked through this
 * single exported function. Kernel-internal; do not call from workloads. */
SK_API void sk_process_entry(uint64_t proc);

/* Suspend the running process for duration_ps of simulation time. Resets
 * the process's local time. Aborts with a diagnostic when called outside
 * process context. */
SK_API void sk_wait_time(uint64_t duration_ps);

/* Suspend the running process until ev is notified (no timeout). */
SK_API void sk_wait_event(uint64_t ev);

/* Notify ev now (delay 0: waiters resume at the current time, after the
 * notifier yields) or after delay_ps. Competing pending notifications keep
 * the earliest firing time. Callable from any context. */
SK_API void sk_notify(uint64_t ev, uint64_t delay_ps);

#ifdef __cplusplus
}
#endif

#endif /* SIMKERN_H */
