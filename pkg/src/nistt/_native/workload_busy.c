/*
 * busy: one CPU-like process that computes for a full quantum, then
 * synchronizes, until the target simulation time is covered. With the
 * defaults (2s at a 100us quantum) that is exactly 20,000 quantum-sized
 * timed waits.
 */
#include "wl_common.h"

struct busy_ctx {
    uint64_t sim;
    uint64_t self;
    uint64_t until_ps;
    uint64_t quantum_ps;
    uint64_t iterations;
    uint64_t checksum;
};

static void cpu_main(void *arg)
{
    struct busy_ctx *c = arg;
    uint64_t x = 0x9e3779b97f4a7c15ull ^ c->quantum_ps;
    while (sk_now(c->sim) < c->until_ps) {
        x = wl_work(x, c->quantum_ps);
        sk_qk_inc(c->self, c->quantum_ps);
        if (sk_qk_need_sync(c->self))
            sk_qk_sync(c->self);
        c->iterations++;
    }
    c->checksum = x;
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
    struct busy_ctx ctx = {.sim = sim, .until_ps = o.until_ps, .quantum_ps = o.quantum_ps};
    ctx.self = sk_spawn(sim, "cpu", cpu_main, &ctx);
    if (ctx.self == SK_INVALID)
        return 1;

    /* unbounded: the process self-limits, so the final time equals the sum
     * of its synchronized quanta */
    uint64_t final_ps = sk_run(sim, SK_UNBOUNDED);
    if (!wl_write_digest(o.out, "busy", final_ps, ctx.iterations, 0, ctx.checksum))
        return 1;
    return 0;
}
