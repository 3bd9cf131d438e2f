/*
 * periph: a register-model handshake. An initiator performs one register
 * access per microsecond of simulated time; a peripheral model process
 * handles each access and notifies a serialize event ("the register file is
 * free again") once per handled access, so the trace carries one
 * notification per peripheral interaction.
 *
 * The peripheral process ends the run parked on the request event, which
 * leaves one deliberately unmatched event wait in every trace.
 */
#include "wl_common.h"

static const uint64_t ACCESS_PERIOD_PS = 1000000ull; /* 1us */

struct pe_ctx {
    uint64_t sim;
    uint64_t initiator, regmodel;
    uint64_t ev_req, ev_free;
    uint64_t accesses_target;
    uint64_t accesses_done;
    uint64_t handled;
    uint64_t checksum;
};

static void initiator_main(void *arg)
{
    struct pe_ctx *c = arg;
    uint64_t x = 0xda942042e4dd58b5ull;
    for (uint64_t i = 0; i < c->accesses_target; i++) {
        sk_wait_time(ACCESS_PERIOD_PS);
        sk_notify(c->ev_req, 0);
        sk_wait_event(c->ev_free);
        x = wl_mix(x ^ i);
        c->accesses_done++;
    }
    c->checksum = x;
}

static void regmodel_main(void *arg)
{
    struct pe_ctx *c = arg;
    for (;;) {
        sk_wait_event(c->ev_req);
        c->handled++;
        sk_notify(c->ev_free, 0);
    }
}

int main(int argc, char **argv)
{
    struct wl_opts o = {
        .until_ps = 2000000000ull,  /* 2ms -> 2000 accesses */
        .quantum_ps = 100000000ull, /* 100us */
        .out = NULL,
    };
    if (!wl_parse_args(argc, argv, &o))
        return 2;

    uint64_t sim = sk_sim_create(o.quantum_ps, 0);
    if (!sim)
        return 1;
    struct pe_ctx ctx = {.sim = sim, .accesses_target = o.until_ps / ACCESS_PERIOD_PS};
    ctx.ev_req = sk_event_create(sim, "reg_req");
    ctx.ev_free = sk_event_create(sim, "reg_free");
    ctx.initiator = sk_spawn(sim, "initiator", initiator_main, &ctx);
    ctx.regmodel = sk_spawn(sim, "regmodel", regmodel_main, &ctx);
    if (ctx.initiator == SK_INVALID || ctx.regmodel == SK_INVALID || ctx.ev_req == SK_INVALID ||
        ctx.ev_free == SK_INVALID)
        return 1;

    uint64_t final_ps = sk_run(sim, o.until_ps);
    if (!wl_write_digest(o.out, "periph", final_ps, ctx.accesses_done, ctx.handled, ctx.checksum))
        return 1;
    return 0;
}
