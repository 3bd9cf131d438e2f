"""Kernel semantics, exercised through small compiled C scenarios.

Each scenario prints observable facts on stdout; the tests assert on those
lines. Expected values marked as derived come from hand-evaluating the
scheduling rules (sorted timed-event list, waiter FIFO, earliest-wins
notification), independently of the kernel code.
"""

import pytest

from nistt import native

PRELUDE = r"""
#include <inttypes.h>
#include <stdio.h>
#include <stdlib.h>
#include "kernel.h"

#define NS(x) ((uint64_t)(x) * 1000ull)
#define US(x) ((uint64_t)(x) * 1000000ull)
#define MS(x) ((uint64_t)(x) * 1000000000ull)

static uint64_t sim;
static void report(const char *tag, uint64_t value)
{
    printf("%s=%" PRIu64 "\n", tag, value);
}
"""


def lines(cp):
    assert cp.returncode == 0, cp.stderr
    return cp.stdout.splitlines()


def test_create_defaults_and_error(scenario):
    run = scenario(
        PRELUDE
        + r"""
int main(void) {
    report("bad", sk_sim_create(0, 0));
    sim = sk_sim_create(US(100), 7);
    report("sim", sim);
    report("now", sk_now(sim));
    report("quantum", sk_quantum_limit(sim));
    report("seed", sk_rng_seed(sim));
    return 0;
}
"""
    )
    out = lines(run())
    assert "bad=0" in out
    assert "sim=1" in out
    assert "now=0" in out
    assert "quantum=100000000" in out
    assert "seed=7" in out


def test_spawn_ids_and_duplicates(scenario):
    run = scenario(
        PRELUDE
        + r"""
static void nop(void *arg) { (void)arg; }
int main(void) {
    sim = sk_sim_create(US(100), 0);
    char name[8];
    for (int i = 0; i < 5; i++) {
        snprintf(name, sizeof name, "p%d", i);
        report("id", sk_spawn(sim, name, nop, NULL));
    }
    report("dup", sk_spawn(sim, "p0", nop, NULL));
    report("empty", sk_spawn(sim, "", nop, NULL));
    return 0;
}
"""
    )
    out = lines(run())
    assert [l for l in out if l.startswith("id=")] == [f"id={i}" for i in range(5)]
    assert f"dup={2**64 - 1}" in out
    assert f"empty={2**64 - 1}" in out


def test_trivial_run_returns_zero(scenario):
    run = scenario(
        PRELUDE
        + r"""
static void nop(void *arg) { (void)arg; }
int main(void) {
    sim = sk_sim_create(US(100), 0);
    sk_spawn(sim, "a", nop, NULL);
    report("final", sk_run(sim, SK_UNBOUNDED));
    return 0;
}
"""
    )
    assert "final=0" in lines(run())


def test_entry_order_is_registration_order(scenario):
    run = scenario(
        PRELUDE
        + r"""
static void announce(void *arg) {
    printf("enter=%s t=%" PRIu64 "\n", (const char *)arg, sk_now(0));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    sk_spawn(sim, "a", announce, "a");
    sk_spawn(sim, "b", announce, "b");
    sk_spawn(sim, "c", announce, "c");
    sk_run(sim, SK_UNBOUNDED);
    return 0;
}
"""
    )
    assert lines(run()) == ["enter=a t=0", "enter=b t=0", "enter=c t=0"]


def test_wait_time_ordering(scenario):
    # A waits 30ns, B waits 20ns from t=0: resume order B (20ns) then A (30ns)
    run = scenario(
        PRELUDE
        + r"""
static void waiter(void *arg) {
    uint64_t d = *(uint64_t *)arg;
    sk_wait_time(d);
    printf("resume=%s t=%" PRIu64 "\n", sk_current_process_name(0), sk_now(0));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    static uint64_t da, db;
    da = NS(30); db = NS(20);
    sk_spawn(sim, "A", waiter, &da);
    sk_spawn(sim, "B", waiter, &db);
    report("final", sk_run(sim, SK_UNBOUNDED));
    return 0;
}
"""
    )
    assert lines(run()) == ["resume=B t=20000", "resume=A t=30000", "final=30000"]


def test_wait_time_zero_yields_within_instant(scenario):
    # wait_time(0) resumes at the same instant, after already-runnable work
    run = scenario(
        PRELUDE
        + r"""
static void yielder(void *arg) {
    (void)arg;
    printf("step=yield-before t=%" PRIu64 "\n", sk_now(0));
    sk_wait_time(0);
    printf("step=yield-after t=%" PRIu64 "\n", sk_now(0));
}
static void other(void *arg) {
    (void)arg;
    printf("step=other t=%" PRIu64 "\n", sk_now(0));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    sk_spawn(sim, "y", yielder, NULL);
    sk_spawn(sim, "o", other, NULL);
    sk_run(sim, SK_UNBOUNDED);
    return 0;
}
"""
    )
    assert lines(run()) == ["step=yield-before t=0", "step=other t=0", "step=yield-after t=0"]


def test_wait_event_and_delayed_notify(scenario):
    # notify(irq, 50ns) at t=10ns resumes the waiter at t=60ns
    run = scenario(
        PRELUDE
        + r"""
static uint64_t irq;
static void waiter(void *arg) {
    (void)arg;
    sk_wait_event(irq);
    report("woke", sk_now(0));
}
static void kicker(void *arg) {
    (void)arg;
    sk_wait_time(NS(10));
    sk_notify(irq, NS(50));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    irq = sk_event_create(sim, "irq");
    sk_spawn(sim, "w", waiter, NULL);
    sk_spawn(sim, "k", kicker, NULL);
    report("final", sk_run(sim, SK_UNBOUNDED));
    return 0;
}
"""
    )
    out = lines(run())
    assert "woke=60000" in out
    assert "final=60000" in out


def test_two_waiters_single_notify(scenario):
    # both waiters resume at the firing instant, in waiting order
    run = scenario(
        PRELUDE
        + r"""
static uint64_t ev;
static void waiter(void *arg) {
    (void)arg;
    sk_wait_event(ev);
    printf("woke=%s t=%" PRIu64 "\n", sk_current_process_name(0), sk_now(0));
}
static void kicker(void *arg) {
    (void)arg;
    sk_wait_time(NS(5));
    sk_notify(ev, 0);
    sk_wait_time(NS(100));
    sk_notify(ev, 0); /* nobody left waiting: no effect on past waiters */
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    ev = sk_event_create(sim, "ev");
    sk_spawn(sim, "w1", waiter, NULL);
    sk_spawn(sim, "w2", waiter, NULL);
    sk_spawn(sim, "k", kicker, NULL);
    sk_run(sim, SK_UNBOUNDED);
    return 0;
}
"""
    )
    assert lines(run()) == ["woke=w1 t=5000", "woke=w2 t=5000"]


def test_notify_earliest_wins(scenario):
    # notify(e,100ns) then notify(e,10ns) at the same instant fires once at +10ns
    run = scenario(
        PRELUDE
        + r"""
static uint64_t ev;
static int wakeups;
static void waiter(void *arg) {
    (void)arg;
    sk_wait_event(ev);
    wakeups++;
    report("woke", sk_now(0));
}
static void kicker(void *arg) {
    (void)arg;
    sk_notify(ev, NS(100));
    sk_notify(ev, NS(10));
    sk_wait_time(NS(500));
    report("wakeups", wakeups);
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    ev = sk_event_create(sim, "ev");
    sk_spawn(sim, "w", waiter, NULL);
    sk_spawn(sim, "k", kicker, NULL);
    sk_run(sim, SK_UNBOUNDED);
    return 0;
}
"""
    )
    out = lines(run())
    assert "woke=10000" in out
    assert "wakeups=1" in out


def test_notify_later_does_not_supersede_earlier(scenario):
    run = scenario(
        PRELUDE
        + r"""
static uint64_t ev;
static void waiter(void *arg) {
    (void)arg;
    sk_wait_event(ev);
    report("woke", sk_now(0));
}
static void kicker(void *arg) {
    (void)arg;
    sk_notify(ev, NS(10));
    sk_notify(ev, NS(100)); /* later: ignored */
    sk_wait_time(NS(500));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    ev = sk_event_create(sim, "ev");
    sk_spawn(sim, "w", waiter, NULL);
    sk_spawn(sim, "k", kicker, NULL);
    sk_run(sim, SK_UNBOUNDED);
    return 0;
}
"""
    )
    assert "woke=10000" in lines(run())


def test_starved_waiter_still_returns(scenario):
    run = scenario(
        PRELUDE
        + r"""
static uint64_t ev;
static void waiter(void *arg) {
    (void)arg;
    sk_wait_event(ev);
    report("woke", sk_now(0)); /* must not appear */
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    ev = sk_event_create(sim, "never");
    sk_spawn(sim, "w", waiter, NULL);
    report("final", sk_run(sim, MS(1)));
    return 0;
}
"""
    )
    out = lines(run())
    assert not any(l.startswith("woke=") for l in out)
    assert "final=0" in out


def test_quantum_keeper(scenario):
    run = scenario(
        PRELUDE
        + r"""
static uint64_t self;
static void proc(void *arg) {
    (void)arg;
    sk_qk_inc(self, US(60));
    report("need1", sk_qk_need_sync(self));
    sk_qk_inc(self, US(60));
    report("need2", sk_qk_need_sync(self));
    report("local", sk_qk_local(self));
    sk_qk_sync(self);
    report("synced_at", sk_now(0));
    report("local_after", sk_qk_local(self));
    sk_qk_inc(self, US(100));
    report("need3", sk_qk_need_sync(self));
    sk_qk_sync(self);
    report("synced2_at", sk_now(0));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    self = sk_spawn(sim, "p", proc, NULL);
    report("final", sk_run(sim, SK_UNBOUNDED));
    return 0;
}
"""
    )
    out = lines(run())
    assert "need1=0" in out
    assert "need2=1" in out
    assert "local=120000000" in out
    assert "synced_at=120000000" in out
    assert "local_after=0" in out
    assert "need3=1" in out
    assert "synced2_at=220000000" in out
    assert "final=220000000" in out


def test_busy_loop_twenty_syncs(scenario):
    run = scenario(
        PRELUDE
        + r"""
static uint64_t self;
static void proc(void *arg) {
    (void)arg;
    for (int i = 0; i < 20; i++) {
        sk_qk_inc(self, US(100));
        sk_qk_sync(self);
    }
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    self = sk_spawn(sim, "p", proc, NULL);
    report("final", sk_run(sim, SK_UNBOUNDED));
    return 0;
}
"""
    )
    assert "final=2000000000" in lines(run())  # 20 x 100us = 2ms


PERIODIC_TIMER = (
    PRELUDE
    + r"""
static uint64_t tick;
static int firings;
static void timer(void *arg) {
    (void)arg;
    for (;;) {
        sk_notify(tick, US(300));
        sk_wait_event(tick);
        firings++;
        report("fire", sk_now(0));
    }
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    tick = sk_event_create(sim, "tick");
    sk_spawn(sim, "t", timer, NULL);
    report("final", sk_run(sim, MS(1)));
    report("firings", firings);
    return 0;
}
"""
)


def test_run_until_with_periodic_timer(scenario):
    # floor(1ms / 300us) = 3 firings; the run is cut at the 1ms bound
    out = lines(scenario(PERIODIC_TIMER)())
    assert "firings=3" in out
    assert "final=1000000000" in out
    assert [l for l in out if l.startswith("fire=")] == [
        "fire=300000000",
        "fire=600000000",
        "fire=900000000",
    ]


def test_ucontext_fallback_matches(scenario):
    # same scenario through the portable context implementation
    out = lines(scenario(PERIODIC_TIMER, force_ucontext=True)())
    assert "firings=3" in out
    assert "final=1000000000" in out


def test_wait_outside_process_context_aborts(scenario):
    run = scenario(
        PRELUDE
        + r"""
int main(void) {
    sim = sk_sim_create(US(100), 0);
    sk_wait_time(NS(1)); /* no process context: abort with diagnostic */
    return 0;
}
"""
    )
    cp = run()
    assert cp.returncode != 0
    assert "outside process context" in cp.stderr


def test_spawn_after_run_started_fails(scenario):
    run = scenario(
        PRELUDE
        + r"""
static void nop(void *arg) { (void)arg; }
static void spawner(void *arg) {
    (void)arg;
    report("late", sk_spawn(sim, "late", nop, NULL));
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    sk_spawn(sim, "s", spawner, NULL);
    sk_run(sim, SK_UNBOUNDED);
    return 0;
}
"""
    )
    assert f"late={2**64 - 1}" in lines(run())


def test_determinism_identical_stdout(scenario):
    run = scenario(
        PRELUDE
        + r"""
static uint64_t ev;
static void ping(void *arg) {
    (void)arg;
    for (int i = 0; i < 50; i++) {
        sk_wait_time(NS(7));
        sk_notify(ev, NS(3));
        printf("ping t=%" PRIu64 "\n", sk_now(0));
    }
}
static void pong(void *arg) {
    (void)arg;
    for (int i = 0; i < 50; i++) {
        sk_wait_event(ev);
        printf("pong t=%" PRIu64 "\n", sk_now(0));
    }
}
int main(void) {
    sim = sk_sim_create(US(100), 0);
    ev = sk_event_create(sim, "ev");
    sk_spawn(sim, "ping", ping, NULL);
    sk_spawn(sim, "pong", pong, NULL);
    report("final", sk_run(sim, SK_UNBOUNDED));
    return 0;
}
"""
    )
    first, second = run(), run()
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_kernel_exports_traced_symbols(artifacts):
    exported = native.exported_functions(artifacts.lib_dir / "libsimkern.so")
    manifest = set(artifacts.traced_symbols())
    assert manifest == set(native.TRACED_SYMBOLS)
    assert manifest <= exported
    assert "sk_abi_version" in exported


def test_kernel_exports_only_public_api(artifacts):
    exported = native.exported_functions(artifacts.lib_dir / "libsimkern.so")
    assert all(name.startswith("sk_") for name in exported)
    # the context-switch helper must stay internal
    assert not any("ctx" in name for name in exported)


@pytest.mark.parametrize("workload", native.WORKLOADS)
def test_workload_binaries_run(artifacts, tmp_path, workload):
    cp = native.run_workload(
        artifacts, workload, until="1ms", quantum="100us", out=tmp_path / "d.txt", cwd=tmp_path
    )
    assert cp.returncode == 0, cp.stderr
    digest = (tmp_path / "d.txt").read_text()
    assert f"workload={workload}" in digest
    assert "final_sim_ps=" in digest
