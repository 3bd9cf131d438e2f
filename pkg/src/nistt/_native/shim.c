/*
 * Preloadable tracing shim.
 *
 * Loaded ahead of the simulation (LD_PRELOAD), this library defines the
 * kernel's four traced symbols. The dynamic loader resolves the
 * simulation's calls to these definitions; each wrapper records a data
 * point, forwards to the next definition of the same symbol (the real
 * kernel, looked up with RTLD_NEXT), records a second data point after it
 * returns, and returns. Simulation behavior is unchanged: trace failures
 * degrade to stderr diagnostics, and only a call that cannot be forwarded
 * at all is fatal.
 *
 * Only the four traced symbols are exported (build with
 * -fvisibility=hidden); the symbol set is the traced_symbols.txt manifest
 * shipped with the kernel.
 */
#define _GNU_SOURCE
#include <dlfcn.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

#include "tracer.h"

#define SHIM_EXPORT __attribute__((visibility("default")))

static void (*fwd_process_entry)(uint64_t);
static void (*fwd_wait_time)(uint64_t);
static void (*fwd_wait_event)(uint64_t);
static void (*fwd_notify)(uint64_t, uint64_t);

static void *next_sym(const char *name)
{
    return dlsym(RTLD_NEXT, name);
}

static void *require_next(void *resolved, const char *name)
{
    if (!resolved) {
        resolved = next_sym(name);
        if (!resolved) {
            fprintf(stderr, "[nistt] fatal: no next definition of %s (is the kernel library loaded?)\n",
                    name);
            abort();
        }
    }
    return resolved;
}

__attribute__((constructor)) static void shim_load(void)
{
    /* Resolve forwarding targets eagerly; a missing symbol only becomes
     * fatal if the simulation actually calls it. */
    fwd_process_entry = (void (*)(uint64_t))next_sym("sk_process_entry");
    fwd_wait_time = (void (*)(uint64_t))next_sym("sk_wait_time");
    fwd_wait_event = (void (*)(uint64_t))next_sym("sk_wait_event");
    fwd_notify = (void (*)(uint64_t, uint64_t))next_sym("sk_notify");

    struct nstt_kernel_api api = {
        .now = (uint64_t(*)(uint64_t))dlsym(RTLD_DEFAULT, "sk_now"),
        .process_name = (const char *(*)(uint64_t))dlsym(RTLD_DEFAULT, "sk_process_name"),
        .event_name = (const char *(*)(uint64_t))dlsym(RTLD_DEFAULT, "sk_event_name"),
        .current_process_name =
            (const char *(*)(uint64_t))dlsym(RTLD_DEFAULT, "sk_current_process_name"),
    };
    nstt_tracer_init(&api);
}

__attribute__((destructor)) static void shim_unload(void)
{
    nstt_tracer_close();
}

SHIM_EXPORT void sk_process_entry(uint64_t proc)
{
    fwd_process_entry = require_next((void *)fwd_process_entry, "sk_process_entry");
    nstt_hook_process_entry(proc);
    fwd_process_entry(proc);
}

SHIM_EXPORT void sk_wait_time(uint64_t duration_ps)
{
    fwd_wait_time = require_next((void *)fwd_wait_time, "sk_wait_time");
    nstt_hook_wait_time_pre(duration_ps);
    fwd_wait_time(duration_ps);
    nstt_hook_wait_time_post(duration_ps);
}

SHIM_EXPORT void sk_wait_event(uint64_t ev)
{
    fwd_wait_event = require_next((void *)fwd_wait_event, "sk_wait_event");
    nstt_hook_wait_event_pre(ev);
    fwd_wait_event(ev);
    nstt_hook_wait_event_post(ev);
}

SHIM_EXPORT void sk_notify(uint64_t ev, uint64_t delay_ps)
{
    fwd_notify = require_next((void *)fwd_notify, "sk_notify");
    nstt_hook_notify(ev, delay_ps);
    fwd_notify(ev, delay_ps);
}
