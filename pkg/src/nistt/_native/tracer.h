/*
 * Trace recording core shared by the preload shim and the intrusive kernel
 * build. Both emit byte-identical record sequences (modulo real-time
 * stamps), so the two configurations can be diffed against each other.
 *
 * Configuration comes from the environment:
 *   NISTT_DB_PATH      output file (default ./nistt_trace.bin)
 *   NISTT_TRACE        comma list of process,quantum,wait_event,event,all,none
 *                      (default all; unknown names are diagnosed and skipped)
 *   NISTT_FLUSH_EVERY  record count per buffered flush (default 4096)
 *
 * Failures (unwritable path, short writes) disable tracing with a stderr
 * diagnostic; they never alter the traced program's behavior.
 */
#ifndef NSTT_TRACER_H
#define NSTT_TRACER_H

#include <stdint.h>

struct nstt_kernel_api {
    uint64_t (*now)(uint64_t sim);
    const char *(*process_name)(uint64_t proc);
    const char *(*event_name)(uint64_t ev);
    const char *(*current_process_name)(uint64_t sim);
};

void nstt_tracer_init(const struct nstt_kernel_api *api);
void nstt_tracer_close(void);

void nstt_hook_process_entry(uint64_t proc);
void nstt_hook_wait_time_pre(uint64_t duration_ps);
void nstt_hook_wait_time_post(uint64_t duration_ps);
void nstt_hook_wait_event_pre(uint64_t ev);
void nstt_hook_wait_event_post(uint64_t ev);
void nstt_hook_notify(uint64_t ev, uint64_t delay_ps);

#endif /* NSTT_TRACER_H */
