#include "tracer.h"

#include <errno.h>
#include <fcntl.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <time.h>
#include <unistd.h>

#define NSTT_MAGIC "NSTT"
#define NSTT_VERSION 1
#define DEFAULT_DB_PATH "./nistt_trace.bin"
#define DEFAULT_FLUSH_EVERY 4096

/* record kinds (see the trace module's format documentation) */
enum {
    REC_SIM_START = 0,
    REC_SIM_END = 1,
    REC_NAME_DEF = 2,
    REC_PROC_ENTER = 3,
    REC_PROC_SUSPEND = 4,
    REC_PROC_RESUME = 5,
    REC_NOTIFY_IMMEDIATE = 6,
    REC_NOTIFY_DELAYED = 7,
};

#define FLAG_EVENT_WAIT 0x01

enum {
    CAT_PROCESS = 1,
    CAT_QUANTUM = 2,
    CAT_WAIT_EVENT = 4,
    CAT_EVENT = 8,
    CAT_ALL = CAT_PROCESS | CAT_QUANTUM | CAT_WAIT_EVENT | CAT_EVENT,
};

static struct {
    int initialized;
    int enabled; /* cleared on I/O failure: tracing degrades, never aborts */
    unsigned categories;
    int fd;
    uint64_t anchor_ns;
    unsigned long flush_every;
    unsigned long pending;

    unsigned char *buf;
    size_t buf_len, buf_cap;

    char **names;
    size_t n_names, cap_names;

    struct nstt_kernel_api api;
} T;

static void tdiag(const char *fmt, const char *arg)
{
    fprintf(stderr, "[nistt] ");
    fprintf(stderr, fmt, arg);
    fputc('\n', stderr);
}

static uint64_t mono_ns(void)
{
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (uint64_t)ts.tv_sec * 1000000000ull + (uint64_t)ts.tv_nsec;
}

static void put_u16(unsigned char *p, uint16_t v)
{
    p[0] = v & 0xff;
    p[1] = (v >> 8) & 0xff;
}

static void put_u32(unsigned char *p, uint32_t v)
{
    for (int i = 0; i < 4; i++)
        p[i] = (v >> (8 * i)) & 0xff;
}

static void put_u64(unsigned char *p, uint64_t v)
{
    for (int i = 0; i < 8; i++)
        p[i] = (v >> (8 * i)) & 0xff;
}

static int buf_reserve(size_t extra)
{
    if (T.buf_len + extra <= T.buf_cap)
        return 1;
    size_t cap = T.buf_cap ? T.buf_cap : 64 * 1024;
    while (cap < T.buf_len + extra)
        cap *= 2;
    unsigned char *nb = realloc(T.buf, cap);
    if (!nb) {
        tdiag("tracing disabled: %s", "out of memory");
        T.enabled = 0;
        return 0;
    }
    T.buf = nb;
    T.buf_cap = cap;
    return 1;
}

static void flush_buf(void)
{
    size_t off = 0;
    while (off < T.buf_len) {
        ssize_t n = write(T.fd, T.buf + off, T.buf_len - off);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            tdiag("tracing disabled: write failed (%s)", strerror(errno));
            T.enabled = 0;
            break;
        }
        off += (size_t)n;
    }
    T.buf_len = 0;
    T.pending = 0;
}

static void emit(int kind, unsigned flags, uint32_t subject, uint64_t aux, const char *payload)
{
    if (!T.enabled)
        return;
    uint64_t sim = T.api.now ? T.api.now(0) : 0;
    uint64_t real = mono_ns() - T.anchor_ns;
    size_t payload_len = payload ? strlen(payload) : 0;
    size_t padded = (payload_len + 7) & ~(size_t)7;
    if (!buf_reserve(32 + padded))
        return;
    unsigned char *p = T.buf + T.buf_len;
    p[0] = (unsigned char)kind;
    p[1] = (unsigned char)flags;
    put_u16(p + 2, 0);
    put_u32(p + 4, subject);
    put_u64(p + 8, sim);
    put_u64(p + 16, real);
    put_u64(p + 24, payload ? (uint64_t)payload_len : aux);
    if (payload) {
        memcpy(p + 32, payload, payload_len);
        memset(p + 32 + payload_len, 0, padded - payload_len);
    }
    T.buf_len += 32 + padded;
    T.pending++;
    if (T.pending >= T.flush_every)
        flush_buf();
}

static uint32_t intern(const char *name)
{
    if (!name)
        name = "";
    for (size_t i = 0; i < T.n_names; i++)
        if (strcmp(T.names[i], name) == 0)
            return (uint32_t)i;
    if (T.n_names == T.cap_names) {
        T.cap_names = T.cap_names ? T.cap_names * 2 : 16;
        char **nn = realloc(T.names, T.cap_names * sizeof(*T.names));
        if (!nn) {
            tdiag("tracing disabled: %s", "out of memory");
            T.enabled = 0;
            return 0;
        }
        T.names = nn;
    }
    uint32_t id = (uint32_t)T.n_names;
    T.names[T.n_names++] = strdup(name);
    emit(REC_NAME_DEF, 0, id, 0, name);
    return id;
}

static unsigned parse_categories(const char *spec)
{
    if (!spec || !spec[0])
        return CAT_ALL;
    unsigned mask = 0;
    char buf[256];
    strncpy(buf, spec, sizeof(buf) - 1);
    buf[sizeof(buf) - 1] = '\0';
    char *save = NULL;
    for (char *tok = strtok_r(buf, ",", &save); tok; tok = strtok_r(NULL, ",", &save)) {
        if (strcmp(tok, "process") == 0)
            mask |= CAT_PROCESS;
        else if (strcmp(tok, "quantum") == 0)
            mask |= CAT_QUANTUM;
        else if (strcmp(tok, "wait_event") == 0)
            mask |= CAT_WAIT_EVENT;
        else if (strcmp(tok, "event") == 0)
            mask |= CAT_EVENT;
        else if (strcmp(tok, "all") == 0)
            mask |= CAT_ALL;
        else if (strcmp(tok, "none") == 0)
            ; /* contributes nothing */
        else
            tdiag("ignoring unknown trace category '%s'", tok);
    }
    return mask;
}

void nstt_tracer_init(const struct nstt_kernel_api *api)
{
    if (T.initialized)
        return;
    T.initialized = 1;
    if (api)
        T.api = *api;
    T.flush_every = DEFAULT_FLUSH_EVERY;
    const char *fe = getenv("NISTT_FLUSH_EVERY");
    if (fe && fe[0]) {
        char *end = NULL;
        unsigned long v = strtoul(fe, &end, 10);
        if (end && *end == '\0' && v > 0)
            T.flush_every = v;
        else
            tdiag("ignoring bad NISTT_FLUSH_EVERY '%s'", fe);
    }
    T.categories = parse_categories(getenv("NISTT_TRACE"));

    const char *path = getenv("NISTT_DB_PATH");
    if (!path || !path[0])
        path = DEFAULT_DB_PATH;
    T.fd = open(path, O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (T.fd < 0) {
        tdiag("tracing disabled: cannot open trace file (%s)", strerror(errno));
        return;
    }
    if (flock(T.fd, LOCK_EX | LOCK_NB) != 0) {
        tdiag("tracing disabled: trace file is locked by another writer (%s)", strerror(errno));
        close(T.fd);
        T.fd = -1;
        return;
    }
    T.anchor_ns = mono_ns();
    unsigned char header[16];
    memcpy(header, NSTT_MAGIC, 4);
    put_u16(header + 4, NSTT_VERSION);
    put_u16(header + 6, 0);
    put_u64(header + 8, T.anchor_ns);
    if (write(T.fd, header, sizeof(header)) != (ssize_t)sizeof(header)) {
        tdiag("tracing disabled: cannot write header (%s)", strerror(errno));
        close(T.fd);
        T.fd = -1;
        return;
    }
    T.enabled = 1;
    emit(REC_SIM_START, 0, 0, 0, NULL);
}

void nstt_tracer_close(void)
{
    if (!T.initialized || T.fd < 0)
        return;
    if (T.enabled) {
        emit(REC_SIM_END, 0, 0, 0, NULL);
        flush_buf();
    }
    close(T.fd);
    T.fd = -1;
    T.enabled = 0;
}

void nstt_hook_process_entry(uint64_t proc)
{
    if (!T.enabled || !(T.categories & CAT_PROCESS))
        return;
    uint32_t subject = intern(T.api.process_name ? T.api.process_name(proc) : "");
    emit(REC_PROC_ENTER, 0, subject, 0, NULL);
}

static uint32_t current_proc_id(void)
{
    return intern(T.api.current_process_name ? T.api.current_process_name(0) : "");
}

void nstt_hook_wait_time_pre(uint64_t duration_ps)
{
    if (!T.enabled || !(T.categories & CAT_QUANTUM))
        return;
    emit(REC_PROC_SUSPEND, 0, current_proc_id(), duration_ps, NULL);
}

void nstt_hook_wait_time_post(uint64_t duration_ps)
{
    if (!T.enabled || !(T.categories & CAT_QUANTUM))
        return;
    emit(REC_PROC_RESUME, 0, current_proc_id(), duration_ps, NULL);
}

void nstt_hook_wait_event_pre(uint64_t ev)
{
    if (!T.enabled || !(T.categories & CAT_WAIT_EVENT))
        return;
    uint32_t subject = current_proc_id();
    uint32_t evname = intern(T.api.event_name ? T.api.event_name(ev) : "");
    emit(REC_PROC_SUSPEND, FLAG_EVENT_WAIT, subject, evname, NULL);
}

void nstt_hook_wait_event_post(uint64_t ev)
{
    if (!T.enabled || !(T.categories & CAT_WAIT_EVENT))
        return;
    uint32_t subject = current_proc_id();
    uint32_t evname = intern(T.api.event_name ? T.api.event_name(ev) : "");
    emit(REC_PROC_RESUME, FLAG_EVENT_WAIT, subject, evname, NULL);
}

void nstt_hook_notify(uint64_t ev, uint64_t delay_ps)
{
    if (!T.enabled || !(T.categories & CAT_EVENT))
        return;
    uint32_t subject = intern(T.api.event_name ? T.api.event_name(ev) : "");
    emit(delay_ps ? REC_NOTIFY_DELAYED : REC_NOTIFY_IMMEDIATE, 0, subject, delay_ps, NULL);
}
