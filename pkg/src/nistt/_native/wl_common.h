/*
 * Shared helpers for the bundled workload executables.
 *
 * Every workload accepts:
 *   --until <int><unit>    simulated time to cover (units ps|ns|us|ms|s)
 *   --quantum <int><unit>  quantum limit for temporal decoupling
 *   --out <path>           write the output digest there instead of stdout
 *
 * The digest is a pure function of simulation behavior (never of wall-clock
 * time), so traced and untraced runs must produce identical bytes.
 */
#ifndef WL_COMMON_H
#define WL_COMMON_H

#include <inttypes.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "kernel.h"

struct wl_opts {
    uint64_t until_ps;
    uint64_t quantum_ps;
    const char *out;
};

static uint64_t wl_parse_time(const char *text)
{
    char *end = NULL;
    unsigned long long v = strtoull(text, &end, 10);
    if (end == text)
        goto bad;
    uint64_t scale;
    if (strcmp(end, "ps") == 0)
        scale = 1ull;
    else if (strcmp(end, "ns") == 0)
        scale = 1000ull;
    else if (strcmp(end, "us") == 0)
        scale = 1000000ull;
    else if (strcmp(end, "ms") == 0)
        scale = 1000000000ull;
    else if (strcmp(end, "s") == 0)
        scale = 1000000000000ull;
    else
        goto bad;
    return (uint64_t)v * scale;
bad:
    fprintf(stderr, "bad time '%s' (expected <int><unit>, units ps|ns|us|ms|s)\n", text);
    exit(2);
}

static int wl_parse_args(int argc, char **argv, struct wl_opts *o)
{
    for (int i = 1; i < argc; i++) {
        if (strcmp(argv[i], "--until") == 0 && i + 1 < argc)
            o->until_ps = wl_parse_time(argv[++i]);
        else if (strcmp(argv[i], "--quantum") == 0 && i + 1 < argc)
            o->quantum_ps = wl_parse_time(argv[++i]);
        else if (strcmp(argv[i], "--out") == 0 && i + 1 < argc)
            o->out = argv[++i];
        else {
            fprintf(stderr, "usage: %s [--until T] [--quantum T] [--out PATH]\n", argv[0]);
            return 0;
        }
    }
    return 1;
}

/* xorshift step: the unit of deterministic busywork */
static inline uint64_t wl_mix(uint64_t x)
{
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return x;
}

/* Calibration: busywork rounds per microsecond of simulated time. Sized so
 * that per-quantum computation dominates scheduling cost, like a CPU model
 * executing code for the span of its quantum. */
#define WL_ROUNDS_PER_US 80

static inline uint64_t wl_work(uint64_t x, uint64_t sim_span_ps)
{
    uint64_t rounds = WL_ROUNDS_PER_US * (sim_span_ps / 1000000ull);
    if (rounds == 0)
        rounds = 1;
    for (uint64_t i = 0; i < rounds; i++)
        x = wl_mix(x);
    return x;
}

static int wl_write_digest(const char *out, const char *workload, uint64_t final_ps,
                           uint64_t iterations, uint64_t events, uint64_t checksum)
{
    FILE *f = stdout;
    if (out) {
        f = fopen(out, "w");
        if (!f) {
            fprintf(stderr, "cannot open digest file '%s'\n", out);
            return 0;
        }
    }
    fprintf(f, "workload=%s\n", workload);
    fprintf(f, "final_sim_ps=%" PRIu64 "\n", final_ps);
    fprintf(f, "iterations=%" PRIu64 "\n", iterations);
    fprintf(f, "events=%" PRIu64 "\n", events);
    fprintf(f, "checksum=%016" PRIx64 "\n", checksum);
    if (out)
        fclose(f);
    return 1;
}

#endif /* WL_COMMON_H */
