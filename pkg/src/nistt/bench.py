"""Overhead benchmark harness.

Runs a workload under the four tracing configurations (reference, intrusive
static, intrusive shared, non-intrusive shared) crossed with a list of
trace-category sets, N repetitions each, in strictly sequential fresh
subprocesses. Every run gets an environment assembled from scratch, so
nothing can leak between configurations. Wall time is measured with the
monotonic clock around the subprocess; warmup runs are discarded; the
produced trace's record count is collected per group.

The summary reports median (headline statistic), mean, stddev, min, max,
record count and relative overhead against the reference median. Raw
per-run wall times can be exported separately so downstream tooling can
draw full distributions.
"""

from __future__ import annotations

import argparse
import json
import shlex
import statistics
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from . import native
from .trace import TraceWriteError, read_log

DEFAULT_TRACE_SETS = ("none", "wait_event", "quantum", "event", "process")
DEFAULT_RUNS = 20
DEFAULT_WARMUP = 2


@dataclass(frozen=True)
class BenchConfig:
    workload: Path
    workload_args: tuple[str, ...] = ()
    configurations: tuple[str, ...] = native.CONFIGURATIONS
    trace_sets: tuple[str, ...] = DEFAULT_TRACE_SETS
    runs: int = DEFAULT_RUNS
    warmup: int = DEFAULT_WARMUP

    def __post_init__(self) -> None:
        if self.runs < 3:
            raise ValueError("statistics need runs >= 3")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        for c in self.configurations:
            if c not in native.CONFIGURATIONS:
                raise ValueError(f"unknown configuration {c!r}")
        for ts in self.trace_sets:
            native.normalize_traces(ts)


@dataclass
class GroupResult:
    configuration: str
    traces: str
    wall_s: tuple[float, ...]  # post-warmup runs
    record_count: int

    @property
    def median(self) -> float:
        return statistics.median(self.wall_s)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.wall_s)

    @property
    def stddev(self) -> float:
        return statistics.stdev(self.wall_s)

    @property
    def min(self) -> float:
        return min(self.wall_s)

    @property
    def max(self) -> float:
        return max(self.wall_s)


@dataclass
class BenchResult:
    config: BenchConfig
    groups: list[GroupResult] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (configuration, reason)

    def group(self, configuration: str, traces: str) -> GroupResult:
        traces = native.normalize_traces(traces)
        for g in self.groups:
            if g.configuration == configuration and g.traces == traces:
                return g
        raise KeyError((configuration, traces))

    def reference_median(self) -> float | None:
        walls: list[float] = []
        for g in self.groups:
            if g.configuration == native.REFERENCE:
                walls.extend(g.wall_s)
        return statistics.median(walls) if walls else None


def _resolve_workload(workload: str | Path, artifacts: native.ArtifactSet | None) -> tuple[Path, native.ArtifactSet]:
    p = Path(workload)
    if p.exists() and artifacts is None:
        # infer the artifact tree from <root>/bin/<name>
        artifacts = native.build(p.resolve().parent.parent)
    if artifacts is None:
        raise FileNotFoundError(f"workload {workload!r} not found and no artifacts given")
    if not p.exists():
        p = artifacts.workload(str(workload))
    return p, artifacts


def _timed_run(argv: list[str], env: dict[str, str], cwd: Path) -> tuple[float, subprocess.CompletedProcess]:
    t0 = time.monotonic()
    cp = subprocess.run(argv, env=env, cwd=cwd, capture_output=True, text=True)
    return time.monotonic() - t0, cp


def run_benchmark(cfg: BenchConfig, artifacts: native.ArtifactSet | None = None,
                  progress=None) -> BenchResult:
    """Execute the full configuration x trace-set grid."""
    workload_path, artifacts = _resolve_workload(cfg.workload, artifacts)
    workload_name = workload_path.name
    result = BenchResult(config=cfg)

    with tempfile.TemporaryDirectory(prefix="nistt-bench-") as tmps:
        tmp = Path(tmps)
        for configuration in cfg.configurations:
            if configuration == native.INTRUSIVE_STATIC:
                exe = artifacts.workload(workload_name, configuration)
            else:
                exe = workload_path
            if not exe.exists():
                msg = f"missing binary {exe}"
                print(f"warning: skipping {configuration}: {msg}", file=sys.stderr)
                result.skipped.append((configuration, msg))
                continue
            for traces in cfg.trace_sets:
                walls: list[float] = []
                record_count = 0
                for i in range(cfg.warmup + cfg.runs):
                    db = tmp / f"{configuration}-{traces.replace(',', '+')}-{i}.bin"
                    env = native.env_for(artifacts, configuration, traces=traces, db_path=db)
                    wall, cp = _timed_run([str(exe), *cfg.workload_args], env, tmp)
                    if cp.returncode != 0:
                        # one retry; a second failure aborts the benchmark
                        wall, cp = _timed_run([str(exe), *cfg.workload_args], env, tmp)
                        if cp.returncode != 0:
                            raise RuntimeError(
                                f"workload failed twice under {configuration}/{traces}: {cp.stderr}"
                            )
                    if i >= cfg.warmup:
                        walls.append(wall)
                    if db.exists():
                        record_count = len(read_log(db).records)
                        db.unlink()
                    else:
                        record_count = 0
                    if progress:
                        progress(configuration, traces, i)
                result.groups.append(
                    GroupResult(
                        configuration=configuration,
                        traces=native.normalize_traces(traces),
                        wall_s=tuple(walls),
                        record_count=record_count,
                    )
                )
    return result


# ------------------------------------------------------------ statistics ----


def bootstrap_median_ci(
    a: list[float] | tuple[float, ...],
    b: list[float] | tuple[float, ...],
    iterations: int = 10_000,
    confidence: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile-bootstrap confidence interval for median(b) - median(a)."""
    rng = Random(seed)
    diffs = []
    for _ in range(iterations):
        ra = [rng.choice(a) for _ in range(len(a))]
        rb = [rng.choice(b) for _ in range(len(b))]
        diffs.append(statistics.median(rb) - statistics.median(ra))
    diffs.sort()
    alpha = (1.0 - confidence) / 2.0
    lo = diffs[int(alpha * iterations)]
    hi = diffs[min(iterations - 1, int((1.0 - alpha) * iterations))]
    return lo, hi


def medians_indistinguishable(a, b, **kw) -> bool:
    lo, hi = bootstrap_median_ci(a, b, **kw)
    return lo <= 0.0 <= hi


def not_significantly_decreasing(low_records, high_records, **kw) -> bool:
    """True unless median(high_records) is significantly below median(low_records)."""
    _lo, hi = bootstrap_median_ci(low_records, high_records, **kw)
    return hi >= 0.0


def monotone_cost_holds(result: BenchResult, configuration: str, **kw) -> bool:
    """Within one configuration, median wall time must not significantly
    decrease as the produced record count grows."""
    groups = sorted(
        (g for g in result.groups if g.configuration == configuration),
        key=lambda g: g.record_count,
    )
    for low, high in zip(groups, groups[1:]):
        if not not_significantly_decreasing(low.wall_s, high.wall_s, **kw):
            return False
    return True


# --------------------------------------------------------------- reports ----

SUMMARY_HEADER = "configuration,traces,runs,median_s,mean_s,stddev_s,min_s,max_s,record_count,overhead"
RUNS_HEADER = "configuration,traces,run,wall_s"


def summarize(result: BenchResult, fmt: str = "csv") -> str:
    """Render the per-group statistics table (csv, json or text)."""
    if not result.groups:
        raise ValueError("empty benchmark result")
    ref = result.reference_median()
    rows = []
    for g in result.groups:
        overhead = (g.median / ref) if ref else None
        rows.append(
            {
                "configuration": g.configuration,
                "traces": g.traces,
                "runs": len(g.wall_s),
                "median_s": g.median,
                "mean_s": g.mean,
                "stddev_s": g.stddev,
                "min_s": g.min,
                "max_s": g.max,
                "record_count": g.record_count,
                "overhead": overhead,
            }
        )
    if fmt == "json":
        return json.dumps({"rows": rows, "skipped": result.skipped}, indent=2) + "\n"
    if fmt == "csv":
        lines = [SUMMARY_HEADER]
        for r in rows:
            overhead = "" if r["overhead"] is None else f"{r['overhead']:.4f}"
            lines.append(
                f"{r['configuration']},{r['traces']},{r['runs']},{r['median_s']:.6f},"
                f"{r['mean_s']:.6f},{r['stddev_s']:.6f},{r['min_s']:.6f},{r['max_s']:.6f},"
                f"{r['record_count']},{overhead}"
            )
        return "".join(line + "\n" for line in lines)
    if fmt == "text":
        width = max(len(r["configuration"]) for r in rows)
        lines = [
            f"{'configuration':<{width}}  {'traces':<16} {'median':>9} {'mean':>9} "
            f"{'stddev':>9} {'records':>9} {'overhead':>9}"
        ]
        for r in rows:
            overhead = "-" if r["overhead"] is None else f"{r['overhead']:.3f}"
            lines.append(
                f"{r['configuration']:<{width}}  {r['traces']:<16} {r['median_s']:>9.4f} "
                f"{r['mean_s']:>9.4f} {r['stddev_s']:>9.4f} {r['record_count']:>9} {overhead:>9}"
            )
        return "".join(line + "\n" for line in lines)
    raise ValueError(f"unknown format {fmt!r}")


def export_runs(result: BenchResult) -> str:
    """Long-format per-run walls (the distribution feed for box plots)."""
    lines = [RUNS_HEADER]
    for g in result.groups:
        for i, wall in enumerate(g.wall_s):
            lines.append(f"{g.configuration},{g.traces},{i},{wall:.6f}")
    return "".join(line + "\n" for line in lines)


def summary_from_json(text: str) -> list[dict]:
    return json.loads(text)["rows"]


# ------------------------------------------------------------------- CLI ----


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nistt-bench",
                                     description="measure tracing overhead per configuration")
    parser.add_argument("--workload", required=True,
                        help="workload name (under --artifacts) or executable path")
    parser.add_argument("--args", default="", help="extra workload arguments, quoted")
    parser.add_argument("--configs", default=",".join(native.CONFIGURATIONS),
                        help="comma list of configurations")
    parser.add_argument("--traces", default=";".join(DEFAULT_TRACE_SETS),
                        help="semicolon list of trace sets (each a comma list)")
    parser.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    parser.add_argument("--warmup", type=int, default=DEFAULT_WARMUP)
    parser.add_argument("--artifacts", default="build/native", help="native artifact directory")
    parser.add_argument("--out", help="summary output path (default stdout)")
    parser.add_argument("--runs-out", help="write per-run wall times CSV here")
    parser.add_argument("--json", action="store_true", help="summary as JSON")
    args = parser.parse_args(argv)

    try:
        artifacts = native.build(args.artifacts)
        cfg = BenchConfig(
            workload=Path(args.workload),
            workload_args=tuple(shlex.split(args.args)),
            configurations=tuple(t for t in args.configs.split(",") if t),
            trace_sets=tuple(t.strip() for t in args.traces.split(";") if t.strip()),
            runs=args.runs,
            warmup=args.warmup,
        )
        result = run_benchmark(cfg, artifacts=artifacts)
        report = summarize(result, "json" if args.json else "csv")
    except (ValueError, FileNotFoundError, RuntimeError, native.BuildError, TraceWriteError) as exc:
        print(f"nistt-bench: {exc}", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(report)
    else:
        sys.stdout.write(report)
    if args.runs_out:
        Path(args.runs_out).write_text(export_runs(result))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
