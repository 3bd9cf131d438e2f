"""Post-processing analyses over trace logs.

Every function here is a pure function of a decoded :class:`~nistt.trace.TraceLog`:

* :func:`compute_rtf` — real-time-factor series (simulated time per unit of
  wall time) over fixed simulation-time buckets;
* :func:`quantum_points` — synchronized quantum durations per process;
* :func:`event_timeline` — immediate notification instants and delayed
  notification spans per event;
* :func:`wait_event_episodes` — suspend/resume intervals of processes parked
  on event notifications;
* :func:`compute_time_table` — per-process wall-clock compute time and its
  share of the whole run.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from .trace import RecordKind, TraceLog

DEFAULT_RTF_BUCKET_PS = 10**10  # 10ms


class UnknownProcessError(ValueError):
    def __init__(self, name: str, known: list[str]):
        super().__init__(f"unknown process {name!r}; trace knows: {', '.join(known) or '(none)'}")
        self.name = name
        self.known = known


@dataclass(slots=True, frozen=True)
class RtfPoint:
    bucket_mid_ps: int
    rtf: float
    start_ps: int = 0
    end_ps: int = 0


@dataclass(slots=True, frozen=True)
class QuantumPoint:
    process: str
    sim_ps: int
    duration_ps: int


@dataclass(slots=True)
class TimelineEntry:
    event: str
    instants: list[int] = field(default_factory=list)
    spans: list[tuple[int, int]] = field(default_factory=list)  # (programmed_at, fires_at)


@dataclass(slots=True, frozen=True)
class Episode:
    process: str
    event: str
    suspend_ps: int
    resume_ps: int | None  # None: still waiting at SIM_END


@dataclass(slots=True, frozen=True)
class ComputeTimeRow:
    process: str
    compute_time_s: float
    share_pct: float
    complete: bool  # False when unpaired records were skipped


@dataclass(slots=True)
class ComputeTimeTable:
    rows: list[ComputeTimeRow]
    total: ComputeTimeRow
    wall_s: float


def _subject_name(names: dict[int, str], name_id: int) -> str:
    return names.get(name_id, f"#{name_id}")


def compute_rtf(log: TraceLog, bucket_ps: int = DEFAULT_RTF_BUCKET_PS) -> list[RtfPoint]:
    """Real-time factor per simulation-time bucket.

    Buckets are consecutive ``bucket_ps`` spans anchored at the first
    record's simulation time. A bucket's wall-time cost is taken between its
    edges, interpolating linearly between the surrounding records, so the
    emitted spans tile the run: their simulated spans sum to the whole run's
    and, for affinely related clocks, every bucket reports the same ratio.
    Buckets holding fewer than two records are merged into the next one
    (idle stretches produce one wide bucket instead of noise); a bucket
    whose wall-time span is zero is omitted.
    """
    if bucket_ps <= 0:
        raise ValueError("bucket must be positive")
    if len(log.records) < 2:
        return []
    sims = [r.sim_ps for r in log.records]
    reals = [r.real_ns for r in log.records]
    s0, s_end = sims[0], sims[-1]
    if s_end == s0:
        return []

    def real_at(s: int) -> float:
        i = bisect_left(sims, s)
        if i < len(sims) and sims[i] == s:
            return float(reals[i])
        lo, hi = i - 1, i
        return reals[lo] + (reals[hi] - reals[lo]) * (s - sims[lo]) / (sims[hi] - sims[lo])

    def count_in(a: int, b: int) -> int:
        end = bisect_right(sims, b) if b == s_end else bisect_left(sims, b)
        return end - bisect_left(sims, a)

    spans: list[tuple[int, int]] = []
    a = s0
    k = 1
    while a < s_end:
        b = min(s0 + k * bucket_ps, s_end)
        k += 1
        while count_in(a, b) < 2 and b < s_end:
            b = min(s0 + k * bucket_ps, s_end)
            k += 1
        if count_in(a, b) < 2 and spans:
            # trailing leftover: fold into the previous span
            spans[-1] = (spans[-1][0], b)
        else:
            spans.append((a, b))
        a = b

    points: list[RtfPoint] = []
    for a, b in spans:
        dreal_ns = real_at(b) - real_at(a)
        if dreal_ns <= 0:
            continue
        rtf = (b - a) / (dreal_ns * 1000.0)
        points.append(RtfPoint(bucket_mid_ps=(a + b) // 2, rtf=rtf, start_ps=a, end_ps=b))
    return points


def known_processes(log: TraceLog) -> list[str]:
    """Process names, in first-appearance order of their process records."""
    names = log.names
    seen: dict[str, None] = {}
    for r in log.records:
        if r.kind in (RecordKind.PROC_ENTER, RecordKind.PROC_SUSPEND, RecordKind.PROC_RESUME):
            seen.setdefault(_subject_name(names, r.subject_id), None)
    return list(seen)


def quantum_points(log: TraceLog, process: str | None = None) -> list[QuantumPoint]:
    """One point per synchronized quantum: (process, sync time, duration)."""
    known = known_processes(log)
    if process is not None and process not in known:
        raise UnknownProcessError(process, known)
    names = log.names
    points = []
    for r in log.records:
        if r.kind != RecordKind.PROC_SUSPEND or r.is_event_wait:
            continue
        name = _subject_name(names, r.subject_id)
        if process is not None and name != process:
            continue
        points.append(QuantumPoint(process=name, sim_ps=r.sim_ps, duration_ps=r.aux))
    return points


def event_timeline(log: TraceLog, events: list[str] | None = None) -> list[TimelineEntry]:
    """Notification history per event.

    Immediate notifications are instants; delayed notifications are spans
    from the programming time to the firing time (programmed_at + delay).
    Requested events with no notifications yield empty entries.
    """
    names = log.names
    entries: dict[str, TimelineEntry] = {}
    if events is not None:
        for name in events:
            entries[name] = TimelineEntry(event=name)
    for r in log.records:
        if r.kind not in (RecordKind.NOTIFY_IMMEDIATE, RecordKind.NOTIFY_DELAYED):
            continue
        name = _subject_name(names, r.subject_id)
        if events is not None and name not in entries:
            continue
        entry = entries.setdefault(name, TimelineEntry(event=name))
        if r.kind == RecordKind.NOTIFY_IMMEDIATE:
            entry.instants.append(r.sim_ps)
        else:
            entry.spans.append((r.sim_ps, r.sim_ps + r.aux))
    return list(entries.values())


def wait_event_episodes(log: TraceLog) -> list[Episode]:
    """Pair event-wait suspends with their resumes, in suspend order."""
    names = log.names
    open_waits: dict[int, tuple[int, int, int]] = {}  # proc id -> (order, event id, t)
    episodes: list[tuple[int, Episode]] = []
    order = 0
    for r in log.records:
        if not r.is_event_wait:
            continue
        if r.kind == RecordKind.PROC_SUSPEND:
            open_waits[r.subject_id] = (order, r.aux, r.sim_ps)
            order += 1
        elif r.kind == RecordKind.PROC_RESUME and r.subject_id in open_waits:
            idx, ev_id, t0 = open_waits.pop(r.subject_id)
            episodes.append(
                (idx,
                 Episode(
                     process=_subject_name(names, r.subject_id),
                     event=_subject_name(names, ev_id),
                     suspend_ps=t0,
                     resume_ps=r.sim_ps,
                 ))
            )
    for proc_id, (idx, ev_id, t0) in open_waits.items():
        episodes.append(
            (idx,
             Episode(
                 process=_subject_name(names, proc_id),
                 event=_subject_name(names, ev_id),
                 suspend_ps=t0,
                 resume_ps=None,
             ))
        )
    episodes.sort(key=lambda pair: pair[0])
    return [e for _, e in episodes]


def share_percentages(compute_times_s: list[float], wall_s: float) -> list[float]:
    """Share of the run's wall time per compute time (the table's % column)."""
    if wall_s <= 0:
        raise ValueError("wall time must be positive")
    return [t / wall_s * 100.0 for t in compute_times_s]


def compute_time_table(log: TraceLog) -> ComputeTimeTable:
    """Wall-clock compute time per process.

    A process is computing from each activation start (its enter record or a
    resume) until its next suspend. Scheduling is cooperative and
    single-threaded, so a process record from a *different* process while a
    window is still open proves the open process stopped running without a
    suspend (it terminated); the window closes at that boundary. A window
    still open at the end of the trace closes at the SIM_END stamp.
    Unpaired records (a resume while already active, a suspend while
    inactive) mark the row incomplete and are otherwise skipped.
    """
    if not log.records:
        raise ValueError("empty log")
    names = log.names
    wall_start = log.records[0].real_ns
    wall_end = log.records[-1].real_ns
    wall_ns = wall_end - wall_start
    if wall_ns <= 0:
        raise ValueError("log has no wall-time extent")

    open_pid: int | None = None
    open_start = 0
    compute_ns: dict[int, int] = {}
    complete: dict[int, bool] = {}

    def close_open(at_real_ns: int) -> None:
        nonlocal open_pid
        if open_pid is not None:
            compute_ns[open_pid] = compute_ns.get(open_pid, 0) + (at_real_ns - open_start)
            open_pid = None

    for r in log.records:
        if r.kind not in (RecordKind.PROC_ENTER, RecordKind.PROC_RESUME, RecordKind.PROC_SUSPEND):
            continue
        pid = r.subject_id
        compute_ns.setdefault(pid, 0)
        complete.setdefault(pid, True)
        if r.kind == RecordKind.PROC_SUSPEND:
            if open_pid != pid:
                complete[pid] = False
                continue
            close_open(r.real_ns)
        else:  # activation start
            if open_pid == pid:
                complete[pid] = False
                continue
            close_open(r.real_ns)  # previous process terminated without a suspend
            open_pid = pid
            open_start = r.real_ns
    close_open(wall_end)

    wall_s = wall_ns / 1e9
    entries = sorted(
        ((ns, _subject_name(names, pid), complete.get(pid, True)) for pid, ns in compute_ns.items()),
        key=lambda e: (e[0], e[1]),
    )
    rows = [
        ComputeTimeRow(
            process=name,
            compute_time_s=ns / 1e9,
            share_pct=(ns / 1e9) / wall_s * 100.0,
            complete=ok,
        )
        for ns, name, ok in entries
    ]
    total = ComputeTimeRow(
        process="Total",
        compute_time_s=sum(r.compute_time_s for r in rows),
        share_pct=sum(r.share_pct for r in rows),
        complete=all(r.complete for r in rows),
    )
    return ComputeTimeTable(rows=rows, total=total, wall_s=wall_s)


def quantum_duration_sum(points: list[QuantumPoint]) -> int:
    return sum(p.duration_ps for p in points)
