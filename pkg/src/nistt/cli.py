"""Command line analysis frontend.

    nistt-analyze rtf TRACE [--bucket 10ms] [--out F] [--json]
    nistt-analyze quantum TRACE [--process NAME] ...
    nistt-analyze events TRACE [--event NAME ...] ...
    nistt-analyze episodes TRACE ...
    nistt-analyze table TRACE ...
    nistt-analyze export TRACE ...

Each subcommand reads one trace file and writes CSV (default) or JSON
(``--json``) to stdout or ``--out``. Exit codes: 0 success, 2 unreadable or
malformed trace, 3 bad arguments. The CSV schemas are documented in the
project README and are the contract consumed by the plotting scripts.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from . import analyze, trace
from .timeutil import TimeParseError, parse_time_ps, ps_to_seconds_str

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _time_arg(text: str) -> int:
    try:
        return parse_time_ps(text)
    except TimeParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nistt-analyze", description="analyze simulation trace files")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("trace", help="trace file path")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")

    p = sub.add_parser("rtf", help="real-time-factor series over sim-time buckets")
    common(p)
    p.add_argument("--bucket", type=_time_arg, default=analyze.DEFAULT_RTF_BUCKET_PS,
                   help="bucket width, e.g. 10ms (default)")

    p = sub.add_parser("quantum", help="synchronized quantum durations")
    common(p)
    p.add_argument("--process", help="restrict to one process (exact name)")

    p = sub.add_parser("events", help="notification instants and delayed spans")
    common(p)
    p.add_argument("--event", action="append", dest="events", metavar="NAME",
                   help="restrict to named events (repeatable)")

    p = sub.add_parser("episodes", help="event-wait suspend/resume episodes")
    common(p)

    p = sub.add_parser("table", help="per-process compute time and share")
    common(p)

    p = sub.add_parser("export", help="dump every record (lossless CSV)")
    common(p)
    return parser


def _emit(args: argparse.Namespace, csv_lines: list[str], json_obj: Any) -> None:
    if args.json:
        text = json.dumps(json_obj, indent=2) + "\n"
    else:
        text = "".join(line + "\n" for line in csv_lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _cmd_rtf(args: argparse.Namespace, log: trace.TraceLog) -> None:
    points = analyze.compute_rtf(log, args.bucket)
    lines = ["bucket_mid_s,rtf"]
    lines += [f"{ps_to_seconds_str(p.bucket_mid_ps)},{p.rtf:.12g}" for p in points]
    _emit(args, lines, [{"bucket_mid_s": p.bucket_mid_ps / 1e12, "rtf": p.rtf} for p in points])


def _cmd_quantum(args: argparse.Namespace, log: trace.TraceLog) -> None:
    points = analyze.quantum_points(log, process=args.process)
    lines = ["process,sim_ps,duration_ps"]
    lines += [f"{p.process},{p.sim_ps},{p.duration_ps}" for p in points]
    _emit(
        args,
        lines,
        [{"process": p.process, "sim_ps": p.sim_ps, "duration_ps": p.duration_ps} for p in points],
    )


def _cmd_events(args: argparse.Namespace, log: trace.TraceLog) -> None:
    entries = analyze.event_timeline(log, events=args.events)
    lines = ["event,kind,programmed_ps,fires_ps"]
    obj = []
    for e in entries:
        for t in e.instants:
            lines.append(f"{e.event},immediate,{t},{t}")
        for programmed, fires in e.spans:
            lines.append(f"{e.event},delayed,{programmed},{fires}")
        obj.append({"event": e.event, "instants": e.instants, "spans": e.spans})
    _emit(args, lines, obj)


def _cmd_episodes(args: argparse.Namespace, log: trace.TraceLog) -> None:
    episodes = analyze.wait_event_episodes(log)
    lines = ["process,event,suspend_ps,resume_ps"]
    obj = []
    for e in episodes:
        resume = "" if e.resume_ps is None else e.resume_ps
        lines.append(f"{e.process},{e.event},{e.suspend_ps},{resume}")
        obj.append(
            {"process": e.process, "event": e.event, "suspend_ps": e.suspend_ps,
             "resume_ps": e.resume_ps}
        )
    _emit(args, lines, obj)


def _cmd_table(args: argparse.Namespace, log: trace.TraceLog) -> None:
    table = analyze.compute_time_table(log)
    lines = ["process,compute_time_s,share_pct,complete"]
    obj = {"wall_s": table.wall_s, "rows": [], "total": None}
    for row in [*table.rows, table.total]:
        lines.append(
            f"{row.process},{row.compute_time_s:.6f},{row.share_pct:.6f},{int(row.complete)}"
        )
        entry = {
            "process": row.process,
            "compute_time_s": row.compute_time_s,
            "share_pct": row.share_pct,
            "complete": row.complete,
        }
        if row.process == "Total":
            obj["total"] = entry
        else:
            obj["rows"].append(entry)
    _emit(args, lines, obj)


def _cmd_export(args: argparse.Namespace, log: trace.TraceLog) -> None:
    if args.json:
        names: dict[int, str] = {}
        obj = []
        for r in log.records:
            if r.kind == trace.RecordKind.NAME_DEF:
                names[r.subject_id] = r.name  # type: ignore[assignment]
            obj.append(
                {
                    "kind": r.kind.name,
                    "sim_ps": r.sim_ps,
                    "real_ns": r.real_ns,
                    "subject": names.get(r.subject_id, f"#{r.subject_id}")
                    if r.kind in (trace.RecordKind.PROC_ENTER, trace.RecordKind.PROC_SUSPEND,
                                  trace.RecordKind.PROC_RESUME, trace.RecordKind.NOTIFY_IMMEDIATE,
                                  trace.RecordKind.NOTIFY_DELAYED)
                    else "",
                    "flags": r.flags,
                    "aux": r.aux,
                }
            )
        _emit(args, [], obj)
        return
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            _rows, unresolved = trace.export_csv_stream(log, f)
    else:
        _rows, unresolved = trace.export_csv_stream(log, sys.stdout)
    if unresolved:
        print(f"warning: {unresolved} unresolved name ids", file=sys.stderr)


_COMMANDS = {
    "rtf": _cmd_rtf,
    "quantum": _cmd_quantum,
    "events": _cmd_events,
    "episodes": _cmd_episodes,
    "table": _cmd_table,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        log = trace.read_log(args.trace)
    except (trace.TraceFormatError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"nistt-analyze: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    try:
        _COMMANDS[args.command](args, log)
    except analyze.UnknownProcessError as exc:
        print(f"nistt-analyze: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"nistt-analyze: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
