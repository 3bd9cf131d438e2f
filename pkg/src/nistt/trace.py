"""Binary trace log: append-only writer, reader, and CSV round-trip.

File layout (little-endian, fixed 32-byte record stride):

* header (16 bytes): magic ``NSTT``, version u16, reserved u16,
  anchor_real_ns u64 (absolute monotonic clock value the per-record
  ``real_ns`` offsets are anchored to);
* record (32 bytes): kind u8, flags u8, reserved u16, subject_id u32,
  sim_ps u64, real_ns u64, aux u64;
* a NAME_DEF record is followed by ``aux`` bytes of UTF-8 padded with zero
  bytes to the next 8-byte boundary; it binds ``subject_id`` to that name.

``aux`` holds the wait duration (time suspends), the waited event's name id
(event suspends, flag bit 0 set), the notification delay (notify records) or
the name byte length (NAME_DEF). Resume records repeat their suspend's
``flags``/``aux`` so record streams can be filtered by category without
back-references.

The same layout is produced by the C tracer embedded in the preload shim and
in the intrusive kernel build; this module is the reference codec.
"""

from __future__ import annotations

import enum
import fcntl
import os
import struct
from dataclasses import dataclass
from pathlib import Path

MAGIC = b"NSTT"
VERSION = 1

HEADER_FMT = "<4sHHQ"
HEADER_SIZE = struct.calcsize(HEADER_FMT)  # 16
RECORD_FMT = "<BBHIQQQ"
RECORD_SIZE = struct.calcsize(RECORD_FMT)  # 32

U64_MAX = 2**64 - 1
U32_MAX = 2**32 - 1

# flags bit 0: the suspension (and its matching resume) waits on an event,
# aux is the event's name id instead of a duration.
FLAG_EVENT_WAIT = 0x01

DEFAULT_FLUSH_EVERY = 4096
DEFAULT_DB_PATH = "./nistt_trace.bin"


class RecordKind(enum.IntEnum):
    SIM_START = 0
    SIM_END = 1
    NAME_DEF = 2
    PROC_ENTER = 3
    PROC_SUSPEND = 4
    PROC_RESUME = 5
    NOTIFY_IMMEDIATE = 6
    NOTIFY_DELAYED = 7


class TraceError(Exception):
    """Base class for trace store errors."""


class TraceFormatError(TraceError):
    """Bad magic, unsupported version, or malformed structure."""


class TraceWriteError(TraceError):
    """Path not writable or already owned by another writer."""


@dataclass(slots=True, frozen=True)
class TraceRecord:
    kind: RecordKind
    sim_ps: int = 0
    real_ns: int = 0
    subject_id: int = 0
    flags: int = 0
    aux: int = 0
    name: str | None = None  # payload for NAME_DEF records only

    def __post_init__(self) -> None:
        if not 0 <= self.sim_ps <= U64_MAX or not 0 <= self.real_ns <= U64_MAX:
            raise ValueError("timestamp out of u64 range")
        if not 0 <= self.aux <= U64_MAX:
            raise ValueError("aux out of u64 range")
        if not 0 <= self.subject_id <= U32_MAX:
            raise ValueError("subject_id out of u32 range")
        if not 0 <= self.flags <= 0xFF:
            raise ValueError("flags out of u8 range")
        if (self.kind == RecordKind.NAME_DEF) != (self.name is not None):
            raise ValueError("name payload is for NAME_DEF records exactly")

    @property
    def is_event_wait(self) -> bool:
        return bool(self.flags & FLAG_EVENT_WAIT)


def name_def(subject_id: int, name: str, sim_ps: int = 0, real_ns: int = 0) -> TraceRecord:
    return TraceRecord(
        kind=RecordKind.NAME_DEF,
        sim_ps=sim_ps,
        real_ns=real_ns,
        subject_id=subject_id,
        aux=len(name.encode()),
        name=name,
    )


def _padded(n: int) -> int:
    return (n + 7) & ~7


def encode_record(rec: TraceRecord) -> bytes:
    """Encode one record (including any NAME_DEF payload)."""
    aux = rec.aux
    payload = b""
    if rec.kind == RecordKind.NAME_DEF:
        raw = rec.name.encode()  # type: ignore[union-attr]
        aux = len(raw)
        payload = raw + b"\0" * (_padded(len(raw)) - len(raw))
    head = struct.pack(
        RECORD_FMT, int(rec.kind), rec.flags, 0, rec.subject_id, rec.sim_ps, rec.real_ns, aux
    )
    return head + payload


def decode_records(buf: bytes) -> tuple[list[TraceRecord], bool]:
    """Decode a record region; returns (records, truncated)."""
    records: list[TraceRecord] = []
    off = 0
    n = len(buf)
    while n - off >= RECORD_SIZE:
        kind_b, flags, _reserved, subject, sim, real, aux = struct.unpack_from(RECORD_FMT, buf, off)
        off += RECORD_SIZE
        try:
            kind = RecordKind(kind_b)
        except ValueError as exc:
            raise TraceFormatError(f"unknown record kind {kind_b} at byte {off - RECORD_SIZE}") from exc
        name = None
        if kind == RecordKind.NAME_DEF:
            take = _padded(aux)
            if n - off < take:
                return records, True  # payload cut off: drop the partial record
            name = buf[off : off + aux].decode()
            off += take
        records.append(
            TraceRecord(kind=kind, sim_ps=sim, real_ns=real, subject_id=subject, flags=flags, aux=aux, name=name)
        )
    return records, off != n


@dataclass(slots=True)
class TraceLog:
    version: int
    anchor_real_ns: int
    records: list[TraceRecord]
    truncated: bool = False
    path: Path | None = None

    @property
    def names(self) -> dict[int, str]:
        return {r.subject_id: r.name for r in self.records if r.kind == RecordKind.NAME_DEF}  # type: ignore[misc]

    def resolve(self, name_id: int) -> str | None:
        for r in self.records:
            if r.kind == RecordKind.NAME_DEF and r.subject_id == name_id:
                return r.name
        return None


class TraceWriter:
    """Single-writer append channel with buffered flushing.

    Holds an exclusive advisory lock for the writer's lifetime; a second
    writer on the same path fails. With ``bracket=True`` a SIM_START record
    is emitted on open and a SIM_END record on close, stamping the end with
    the latest timestamps seen (or explicit values passed to ``close``).
    """

    def __init__(
        self,
        path: str | os.PathLike[str],
        flush_every: int = DEFAULT_FLUSH_EVERY,
        anchor_real_ns: int = 0,
        bracket: bool = False,
    ):
        if flush_every < 1:
            raise ValueError("flush_every must be a positive record count")
        self.path = Path(path)
        self.flush_every = flush_every
        self._buf = bytearray()
        self._pending = 0
        self._count = 0
        self._max_sim = 0
        self._max_real = 0
        self._bracket = bracket
        try:
            self._file = open(self.path, "wb", buffering=0)
        except OSError as exc:
            raise TraceWriteError(f"cannot open {self.path}: {exc}") from exc
        try:
            fcntl.flock(self._file.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError as exc:
            self._file.close()
            self._file = None
            raise TraceWriteError(f"{self.path} is already open for writing") from exc
        self._file.write(struct.pack(HEADER_FMT, MAGIC, VERSION, 0, anchor_real_ns))
        if bracket:
            self.append(TraceRecord(RecordKind.SIM_START))

    @property
    def record_count(self) -> int:
        return self._count

    def append(self, rec: TraceRecord) -> None:
        if self._file is None:
            raise TraceWriteError("writer is closed")
        self._buf += encode_record(rec)
        self._pending += 1
        self._count += 1
        self._max_sim = max(self._max_sim, rec.sim_ps)
        self._max_real = max(self._max_real, rec.real_ns)
        if self._pending >= self.flush_every:
            self.flush()

    def flush(self) -> None:
        if self._file is None:
            raise TraceWriteError("writer is closed")
        if self._buf:
            self._file.write(self._buf)
            self._buf.clear()
            self._pending = 0

    def close(self, final_sim_ps: int | None = None, final_real_ns: int | None = None) -> None:
        if self._file is None:
            return
        if self._bracket:
            self.append(
                TraceRecord(
                    RecordKind.SIM_END,
                    sim_ps=self._max_sim if final_sim_ps is None else final_sim_ps,
                    real_ns=self._max_real if final_real_ns is None else final_real_ns,
                )
            )
        self.flush()
        self._file.close()
        self._file = None

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


class NameTable:
    """First-seen name interning that mirrors the native tracer's scheme."""

    def __init__(self, writer: TraceWriter):
        self._writer = writer
        self._ids: dict[str, int] = {}

    def intern(self, name: str, sim_ps: int = 0, real_ns: int = 0) -> int:
        got = self._ids.get(name)
        if got is not None:
            return got
        nid = len(self._ids)
        self._ids[name] = nid
        self._writer.append(name_def(nid, name, sim_ps=sim_ps, real_ns=real_ns))
        return nid


def read_log(path: str | os.PathLike[str]) -> TraceLog:
    """Decode a trace file; tolerates a truncated tail, rejects bad headers."""
    p = Path(path)
    data = p.read_bytes()
    if len(data) < HEADER_SIZE:
        raise TraceFormatError(f"{p}: short header ({len(data)} bytes)")
    magic, version, _reserved, anchor = struct.unpack_from(HEADER_FMT, data, 0)
    if magic != MAGIC:
        raise TraceFormatError(f"{p}: bad magic {magic!r}")
    if version != VERSION:
        raise TraceFormatError(f"{p}: unsupported version {version}")
    records, truncated = decode_records(data[HEADER_SIZE:])
    return TraceLog(version=version, anchor_real_ns=anchor, records=records, truncated=truncated, path=p)


CSV_HEADER = "kind,sim_ps,real_ns,subject,flags,aux"

# Kinds whose subject_id is a reference into the name table. SIM_START and
# SIM_END carry no subject and export an empty column.
_NAMED_SUBJECT_KINDS = frozenset(
    {
        RecordKind.PROC_ENTER,
        RecordKind.PROC_SUSPEND,
        RecordKind.PROC_RESUME,
        RecordKind.NOTIFY_IMMEDIATE,
        RecordKind.NOTIFY_DELAYED,
    }
)


def export_csv_stream(log: TraceLog, out) -> tuple[int, int]:
    """Write one CSV row per record; returns (row_count, unresolved_count).

    Subjects resolve to text (``#<id>`` placeholder when undefined). NAME_DEF
    rows keep the defined name in the subject column and move the assigned id
    into ``aux`` (the on-disk aux, the name's byte length, is recomputable),
    which keeps the export lossless.
    """
    names: dict[int, str] = {}
    rows = 0
    unresolved = 0
    out.write(CSV_HEADER + "\n")
    for r in log.records:
        if r.kind == RecordKind.NAME_DEF:
            names[r.subject_id] = r.name  # type: ignore[assignment]
            subject = r.name
            aux = r.subject_id
        elif r.kind in _NAMED_SUBJECT_KINDS:
            subject = names.get(r.subject_id)
            if subject is None:
                subject = f"#{r.subject_id}"
                unresolved += 1
            aux = r.aux
        else:
            subject = ""
            aux = r.aux
        out.write(f"{r.kind.name},{r.sim_ps},{r.real_ns},{subject},{r.flags},{aux}\n")
        rows += 1
    return rows, unresolved


def export_csv(log: TraceLog, path: str | os.PathLike[str]) -> tuple[int, int]:
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        return export_csv_stream(log, out)


def import_csv(path: str | os.PathLike[str]) -> list[TraceRecord]:
    """Rebuild records from :func:`export_csv` output (inverse modulo name resolution)."""
    records: list[TraceRecord] = []
    ids: dict[str, int] = {}
    with open(path, encoding="utf-8") as src:
        header = src.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise TraceFormatError(f"unexpected CSV header {header!r}")
        for line in src:
            kind_s, sim_s, real_s, subject, flags_s, aux_s = line.rstrip("\n").split(",")
            kind = RecordKind[kind_s]
            sim, real, flags, aux = int(sim_s), int(real_s), int(flags_s), int(aux_s)
            if kind == RecordKind.NAME_DEF:
                ids[subject] = aux
                records.append(name_def(aux, subject, sim_ps=sim, real_ns=real))
                continue
            if kind in _NAMED_SUBJECT_KINDS:
                subject_id = int(subject[1:]) if subject.startswith("#") else ids[subject]
            else:
                subject_id = 0
            records.append(
                TraceRecord(kind=kind, sim_ps=sim, real_ns=real, subject_id=subject_id, flags=flags, aux=aux)
            )
    return records
