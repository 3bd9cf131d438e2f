import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nistt.trace import (
    CSV_HEADER,
    HEADER_SIZE,
    MAGIC,
    RECORD_SIZE,
    RecordKind,
    TraceFormatError,
    TraceRecord,
    TraceWriteError,
    TraceWriter,
    NameTable,
    decode_records,
    encode_record,
    export_csv,
    import_csv,
    name_def,
    read_log,
)

U64 = 2**64 - 1
U32 = 2**32 - 1

NAME_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.[]"


def random_record(rng: random.Random) -> TraceRecord:
    kind = rng.choice(list(RecordKind))
    sim = rng.choice([0, rng.randrange(U64 + 1), U64])
    real = rng.choice([0, rng.randrange(U64 + 1), U64])
    subject = rng.choice([0, rng.randrange(U32 + 1), U32])
    flags = rng.randrange(256)
    if kind == RecordKind.NAME_DEF:
        name = "".join(rng.choice(NAME_ALPHABET) for _ in range(rng.randrange(0, 40)))
        return name_def(subject, name, sim_ps=sim, real_ns=real)
    aux = rng.choice([0, rng.randrange(U64 + 1), U64])
    return TraceRecord(kind=kind, sim_ps=sim, real_ns=real, subject_id=subject, flags=flags, aux=aux)


def write_records(path, records, flush_every=4096):
    w = TraceWriter(path, flush_every=flush_every)
    for r in records:
        w.append(r)
    w.close()


def test_roundtrip_bulk_randomized(tmp_path):
    # acceptance-scale property: >= 10,000 randomized records survive the codec
    rng = random.Random(0xC0FFEE)
    records = [random_record(rng) for _ in range(10_000)]
    path = tmp_path / "bulk.bin"
    write_records(path, records)
    log = read_log(path)
    assert not log.truncated
    assert log.records == records


@settings(max_examples=300, deadline=None)
@given(
    st.lists(
        st.builds(
            TraceRecord,
            kind=st.sampled_from(
                [k for k in RecordKind if k != RecordKind.NAME_DEF]
            ),
            sim_ps=st.integers(0, U64),
            real_ns=st.integers(0, U64),
            subject_id=st.integers(0, U32),
            flags=st.integers(0, 255),
            aux=st.integers(0, U64),
        )
        | st.builds(
            name_def,
            st.integers(0, U32),
            st.text(alphabet=NAME_ALPHABET, max_size=64),
            sim_ps=st.integers(0, U64),
            real_ns=st.integers(0, U64),
        ),
        max_size=20,
    )
)
def test_roundtrip_property(tmp_path_factory, records):
    blob = b"".join(encode_record(r) for r in records)
    decoded, truncated = decode_records(blob)
    assert not truncated
    assert decoded == records


def test_extreme_values_roundtrip(tmp_path):
    records = [
        TraceRecord(RecordKind.SIM_START),
        TraceRecord(RecordKind.PROC_SUSPEND, sim_ps=U64, real_ns=U64, subject_id=U32, flags=255, aux=U64),
        name_def(0, ""),
        name_def(U32, "x" * 255),
        TraceRecord(RecordKind.SIM_END, sim_ps=U64, real_ns=U64),
    ]
    path = tmp_path / "extreme.bin"
    write_records(path, records)
    assert read_log(path).records == records


def test_truncation_recovery_every_boundary(tmp_path):
    # byte-chop the file at every offset: reader must return the complete
    # prefix and flag truncation, never raise (acceptance property, combined
    # with the bulk round trip this exceeds 10,000 checked cases).
    rng = random.Random(7)
    records = [random_record(rng) for _ in range(120)]
    path = tmp_path / "chop.bin"
    write_records(path, records)
    data = path.read_bytes()

    # pre-compute record byte offsets to know the expected prefix per chop
    offsets = [HEADER_SIZE]
    for r in records:
        offsets.append(offsets[-1] + len(encode_record(r)))
    assert offsets[-1] == len(data)

    target = tmp_path / "chopped.bin"
    cases = 0
    for cut in range(HEADER_SIZE, len(data)):
        target.write_bytes(data[:cut])
        log = read_log(target)
        complete = 0
        while complete < len(records) and offsets[complete + 1] <= cut:
            complete += 1
        assert log.records == records[:complete]
        assert log.truncated == (cut != offsets[complete])
        cases += 1
    assert cases >= 3_000


def test_bad_magic_and_version(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"JUNK" + bytes(12))
    with pytest.raises(TraceFormatError):
        read_log(path)
    path.write_bytes(struct.pack("<4sHHQ", MAGIC, 99, 0, 0))
    with pytest.raises(TraceFormatError):
        read_log(path)
    path.write_bytes(b"NS")
    with pytest.raises(TraceFormatError):
        read_log(path)


def test_unknown_kind_rejected(tmp_path):
    path = tmp_path / "kind.bin"
    payload = struct.pack("<BBHIQQQ", 200, 0, 0, 0, 0, 0, 0)
    path.write_bytes(struct.pack("<4sHHQ", MAGIC, 1, 0, 0) + payload)
    with pytest.raises(TraceFormatError):
        read_log(path)


def test_exclusive_writer_lock(tmp_path):
    path = tmp_path / "locked.bin"
    w1 = TraceWriter(path)
    with pytest.raises(TraceWriteError):
        TraceWriter(path)
    w1.close()
    w2 = TraceWriter(path)  # free again after close
    w2.close()


def test_flush_batching_grows_file_once(tmp_path):
    path = tmp_path / "batch.bin"
    w = TraceWriter(path, flush_every=4096)
    sizes = set()
    for i in range(4096):
        w.append(TraceRecord(RecordKind.PROC_SUSPEND, sim_ps=i, real_ns=i))
        sizes.add(path.stat().st_size)
    assert sizes == {HEADER_SIZE, HEADER_SIZE + 4096 * RECORD_SIZE}
    w.close()
    assert path.stat().st_size == HEADER_SIZE + 4096 * RECORD_SIZE


def test_bracketed_writer_emits_start_end(tmp_path):
    path = tmp_path / "clean.bin"
    w = TraceWriter(path, bracket=True)
    w.close(final_sim_ps=5, final_real_ns=9)
    log = read_log(path)
    assert [r.kind for r in log.records] == [RecordKind.SIM_START, RecordKind.SIM_END]
    assert log.records[-1].sim_ps == 5 and log.records[-1].real_ns == 9
    assert path.stat().st_size == HEADER_SIZE + 2 * RECORD_SIZE


def test_append_order_preserved(tmp_path):
    rng = random.Random(3)
    records = [random_record(rng) for _ in range(500)]
    path = tmp_path / "order.bin"
    write_records(path, records, flush_every=7)
    assert read_log(path).records == records


def test_csv_empty_clean_log(tmp_path):
    path = tmp_path / "clean.bin"
    TraceWriter(path, bracket=True).close()
    out = tmp_path / "clean.csv"
    rows, unresolved = export_csv(read_log(path), out)
    assert rows == 2
    assert unresolved == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith("SIM_START,")
    assert lines[2].startswith("SIM_END,")


def test_csv_suspend_resume_pair(tmp_path):
    path = tmp_path / "pair.bin"
    w = TraceWriter(path, bracket=True)
    names = NameTable(w)
    pid = names.intern("cpu")
    w.append(TraceRecord(RecordKind.PROC_SUSPEND, sim_ps=0, real_ns=10, subject_id=pid, aux=100))
    w.append(TraceRecord(RecordKind.PROC_RESUME, sim_ps=100, real_ns=20, subject_id=pid, aux=100))
    w.close()
    out = tmp_path / "pair.csv"
    rows, unresolved = export_csv(read_log(path), out)
    assert unresolved == 0
    lines = out.read_text().splitlines()[1:]
    data_rows = [l for l in lines if not l.startswith("NAME_DEF")]
    assert rows == len(lines) == 5
    assert len(data_rows) == 4
    assert "PROC_SUSPEND,0,10,cpu,0,100" in lines
    assert "PROC_RESUME,100,20,cpu,0,100" in lines


def test_csv_unresolved_placeholder(tmp_path):
    path = tmp_path / "orphan.bin"
    w = TraceWriter(path)
    w.append(TraceRecord(RecordKind.PROC_ENTER, subject_id=42))
    w.close()
    out = tmp_path / "orphan.csv"
    rows, unresolved = export_csv(read_log(path), out)
    assert (rows, unresolved) == (1, 1)
    assert ",#42," in out.read_text()


def test_csv_paper_scale_row_count(tmp_path):
    # process-trace records at the published case-study scale must export 1:1
    path = tmp_path / "big.bin"
    w = TraceWriter(path, bracket=True)
    names = NameTable(w)
    pid = names.intern("processor_thread")
    total = 208_174
    sim = 0
    for i in range(total // 2):
        w.append(TraceRecord(RecordKind.PROC_SUSPEND, sim_ps=sim, real_ns=sim, subject_id=pid, aux=100))
        sim += 100
        w.append(TraceRecord(RecordKind.PROC_RESUME, sim_ps=sim, real_ns=sim, subject_id=pid, aux=100))
    w.close()
    out = tmp_path / "big.csv"
    rows, unresolved = export_csv(read_log(path), out)
    assert unresolved == 0
    assert rows == total + 3  # + SIM_START, SIM_END, NAME_DEF
    process_rows = sum(
        1 for l in open(out) if l.startswith(("PROC_SUSPEND", "PROC_RESUME", "PROC_ENTER"))
    )
    assert process_rows == total


def test_csv_reimport_reconstructs_records(tmp_path):
    rng = random.Random(11)
    path = tmp_path / "mix.bin"
    w = TraceWriter(path, bracket=True)
    names = NameTable(w)
    procs = [names.intern(f"proc_{i}") for i in range(3)]
    evs = [names.intern(f"ev_{i}") for i in range(2)]
    sim = real = 0
    for _ in range(200):
        sim += rng.randrange(1000)
        real += rng.randrange(1000)
        p = rng.choice(procs)
        roll = rng.random()
        if roll < 0.4:
            w.append(TraceRecord(RecordKind.PROC_SUSPEND, sim, real, p, 0, rng.randrange(10**9)))
        elif roll < 0.8:
            w.append(TraceRecord(RecordKind.PROC_RESUME, sim, real, p, 1, rng.choice(evs)))
        else:
            w.append(TraceRecord(RecordKind.NOTIFY_DELAYED, sim, real, rng.choice(evs), 0, 500))
    w.close()
    log = read_log(path)
    out = tmp_path / "mix.csv"
    export_csv(log, out)
    assert import_csv(out) == log.records
