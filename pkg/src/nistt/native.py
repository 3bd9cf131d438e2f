"""Build and drive the native artifacts (kernel library, shim, workloads).

The C sources ship inside the package; :func:`build` compiles them into an
artifact tree:

    <out>/
      lib/libsimkern.so          plain kernel (reference + preload target)
      lib-traced/libsimkern.so   kernel with the tracer compiled in
      libnistt.so                the preloadable tracing shim
      traced_symbols.txt         manifest of the traced ABI
      bin/<workload>             workloads linked against the shared kernel
      bin-intrusive/<workload>   workloads statically linked with the
                                 intrusive kernel

The four run configurations differ only in the spawn environment, assembled
from scratch per run by :func:`env_for`:

    reference            plain library, no tracing variables
    intrusive_static     bin-intrusive executable + NISTT_* variables
    intrusive_shared     plain executable + traced library + NISTT_*
    nonintrusive_shared  plain executable + plain library + preloaded shim
"""

from __future__ import annotations

import argparse
import hashlib
import os
import shutil
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

NATIVE_SRC = Path(__file__).parent / "_native"

TRACED_SYMBOLS = (
    "sk_process_entry",
    "sk_wait_time",
    "sk_wait_event",
    "sk_notify",
)

WORKLOADS = ("busy", "timer_idle", "periph")

REFERENCE = "reference"
INTRUSIVE_STATIC = "intrusive_static"
INTRUSIVE_SHARED = "intrusive_shared"
NONINTRUSIVE_SHARED = "nonintrusive_shared"
CONFIGURATIONS = (REFERENCE, INTRUSIVE_STATIC, INTRUSIVE_SHARED, NONINTRUSIVE_SHARED)

TRACE_CATEGORIES = ("process", "quantum", "wait_event", "event")

CFLAGS = [
    "-O2",
    "-g",
    "-Wall",
    "-Wextra",
    "-fvisibility=hidden",
]
# Interposition relies on intra-library calls to the traced functions going
# through the PLT; make that explicit rather than relying on the compiler
# default.
SHARED_CFLAGS = ["-fPIC", "-fsemantic-interposition"]


class BuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class ArtifactSet:
    root: Path
    lib_dir: Path
    traced_lib_dir: Path
    shim: Path
    symbols_manifest: Path
    bin_dir: Path
    intrusive_bin_dir: Path

    def workload(self, name: str, configuration: str = REFERENCE) -> Path:
        base = self.intrusive_bin_dir if configuration == INTRUSIVE_STATIC else self.bin_dir
        return base / name

    def traced_symbols(self) -> list[str]:
        return self.symbols_manifest.read_text().split()


def _artifact_set(root: Path) -> ArtifactSet:
    return ArtifactSet(
        root=root,
        lib_dir=root / "lib",
        traced_lib_dir=root / "lib-traced",
        shim=root / "libnistt.so",
        symbols_manifest=root / "traced_symbols.txt",
        bin_dir=root / "bin",
        intrusive_bin_dir=root / "bin-intrusive",
    )


def find_cc(cc: str | None = None) -> str:
    candidate = cc or os.environ.get("CC") or "gcc"
    resolved = shutil.which(candidate)
    if not resolved:
        raise BuildError(f"no C compiler found (tried {candidate!r})")
    return resolved


def _run_cc(args: list[str]) -> None:
    proc = subprocess.run(args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise BuildError(f"compile failed: {' '.join(args)}\n{proc.stderr}")


def _source_fingerprint(cc: str) -> str:
    h = hashlib.sha256()
    h.update(cc.encode())
    h.update(" ".join(CFLAGS + SHARED_CFLAGS).encode())
    for src in sorted(NATIVE_SRC.iterdir()):
        if src.suffix in (".c", ".h"):
            h.update(src.name.encode())
            h.update(src.read_bytes())
    return h.hexdigest()


def build(out_dir: str | os.PathLike[str] = "build/native", cc: str | None = None,
          force: bool = False) -> ArtifactSet:
    """Compile every artifact into ``out_dir``; skips work when up to date."""
    root = Path(out_dir).resolve()
    arts = _artifact_set(root)
    compiler = find_cc(cc)

    stamp = root / ".buildstamp"
    fingerprint = _source_fingerprint(compiler)
    if not force and stamp.exists() and stamp.read_text() == fingerprint:
        return arts

    for d in (arts.lib_dir, arts.traced_lib_dir, arts.bin_dir, arts.intrusive_bin_dir):
        d.mkdir(parents=True, exist_ok=True)

    src = lambda name: str(NATIVE_SRC / name)  # noqa: E731
    inc = ["-I", str(NATIVE_SRC)]

    _run_cc([compiler, *CFLAGS, *SHARED_CFLAGS, *inc, "-shared", src("kernel.c"),
             "-o", str(arts.lib_dir / "libsimkern.so")])
    _run_cc([compiler, *CFLAGS, *SHARED_CFLAGS, *inc, "-DSK_BUILTIN_TRACE", "-shared",
             src("kernel.c"), src("tracer.c"),
             "-o", str(arts.traced_lib_dir / "libsimkern.so")])
    _run_cc([compiler, *CFLAGS, *SHARED_CFLAGS, *inc, "-shared", src("shim.c"), src("tracer.c"),
             "-o", str(arts.shim), "-ldl"])
    for wl in WORKLOADS:
        _run_cc([compiler, *CFLAGS, *inc, src(f"workload_{wl}.c"),
                 "-L", str(arts.lib_dir), "-lsimkern", "-o", str(arts.bin_dir / wl)])
        _run_cc([compiler, *CFLAGS, *inc, "-DSK_BUILTIN_TRACE", src(f"workload_{wl}.c"),
                 src("kernel.c"), src("tracer.c"), "-o", str(arts.intrusive_bin_dir / wl)])

    arts.symbols_manifest.write_text("".join(s + "\n" for s in TRACED_SYMBOLS))
    stamp.write_text(fingerprint)
    return arts


def normalize_traces(traces: str | list[str] | tuple[str, ...] | None) -> str:
    """Normalize a trace-set spec to the comma string the shim consumes."""
    if traces is None:
        return "all"
    if isinstance(traces, str):
        parts = [t.strip() for t in traces.split(",") if t.strip()]
    else:
        parts = list(traces)
    known = set(TRACE_CATEGORIES) | {"all", "none"}
    for p in parts:
        if p not in known:
            raise ValueError(f"unknown trace category {p!r} (known: {sorted(known)})")
    return ",".join(parts) if parts else "none"


def env_for(
    arts: ArtifactSet,
    configuration: str,
    traces: str | list[str] | None = None,
    db_path: str | os.PathLike[str] | None = None,
    flush_every: int | None = None,
) -> dict[str, str]:
    """Assemble a fresh process environment for one run."""
    if configuration not in CONFIGURATIONS:
        raise ValueError(f"unknown configuration {configuration!r}")
    env: dict[str, str] = {"PATH": os.environ.get("PATH", "/usr/bin:/bin")}
    if configuration == REFERENCE:
        env["LD_LIBRARY_PATH"] = str(arts.lib_dir)
        return env
    if configuration == INTRUSIVE_SHARED:
        env["LD_LIBRARY_PATH"] = str(arts.traced_lib_dir)
    elif configuration == NONINTRUSIVE_SHARED:
        env["LD_LIBRARY_PATH"] = str(arts.lib_dir)
        env["LD_PRELOAD"] = str(arts.shim)
    env["NISTT_TRACE"] = normalize_traces(traces)
    if db_path is not None:
        env["NISTT_DB_PATH"] = str(db_path)
    if flush_every is not None:
        env["NISTT_FLUSH_EVERY"] = str(flush_every)
    return env


def run_workload(
    arts: ArtifactSet,
    workload: str,
    configuration: str = REFERENCE,
    traces: str | list[str] | None = None,
    db_path: str | os.PathLike[str] | None = None,
    until: str | None = None,
    quantum: str | None = None,
    out: str | os.PathLike[str] | None = None,
    cwd: str | os.PathLike[str] | None = None,
    extra_env: dict[str, str] | None = None,
) -> subprocess.CompletedProcess[str]:
    """Run one bundled workload under the given configuration."""
    exe = arts.workload(workload, configuration)
    if not exe.exists():
        raise FileNotFoundError(exe)
    argv = [str(exe)]
    if until:
        argv += ["--until", until]
    if quantum:
        argv += ["--quantum", quantum]
    if out:
        argv += ["--out", str(out)]
    env = env_for(arts, configuration, traces=traces, db_path=db_path)
    if extra_env:
        env.update(extra_env)
    return subprocess.run(argv, env=env, cwd=cwd, capture_output=True, text=True)


def exported_functions(library: str | os.PathLike[str]) -> set[str]:
    """Globally defined function symbols of a shared object (via nm)."""
    proc = subprocess.run(
        ["nm", "-D", "--defined-only", str(library)], capture_output=True, text=True, check=True
    )
    symbols = set()
    for line in proc.stdout.splitlines():
        parts = line.split()
        if len(parts) == 3 and parts[1] in ("T", "W", "i"):
            symbols.add(parts[2])
    return symbols


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nistt-build",
                                     description="compile the native kernel, shim and workloads")
    parser.add_argument("--out", default="build/native", help="artifact directory")
    parser.add_argument("--cc", default=None, help="C compiler (default: $CC or gcc)")
    parser.add_argument("--force", action="store_true", help="rebuild even if up to date")
    args = parser.parse_args(argv)
    try:
        arts = build(args.out, cc=args.cc, force=args.force)
    except BuildError as exc:
        print(exc, file=sys.stderr)
        return 1
    print(f"artifacts in {arts.root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
