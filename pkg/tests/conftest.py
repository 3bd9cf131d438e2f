import hashlib
import subprocess
from pathlib import Path

import pytest

from nistt import native

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def artifacts():
    """Native kernel/shim/workload artifacts, built once per session."""
    return native.build(REPO_ROOT / "build" / "native")


@pytest.fixture(scope="session")
def scenario(artifacts, tmp_path_factory):
    """Compile-and-run helper for small C programs driving the kernel.

    scenario(c_source) compiles the source against the kernel library and
    returns a runner: runner(*argv) -> CompletedProcess with the library
    path preconfigured. Compiled binaries are cached by source hash.
    """
    workdir = tmp_path_factory.mktemp("scenarios")
    cc = native.find_cc()
    cache: dict[str, Path] = {}

    def compile_scenario(source: str, force_ucontext: bool = False):
        key = hashlib.sha256(f"{force_ucontext}\n{source}".encode()).hexdigest()[:16]
        exe = cache.get(key)
        if exe is None:
            src = workdir / f"scn_{key}.c"
            src.write_text(source)
            exe = workdir / f"scn_{key}"
            cmd = [cc, "-O1", "-g", "-Wall", "-I", str(native.NATIVE_SRC)]
            if force_ucontext:
                # exercise the portable context fallback: build the kernel
                # into the scenario directly with SK_FORCE_UCONTEXT
                cmd += ["-DSK_FORCE_UCONTEXT", str(src), str(native.NATIVE_SRC / "kernel.c")]
            else:
                cmd += [str(src), "-L", str(artifacts.lib_dir), "-lsimkern"]
            cmd += ["-o", str(exe)]
            subprocess.run(cmd, check=True, capture_output=True, text=True)
            cache[key] = exe

        def run(*argv: str, env_extra: dict | None = None):
            env = {"LD_LIBRARY_PATH": str(artifacts.lib_dir)}
            if env_extra:
                env.update(env_extra)
            return subprocess.run([str(exe), *argv], env=env, capture_output=True, text=True)

        return run

    return compile_scenario
