"""Non-intrusive tracing toolkit for loosely-timed discrete-event simulations.

The toolkit has two halves:

* native artifacts (built from the C sources in ``nistt._native`` by
  :mod:`nistt.native`): a small loosely-timed simulation kernel shipped as a
  shared library, bundled workload executables, and a preloadable shim that
  intercepts the kernel's traced symbols and records a binary trace without
  changing simulation behavior;
* pure-Python tooling: the trace file codec (:mod:`nistt.trace`), the
  post-processing analyses (:mod:`nistt.analyze`), the command line frontend
  (:mod:`nistt.cli`) and the overhead benchmark harness (:mod:`nistt.bench`).
"""

__version__ = "0.1.0"
