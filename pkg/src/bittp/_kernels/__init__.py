"""Annealing kernel selection: compiled extension when available, else pure.

Set ``BITTP_FORCE_PURE=1`` to force the pure-Python kernel (used by the
kernel-equivalence tests and the benchmark). Both kernels are bit-identical
for a given seed; the compiled one is just fast.
"""

import os

from . import pure

if os.environ.get("BITTP_FORCE_PURE"):
    run_reads = pure.run_reads
    KERNEL = "pure"
else:
    try:
        from . import _sa_core

        run_reads = _sa_core.run_reads
        KERNEL = "compiled"
    except ImportError:
        run_reads = pure.run_reads
        KERNEL = "pure"

__all__ = ["run_reads", "KERNEL", "pure"]
