"""Deterministic compensated summation helpers.

All long reductions in this package go through these functions so that
results are bit-identical across runs and across worker counts: the
block layout is fixed by constants, never by the pool size.
"""

from __future__ import annotations

import math

import numpy as np

#: Fixed block length for chunked reductions.  Must not depend on the
#: number of workers, otherwise determinism across thread counts breaks.
BLOCK = 1 << 16


def fsum(values) -> float:
    """Exactly rounded sum of a 1-d float array (Shewchuk)."""
    arr = np.asarray(values, dtype=float)
    return math.fsum(arr.tolist()) if arr.size else 0.0


def cfsum(values) -> complex:
    """Exactly rounded sum of a complex array, component-wise."""
    arr = np.asarray(values, dtype=complex)
    if not arr.size:
        return 0.0 + 0.0j
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def blocked_fsum(values, block: int = BLOCK) -> float:
    """Compensated sum of block-wise exact partials, in index order.

    Equivalent to :func:`fsum` up to one rounding per block; used for
    very long arrays where a single fsum pass is unnecessarily slow.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size <= block:
        return fsum(arr)
    partials = [math.fsum(arr[i:i + block].tolist()) for i in range(0, arr.size, block)]
    return math.fsum(partials)


def neumaier(values) -> float:
    """Streaming Neumaier (improved Kahan) sum; kept as an independent
    cross-check oracle for the fsum-based reductions."""
    s = 0.0
    comp = 0.0
    for v in np.asarray(values, dtype=float):
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return s + comp
