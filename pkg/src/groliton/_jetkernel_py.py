"""Pure-numpy fallback for the truncated Cauchy-product kernel.

Selected at import time by :mod:`groliton.jets` when the compiled extension is
unavailable or ``GROLITON_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def convolve(a, b, idx_a, idx_b, idx_out, nout):
    """Accumulate ``out[idx_out[n]] += a[idx_a[n]] * b[idx_b[n]]``."""
    return np.bincount(idx_out, weights=a[idx_a] * b[idx_b], minlength=nout)
