"""Exact integer roots on int64 arrays.

Floating point only supplies a first guess; every result is corrected
against the integer predicate, so a one-ULP error in ``sqrt`` can never
change a count.
"""

import numpy as np

from .errors import NumericRangeError

# all intermediate products stay below 2**63
INT_LIMIT = 2**62


def check_range(value, what="value"):
    if value >= INT_LIMIT:
        raise NumericRangeError(
            f"{what}={value} exceeds the exact int64 range (< 2**62)",
            module="counting",
        )


def isqrt_array(v):
    """Elementwise floor(sqrt(v)) for nonnegative int64 ``v``."""
    v = np.asarray(v, dtype=np.int64)
    r = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
    # float guess is off by at most one for v < 2**62
    r -= (r * r > v).astype(np.int64)
    r += ((r + 1) * (r + 1) <= v).astype(np.int64)
    return r


def _ipow(base, k):
    out = np.ones_like(base)
    for _ in range(k):
        out = out * base
    return out


def iroot_array(v, k):
    """Elementwise largest r >= 0 with r**k <= v."""
    v = np.asarray(v, dtype=np.int64)
    if k == 1:
        return v.copy()
    if k == 2:
        return isqrt_array(v)
    r = np.floor(np.power(v.astype(np.float64), 1.0 / k)).astype(np.int64)
    r = np.maximum(r, 0)
    for _ in range(3):
        too_big = _ipow(r, k) > v
        r -= too_big.astype(np.int64)
    for _ in range(3):
        room = _ipow(r + 1, k) <= v
        r += room.astype(np.int64)
    return r
