"""Exact eigenvalue and lattice-point counting.

Everything here is integer arithmetic whenever the spectra are integral.
Square roots go through :func:`isqrt_array`, which corrects the float
guess against the integer predicate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from ._intmath import INT_LIMIT, check_range, isqrt_array
from .errors import BudgetError, DomainError, NumericRangeError
from .spectra import CircleFamily, ProductOperator

SIEVE_BUDGET = 200_000_000  # entries; uint16 counters -> 400 MB
BRUTE_FORCE_LIMIT = 1e8


class IndexBase(str, Enum):
    FROM_ZERO = "from_zero"
    FROM_ONE = "from_one"


# -- divisor function ---------------------------------------------------------

def _sieve_block(lo, hi):
    """d(n) for lo <= n < hi, counting divisor pairs (i, n/i) with i <= n/i."""
    d = np.zeros(hi - lo, dtype=np.uint16)
    for i in range(1, math.isqrt(hi - 1) + 1):
        j0 = max(i, -(-lo // i))
        start = i * j0 - lo
        if start >= hi - lo:
            continue
        d[start::i] += 2
        sq = i * i
        if lo <= sq < hi:
            d[sq - lo] -= 1
    return d


def divisor_sieve(N: int, budget: int = SIEVE_BUDGET) -> np.ndarray:
    """Array ``d`` of length N+1 with ``d[h]`` the number of divisors of h (d[0] = 0)."""
    N = int(N)
    if N < 1:
        raise DomainError(f"sieve length must be >= 1, got {N}", module="counting")
    if N > budget:
        raise BudgetError(
            f"sieve of {N} entries exceeds the memory budget of {budget} entries", module="counting"
        )
    d = np.zeros(N + 1, dtype=np.int64)
    d[1:] = _sieve_block(1, N + 1)
    return d


def sieve_partial_sums(points, block: int = 10_000_000) -> List[int]:
    """Sum of the sieve values d(1..x) for each x in ``points``.

    Runs a segmented sieve up to max(points) so memory stays at one block.
    Independent of the hyperbola identity; used as its oracle.
    """
    xs = [int(math.floor(p)) for p in points]
    if not xs:
        return []
    order = sorted(range(len(xs)), key=xs.__getitem__)
    top = xs[order[-1]]
    out = [0] * len(xs)
    total, lo, k = 0, 1, 0
    while k < len(order) and xs[order[k]] < 1:
        k += 1
    while k < len(order):
        hi = min(lo + block, top + 1)
        cum = np.cumsum(_sieve_block(lo, hi), dtype=np.int64)
        while k < len(order) and xs[order[k]] < hi:
            out[order[k]] = total + int(cum[xs[order[k]] - lo])
            k += 1
        total += int(cum[-1])
        lo = hi
    return out


def divisor_summatory(lam) -> int:
    """D(floor(lam)) = sum_{n <= lam} d(n) via the hyperbola identity, O(sqrt(lam))."""
    if lam < 1:
        raise DomainError(f"lambda must be >= 1, got {lam}", module="counting")
    x = int(math.floor(lam))
    check_range(x, "lambda")
    r = math.isqrt(x)
    # the sum of x // n is about x * (log x + 1); keep it inside int64
    if x * (math.log(x) + 2) >= INT_LIMIT:
        raise NumericRangeError(f"D({x}) would overflow int64 accumulation", module="counting")
    n = np.arange(1, r + 1, dtype=np.int64)
    return int(2 * int((x // n).sum()) - r * r)


# -- shifted pair count -------------------------------------------------------

def shifted_pair_count(c, lam, index_base: IndexBase | str = IndexBase.FROM_ZERO) -> int:
    """#{(n, m) : (n^2 + c)(m^2 + c) <= lam}, n and m ranging from 0 or from 1.

    Integer c uses exact arithmetic and the hyperbola symmetry of the region,
    so the cost is O(lam**(1/4)) row evaluations.
    """
    if not c > 0:
        raise DomainError(f"shift c must be positive, got {c}", module="counting")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}", module="counting")
    n0 = 0 if IndexBase(index_base) is IndexBase.FROM_ZERO else 1
    if float(c).is_integer():
        return _pair_count_exact(int(c), int(math.floor(lam)), n0)
    return _pair_count_float(float(c), float(lam), n0)


def _pair_count_exact(c, L, n0):
    check_range(L, "lambda")
    a0 = n0 * n0 + c
    if a0 * a0 > L:
        return 0
    # rows with (K^2 + c)^2 <= L; pairs with both indices above K lie outside
    K = math.isqrt(math.isqrt(L) - c)
    n = np.arange(n0, K + 1, dtype=np.int64)
    a = n * n + c
    r = L // a - c
    m_top = isqrt_array(np.maximum(r, 0))
    cols = np.where(r >= n0 * n0, m_top - n0 + 1, 0)
    rows = K - n0 + 1
    return int(2 * int(cols.sum()) - rows * rows)


def _pair_count_float(c, lam, n0):
    a0 = n0 * n0 + c
    n_top = math.isqrt(int(max(lam / a0 - c, 0.0))) + 2
    n = np.arange(n0, n_top + 1, dtype=np.float64)
    a = n * n + c
    a = a[a * a0 <= lam]
    if a.size == 0:
        return 0
    fam = CircleFamily(c)
    # count m >= 0 with a * (m^2 + c) <= lam, then drop m < n0
    j = fam._float_top(a, lam)
    cols = np.maximum(j - n0 + 1, 0)
    return int(cols.sum())


# -- counting functions for product operators ---------------------------------

def counting_function(op: ProductOperator, lam) -> int:
    """N(lam): eigenvalues of ``op`` at most ``lam``, counted with multiplicity.

    Integral spectra use the Dirichlet hyperbola split at U = isqrt(lam):
    every pair with both factors above the split lies outside the region, so

        N = sum_{a <= U} w_a M2(L // a) + sum_{b <= V} v_b M1(L // b) - M1(U) M2(V)

    with V = L // U.  Other spectra loop over the factor with fewer entries
    and count the partner in closed form.
    """
    f1, f2 = op.factor1, op.factor2
    if lam < op.min_eigenvalue:
        return 0
    if op.exact:
        L = int(math.floor(lam))
        check_range(L, "lambda")
        U = math.isqrt(L)
        V = L // U
        total = 0
        if f1.min_eigenvalue <= U:
            s1 = f1.materialize(U)
            total += int((s1.multiplicities * f2.count_le(L // s1.eigenvalues)).sum())
        if f2.min_eigenvalue <= V:
            s2 = f2.materialize(V)
            total += int((s2.multiplicities * f1.count_le(L // s2.eigenvalues)).sum())
        total -= int(f1.count_le(U)) * int(f2.count_le(V))
        return total
    lam = float(lam)
    # outer loop over the factor with fewer entries below its own cutoff
    n1 = f1.count_le(lam / f2.min_eigenvalue)
    n2 = f2.count_le(lam / f1.min_eigenvalue)
    outer, inner = (f1, f2) if n1 <= n2 else (f2, f1)
    s = outer.materialize(lam / inner.min_eigenvalue)
    ev = s.eigenvalues.astype(np.float64)
    return int((s.multiplicities * inner.count_times_le(ev, lam)).sum())


def brute_force_count(op: ProductOperator, lam) -> int:
    """Nested-loop count; the test oracle for :func:`counting_function`."""
    if lam > BRUTE_FORCE_LIMIT:
        raise DomainError(f"brute force refuses lambda={lam} > {BRUTE_FORCE_LIMIT:g}", module="counting")
    f1, f2 = op.factor1, op.factor2
    if lam < op.min_eigenvalue:
        return 0
    s1 = f1.materialize(lam / f2.min_eigenvalue)
    s2 = f2.materialize(lam / f1.min_eigenvalue)
    total = 0
    for a, w in zip(s1.eigenvalues.tolist(), s1.multiplicities.tolist()):
        for b, v in zip(s2.eigenvalues.tolist(), s2.multiplicities.tolist()):
            if a * b <= lam:
                total += w * v
            else:
                break
    return total


def brute_force_pairs(c, lam, index_base="from_zero") -> int:
    """Double loop over (n, m) for :func:`shifted_pair_count`."""
    n0 = 0 if IndexBase(index_base) is IndexBase.FROM_ZERO else 1
    total = 0
    n = n0
    while (n * n + c) * (n0 * n0 + c) <= lam:
        m = n0
        while (n * n + c) * (m * m + c) <= lam:
            total += 1
            m += 1
        n += 1
    return total


# -- tables -------------------------------------------------------------------

@dataclass
class CountingRow:
    lam: float
    exact: int
    predicted: float
    residual: float


@dataclass
class CountingTable:
    """Exact counts against a prediction; ``residual = exact - predicted``."""

    rows: List[CountingRow] = field(default_factory=list)
    convention: str = "multiplicity"
    operator: Optional[str] = None

    HEADER = ("lambda", "exact", "predicted", "residual")

    def add(self, lam, exact, predicted):
        if self.rows and exact < self.rows[-1].exact and lam >= self.rows[-1].lam:
            raise DomainError("exact counts must be nondecreasing in lambda", module="counting")
        self.rows.append(CountingRow(lam, int(exact), float(predicted), float(exact - predicted)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.HEADER)
        for r in self.rows:
            w.writerow([fmt(r.lam), r.exact, fmt(r.predicted), fmt(r.residual)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, **kw) -> "CountingTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != cls.HEADER:
            raise DomainError(f"unexpected header {header}", module="counting")
        table = cls(**kw)
        for lam, exact, pred, res in reader:
            table.rows.append(CountingRow(float(lam), int(exact), float(pred), float(res)))
        return table


def fmt(x) -> str:
    """Full-precision decimal: integers verbatim, floats to 17 significant digits."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")
