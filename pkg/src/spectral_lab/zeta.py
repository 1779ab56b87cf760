"""Spectral zeta functions on the real axis.

Public evaluation uses the variable ``s`` with sums ``sum_j w_j lam_j**(-s)``;
the pole of a model factor of order m on a manifold of dimension n sits at
``s = n/m``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._special import bessel_k
from .errors import ConvergenceError, CutoffError, DomainError
from .spectra import CircleFamily, FiniteFamily, ProductOperator, Spectrum1D

POLE_GUARD = 1e-6
DIRECT_MARGIN = 0.05
MAX_DIRECT_ENTRIES = 50_000_000

_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30)  # B_2 .. B_8


# -- Riemann zeta ---------------------------------------------------------------

def _em_terms(s, N):
    # Euler-Maclaurin correction terms B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1), k = 1..4
    out = []
    rising = s
    for k, b in enumerate(_B2K, start=1):
        if k > 1:
            rising *= (s + 2 * k - 3) * (s + 2 * k - 2)
        out.append(b / math.factorial(2 * k) * rising * N ** (-s - 2 * k + 1))
    return out


def riemann_zeta_real(s: float, tol: float = 1e-14) -> float:
    """zeta_R(s) for real s > 1, Euler-Maclaurin with Bernoulli corrections through B_6.

    The first omitted (B_8) term bounds the remainder; N grows until it is
    below ``tol``.
    """
    if not s > 1 + POLE_GUARD:
        raise DomainError(
            f"riemann_zeta_real needs s > 1 (got {s}); use laurent_at_pole for the pole at s=1",
            module="zeta",
        )
    N = 8
    while True:
        terms = _em_terms(s, N)
        if abs(terms[3]) <= tol or N > 1_000_000:
            break
        N *= 2
    n = np.arange(1, N, dtype=np.float64)
    head = float(np.sum((n ** -s)[::-1]))
    return math.fsum([head, N ** (1 - s) / (s - 1), 0.5 * N**-s, *terms[:3]])


# -- shifted lattice sum --------------------------------------------------------

def _rgamma(s):
    if s <= 0 and float(s).is_integer():
        return 0.0
    return 1.0 / math.gamma(s)


def epstein_shifted(c: float, s: float, tol: float = 1e-14, folded: bool = False) -> float:
    """Z_c(s) = sum_{n in Z} (n^2 + c)^(-s), continued to all real s off its poles.

    Poisson summation gives

        Z_c(s) = sqrt(pi) G(s-1/2)/G(s) c^(1/2-s)
                 + 4 pi^s / G(s) c^((1-2s)/4) sum_{n>=1} n^(s-1/2) K_{s-1/2}(2 pi n sqrt(c)).

    The Bessel series converges exponentially and is cut once a term falls
    below tol/10.  Poles sit at s = 1/2, -1/2, -3/2, ...

    ``folded=True`` returns Z_c(s) + c^(-s) = 2 sum_{n>=0} (n^2 + c)^(-s), the
    factor zeta of the multiplicity-four bookkeeping.
    """
    if not c > 0:
        raise DomainError(f"epstein_shifted needs c > 0, got {c}", module="zeta")
    nearest = 0.5 - round(0.5 - s) if s < 0.5 else 0.5
    if abs(s - nearest) < POLE_GUARD:
        raise DomainError(f"s={s} is within {POLE_GUARD} of the pole at {nearest}", module="zeta")
    nu = s - 0.5
    head = math.sqrt(math.pi) * math.gamma(nu) * _rgamma(s) * c**-nu
    rg = _rgamma(s)
    tail = 0.0
    if rg != 0.0:
        pref = 4.0 * math.pi**s * rg * c ** ((1 - 2 * s) / 4)
        x1 = 2 * math.pi * math.sqrt(c)
        n_max = 4
        while True:
            n = np.arange(1, n_max + 1, dtype=np.float64)
            terms = pref * n**nu * bessel_k(nu, x1 * n)
            if abs(terms[-1]) < tol / 10:
                break
            n_max *= 2
        keep = np.abs(terms) >= tol / 10
        # terms decay monotonically beyond the first few; sum from the small end
        tail = float(np.sum(terms[: int(np.flatnonzero(keep).max()) + 1][::-1])) if keep.any() else 0.0
    value = head + tail
    if folded:
        value += c**-s
    return value


# -- direct sums -----------------------------------------------------------------

def _direct_cutoff(a, alpha, s, tol, floor=1.0):
    # tail sum_{lam > L} w lam^-s <= s a L^(alpha - s) / (s - alpha) when N(x) <= a x^alpha
    if alpha == 0:
        return None
    if s - alpha < DIRECT_MARGIN:
        raise DomainError(
            f"s={s} is inside the convergence margin: need s >= {alpha + DIRECT_MARGIN:g} "
            f"(abscissa {alpha:g} + margin {DIRECT_MARGIN})",
            module="zeta",
        )
    L = (s * a / ((s - alpha) * tol)) ** (1.0 / (s - alpha))
    return max(L, floor)


def spectral_zeta_direct(source, s: float, tol: float = 1e-12) -> float:
    """Truncated sum of w_j lam_j^(-s) with an integral-comparison tail bound below ``tol``.

    ``source`` is a :class:`Spectrum1D`, a spectrum family, or a
    :class:`ProductOperator` (summed as a tensor stream).
    """
    if isinstance(source, ProductOperator):
        return _direct_tensor(source, s, tol)
    family = source
    spectrum = None
    if isinstance(source, Spectrum1D):
        spectrum, family = source, source.family
        if source.cutoff == math.inf:
            return _weighted_sum(source, s)
    if isinstance(family, FiniteFamily):
        return _weighted_sum(family.materialize(family.entries[-1][0]), s)
    if family is None:
        raise CutoffError("truncated spectrum without a family: tail cannot be bounded", module="zeta")
    a, alpha = family.count_bound()
    L = _direct_cutoff(a, alpha, s, tol)
    if a * L**alpha > MAX_DIRECT_ENTRIES:
        raise DomainError(
            f"s={s}: direct sum needs ~{a * L ** alpha:.3g} entries; move s further from {alpha:g}",
            module="zeta",
        )
    if spectrum is None or spectrum.cutoff < L:
        spectrum = family.materialize(L)
    return _weighted_sum(spectrum, s)


def _weighted_sum(spec: Spectrum1D, s):
    ev = spec.eigenvalues.astype(np.float64)
    terms = spec.multiplicities * ev**-s
    return float(np.sum(terms[::-1]))


def _direct_tensor(op: ProductOperator, s, tol):
    f1, f2 = op.factors
    a1, al1 = f1.count_bound()
    a2, al2 = f2.count_bound()
    m1, m2 = float(f1.min_eigenvalue), float(f2.min_eigenvalue)
    # N(x) <= N1(x/m2) N2(x/m1) <= K x^(al1 + al2)
    K = a1 * a2 * m2**-al1 * m1**-al2
    L = _direct_cutoff(K, al1 + al2, s, tol, floor=max(m1, m2, 1.0))
    if L is None:
        L = float(f1.entries[-1][0]) * float(f2.entries[-1][0])
    if K * L ** (al1 + al2) > MAX_DIRECT_ENTRIES:
        raise DomainError(f"s={s}: tensor direct sum too large; increase s", module="zeta")
    return _weighted_sum(op.materialize(L), s)


# -- evaluators ------------------------------------------------------------------

class ZetaEvaluator:
    """Callable zeta function with a declared region of validity."""

    kind = "abstract"
    poles: tuple = ()

    def __call__(self, s: float) -> float:
        raise NotImplementedError

    def in_domain(self, s: float) -> bool:
        return all(abs(s - p) >= POLE_GUARD for p in self.poles)

    def residue_and_finite_part(self, z0):
        """Closed-form (residue, finite part) at a simple pole, when known."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantZeta(ZetaEvaluator):
    value: float = 1.0
    kind = "constant"

    def __call__(self, s):
        return self.value

    def in_domain(self, s):
        return True


@dataclass(frozen=True)
class RiemannZeta(ZetaEvaluator):
    """``scale * zeta_R(stretch * s)``; pole at s = 1/stretch."""

    scale: float = 1.0
    stretch: float = 1.0
    tol: float = 1e-14
    kind = "riemann"

    @property
    def poles(self):
        return (1.0 / self.stretch,)

    def in_domain(self, s):
        return self.stretch * s > 1 + POLE_GUARD

    def __call__(self, s):
        if not self.in_domain(s):
            raise DomainError(f"riemann evaluator valid for s > {1 / self.stretch:g}, got {s}", module="zeta")
        return self.scale * riemann_zeta_real(self.stretch * s, self.tol)

    def residue_and_finite_part(self, z0):
        g = _gamma()
        return self.scale / self.stretch, self.scale * g


@dataclass(frozen=True)
class EpsteinZeta(ZetaEvaluator):
    """Factor zeta of the circle family: Z_c(k s), plus c^(-k s) when folded."""

    c: float
    k: int = 1
    folded: bool = False
    tol: float = 1e-14
    kind = "shifted_epstein"

    @property
    def poles(self):
        return tuple((0.5 - j) / self.k for j in range(8))

    def in_domain(self, s):
        return all(abs(self.k * s - (0.5 - j)) >= POLE_GUARD for j in range(64))

    def __call__(self, s):
        return epstein_shifted(self.c, self.k * s, self.tol, folded=self.folded)

    def residue_and_finite_part(self, z0):
        from .constants import gamma_c

        if abs(z0 - 0.5 / self.k) > 1e-15:
            raise DomainError(f"no closed form at s={z0}", module="zeta")
        # Z_c(s) = 1/(s - 1/2) + 2 gamma_c - c^(-1/2) + O(s - 1/2)
        finite = 2.0 * gamma_c(self.c, 1e-13, method="poisson").value
        if not self.folded:
            finite -= self.c**-0.5
        return 1.0 / self.k, finite


@dataclass(frozen=True)
class DirectZeta(ZetaEvaluator):
    source: object
    tol: float = 1e-12
    kind = "direct"

    @property
    def abscissa(self):
        if isinstance(self.source, ProductOperator):
            return sum(f.count_bound()[1] for f in self.source.factors)
        fam = self.source.family if isinstance(self.source, Spectrum1D) else self.source
        return 0.0 if fam is None else fam.count_bound()[1]

    def in_domain(self, s):
        if isinstance(self.source, FiniteFamily) or getattr(self.source, "cutoff", None) == math.inf:
            return True
        return s >= self.abscissa + DIRECT_MARGIN

    def __call__(self, s):
        return spectral_zeta_direct(self.source, s, self.tol)

    def residue_and_finite_part(self, z0):
        if isinstance(self.source, FiniteFamily):
            return 0.0, float(self(z0))
        raise DomainError("direct sums carry no closed-form pole data", module="zeta")


@dataclass(frozen=True)
class ProductZeta(ZetaEvaluator):
    left: ZetaEvaluator
    right: ZetaEvaluator
    kind = "product"

    @property
    def poles(self):
        return tuple(self.left.poles) + tuple(self.right.poles)

    def in_domain(self, s):
        return self.left.in_domain(s) and self.right.in_domain(s)

    def __call__(self, s):
        return product_zeta(self.left, self.right, s)


def product_zeta(left: ZetaEvaluator, right: ZetaEvaluator, s: float) -> float:
    """zeta(A (x) B, s) = zeta(A, s) * zeta(B, s)."""
    for side, ev in (("left", left), ("right", right)):
        if not ev.in_domain(s):
            raise DomainError(f"s={s} outside the valid region of the {side} factor ({ev.kind})", module="zeta")
    return left(s) * right(s)


def zeta_for(obj, tol: float = 1e-14) -> ZetaEvaluator:
    """Best available evaluator for a family, spectrum or product operator."""
    if isinstance(obj, ProductOperator):
        return ProductZeta(zeta_for(obj.factor1, tol), zeta_for(obj.factor2, tol))
    if isinstance(obj, CircleFamily):
        if obj.c == 0:
            # kernel removed: 2 sum_{j>=1} j^(-2ks)
            return RiemannZeta(scale=2.0, stretch=2.0 * obj.k, tol=tol)
        return EpsteinZeta(obj.c, obj.k, folded=obj.folded, tol=tol)
    if isinstance(obj, (FiniteFamily, Spectrum1D)):
        return DirectZeta(obj)
    raise DomainError(f"no zeta evaluator for {obj!r}", module="zeta")


# -- Laurent data -----------------------------------------------------------------

@dataclass
class LaurentData:
    """Coefficients of zeta(s) = A2/(s-z0)^2 + A1/(s-z0) + finite_part + O(s-z0)."""

    z0: float
    order: int
    A2: float
    A1: float
    finite_part: Optional[float]
    error_estimates: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order not in (1, 2):
            raise DomainError(f"pole order must be 1 or 2, got {self.order}", module="zeta")
        if self.order == 1 and self.A2 != 0:
            raise DomainError("a simple pole carries A2 = 0", module="zeta")
        if self.order == 2 and self.A2 == 0:
            raise DomainError("a double pole needs A2 != 0", module="zeta")

    @property
    def leading(self):
        return self.A2 if self.order == 2 else self.A1

    def to_dict(self):
        return {
            "z0": self.z0,
            "order": self.order,
            "A2": self.A2,
            "A1": self.A1,
            "finite_part": self.finite_part,
            "err": dict(self.error_estimates),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, d):
        return cls(d["z0"], d["order"], d["A2"], d["A1"], d["finite_part"], dict(d.get("err", {})))


@dataclass(frozen=True)
class ExtrapolationConfig:
    h: float = 0.1
    levels: int = 8
    depth: int = 6


def _richardson(values, depth):
    """Richardson table for samples at h, h/2, h/4, ... with integer-power error terms."""
    table = [[v] for v in values]
    for k in range(1, len(values)):
        for j in range(1, min(k, depth) + 1):
            f = 2.0**j
            table[k].append(table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (f - 1))
    return table


def _extrapolate(values, depth, what):
    table = _richardson(values, depth)
    last, prev = table[-1], table[-2]
    d = min(depth, len(last) - 1, len(prev) - 1)
    diffs = [abs(last[j] - prev[j]) for j in range(d + 1)]
    est = last[d]
    scale = max(1.0, abs(est))
    if not np.isfinite(est) or (diffs[-1] > diffs[0] and diffs[-1] > 1e-9 * scale):
        raise ConvergenceError(
            f"{what}: extrapolation not converging; level differences {['%.3e' % x for x in diffs]}",
            table=table,
            module="zeta",
        )
    return est, diffs[-1], table


def laurent_at_pole(f, z0: float, p: int, config: Optional[ExtrapolationConfig] = None) -> LaurentData:
    """Numerical Laurent coefficients of ``f`` at a pole of order ``p`` in {1, 2}.

    Samples g(s) = (s - z0)^p f(s) at s = z0 + h 2^-k, k = 0..levels, from the
    convergent side, and extrapolates g(z0), g'(z0), g''(z0)/2 by repeated
    Richardson tables (value, then difference quotients).
    """
    if p not in (1, 2):
        raise DomainError(f"pole order {p} unsupported (1 or 2)", module="zeta")
    cfg = config or ExtrapolationConfig()
    s_k = [z0 + cfg.h * 2.0**-k for k in range(cfg.levels + 1)]
    # realized offsets: z0 + t rounds, and t^p must match the point f actually saw
    t = np.array([sk - z0 for sk in s_k])
    g = np.array([ti**p * f(sk) for ti, sk in zip(t, s_k)])
    coeffs, errs = [], []
    current = g
    for level in range(p + 1):
        try:
            est, err, _ = _extrapolate(list(current), cfg.depth, f"coefficient {level}")
        except ConvergenceError:
            # the constant term behind a double pole is informational only
            if level < p:
                raise
            est, err = None, None
        coeffs.append(est)
        errs.append(err)
        if est is not None:
            current = (current - est) / t
    if p == 2:
        A2, A1, fp = coeffs
        eA2, eA1, efp = errs
        if abs(A2) <= max(10 * eA2, 1e-12):
            raise DomainError(f"no double pole at {z0}: (s-z0)^2 f -> {A2:.3e}", module="zeta")
    else:
        A2, A1, fp = 0.0, coeffs[0], coeffs[1]
        eA2, eA1, efp = 0.0, errs[0], errs[1]
    return LaurentData(z0, p, A2, A1, fp, {"A2": eA2, "A1": eA1, "finite_part": efp})


def closed_form_laurent(op: ProductOperator) -> LaurentData:
    """Laurent data of zeta(op) at its first pole from the factors' own pole data.

    Equal growth ratios: A2 = R1 R2 and A1 = R1 F2 + R2 F1.  Otherwise the
    faster factor's simple pole is scaled by the partner's zeta value there.
    """
    z1, z2 = zeta_for(op.factor1), zeta_for(op.factor2)
    z0 = op.z0
    r1, r2 = op.ratios
    if op.pole_order == 2:
        R1, F1 = z1.residue_and_finite_part(z0)
        R2, F2 = z2.residue_and_finite_part(z0)
        return LaurentData(z0, 2, R1 * R2, R1 * F2 + R2 * F1, None, {"A2": 0.0, "A1": 1e-12})
    fast, slow = (z1, z2) if r1 > r2 else (z2, z1)
    R, F = fast.residue_and_finite_part(z0)
    partner = slow(z0)
    return LaurentData(z0, 1, 0.0, R * partner, None, {"A1": 1e-12})


_GAMMA = None


def _gamma():
    global _GAMMA
    if _GAMMA is None:
        from .constants import euler_gamma

        _GAMMA = euler_gamma(1e-14).value
    return _GAMMA
