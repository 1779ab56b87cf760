"""One-dimensional model spectra and their tensor products.

Two families of explicit spectra are provided:

* :class:`CircleFamily` -- ``(-Delta + c)**k`` on the circle, eigenvalues
  ``(j**2 + c)**k`` for ``j in Z``.  Entry ``j = 0`` has multiplicity 1 and
  every ``j >= 1`` multiplicity 2.  With ``folded=True`` every ``j >= 0``
  carries multiplicity 2, so that the tensor square assigns multiplicity four
  to every pair ``(n, m)`` of naturals; this is the bookkeeping under which
  ``N(A_c; lam**2) = 4 D_c(lam)`` holds exactly.
* :class:`FiniteFamily` -- an explicit finite list of ``(value, multiplicity)``.

Families are lazy: they know their eigenvalues in closed form and only
materialize a :class:`Spectrum1D` up to a requested cutoff.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ._intmath import INT_LIMIT, check_range, iroot_array, isqrt_array
from .errors import CutoffError, DescriptorError, DomainError, EmptySpectrumError

MERGE_RTOL = 1e-12


def _is_int(x) -> bool:
    return float(x).is_integer()


def _floor_int(x):
    """floor(x) as a 1-d int64 array; integer input passes through untouched."""
    xa = np.atleast_1d(np.asarray(x))
    if np.issubdtype(xa.dtype, np.integer):
        return xa.astype(np.int64)
    if xa.dtype == object:
        return np.array([math.floor(v) for v in xa], dtype=np.int64)
    xf = np.floor(xa.astype(np.float64))
    if np.any(xf >= INT_LIMIT):
        check_range(float(xf.max()), "argument")
    return xf.astype(np.int64)


@dataclass(frozen=True)
class CircleFamily:
    """Spectrum of ``(-Delta + c)**k`` on S^1."""

    c: float
    k: int = 1
    kernel_removed: bool = False
    folded: bool = False

    def __post_init__(self):
        if not self.c >= 0:
            raise DomainError(f"shift c must be nonnegative, got {self.c}", module="spectra")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"power k must be a positive integer, got {self.k}", module="spectra")
        if self.c == 0 and not self.kernel_removed:
            raise DomainError(
                "c=0 has a zero eigenvalue; request kernel_removed=True", module="spectra"
            )
        if self.kernel_removed and self.c != 0:
            raise DomainError("kernel_removed only applies to the unshifted family c=0", module="spectra")

    # -- structure -----------------------------------------------------
    @property
    def exact(self) -> bool:
        return _is_int(self.c)

    @property
    def order(self) -> int:
        return 2 * self.k

    @property
    def dim(self) -> int:
        return 1

    @property
    def ratio(self) -> float:
        """Growth exponent n/m: N(x) ~ weyl_coefficient * x**ratio."""
        return 1.0 / (2 * self.k)

    @property
    def weyl_coefficient(self) -> float:
        return 2.0

    @property
    def first_index(self) -> int:
        return 1 if self.kernel_removed else 0

    @property
    def min_eigenvalue(self):
        return self.eigenvalue(self.first_index)

    @property
    def descriptor(self) -> str:
        name = "folded" if self.folded else "circle"
        c = int(self.c) if self.exact else self.c
        return f"{name}(c={c},k={self.k})"

    def count_bound(self):
        """(a, alpha) with N(x) <= a * x**alpha for every x >= 1."""
        return 3.0 if not self.folded else 4.0, self.ratio

    # -- closed forms --------------------------------------------------
    def eigenvalue(self, j):
        j = np.asarray(j)
        if self.exact:
            base = j.astype(np.int64) ** 2 + int(self.c)
            out = np.ones_like(base)
            for _ in range(self.k):
                out = out * base
            return out if out.ndim else int(out)
        out = (j.astype(np.float64) ** 2 + self.c) ** self.k
        return out if out.ndim else float(out)

    def multiplicity(self, j):
        j = np.asarray(j)
        if self.folded:
            return np.full(j.shape, 2, dtype=np.int64)
        return np.where(j == 0, 1, 2).astype(np.int64)

    def _cumulative(self, j):
        # total multiplicity of indices first_index..j (j >= first_index - 1)
        j0 = self.first_index
        if self.folded:
            total = 2 * (j - j0 + 1)
        else:
            total = 2 * j + 1 if j0 == 0 else 2 * j
        return np.where(np.asarray(j) < j0, 0, total)[()]

    def top_index(self, x):
        """Largest index j with eigenvalue(j) <= x (first_index - 1 if none)."""
        scalar = np.ndim(x) == 0
        j0 = self.first_index
        if self.exact:
            xi = np.maximum(_floor_int(x), 0)
            r = iroot_array(xi, self.k)
            t = r - int(self.c)
            j = isqrt_array(np.maximum(t, 0))
            j = np.where(t >= j0 * j0, j, j0 - 1)
        else:
            xf = np.atleast_1d(np.asarray(x, dtype=np.float64))
            j = self._float_top(np.ones_like(xf), xf)
        return int(j[0]) if scalar else j

    def _float_top(self, a, L):
        # largest j with a * eigenvalue(j) <= L, using the same float product
        # the brute-force oracle uses
        j0 = self.first_index
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.power(np.maximum(L / a, 0.0), 1.0 / self.k) - self.c
        j = np.floor(np.sqrt(np.maximum(base, 0.0))).astype(np.int64)
        for _ in range(3):
            up = a * self.eigenvalue(j + 1) <= L
            j = j + up.astype(np.int64)
        for _ in range(3):
            down = (j >= j0) & (a * self.eigenvalue(np.maximum(j, 0)) > L)
            j = j - down.astype(np.int64)
        return np.maximum(j, j0 - 1)

    def count_le(self, x):
        """Total multiplicity of eigenvalues <= x."""
        j = self.top_index(x)
        return self._cumulative(j)

    def count_times_le(self, a, L):
        """For each a: total multiplicity of eigenvalues mu with a * mu <= L."""
        a = np.asarray(a)
        if self.exact and np.issubdtype(a.dtype, np.integer) and isinstance(L, (int, np.integer)):
            return self.count_le(np.int64(L) // a.astype(np.int64))
        j = self._float_top(a.astype(np.float64), float(L))
        return self._cumulative(j)

    def materialize(self, cutoff) -> "Spectrum1D":
        if cutoff == math.inf:
            raise CutoffError("an infinite family needs a finite cutoff", module="spectra")
        top = self.top_index(cutoff)
        j = np.arange(self.first_index, top + 1, dtype=np.int64)
        if j.size == 0:
            raise EmptySpectrumError(
                f"cutoff {cutoff} is below the smallest eigenvalue {self.min_eigenvalue}",
                module="spectra",
            )
        return Spectrum1D(self.eigenvalue(j), self.multiplicity(j), float(cutoff), self)


@dataclass(frozen=True)
class FiniteFamily:
    """A finite explicit spectrum; complete at any cutoff."""

    entries: Tuple[Tuple[float, int], ...]

    def __post_init__(self):
        if not self.entries:
            raise EmptySpectrumError("finite spectrum with no entries", module="spectra")
        merged = {}
        for value, mult in self.entries:
            if not value > 0:
                raise DomainError(f"eigenvalues must be positive, got {value}", module="spectra")
            if int(mult) != mult or mult < 1:
                raise DomainError(f"multiplicity must be a positive integer, got {mult}", module="spectra")
            merged[value] = merged.get(value, 0) + int(mult)
        object.__setattr__(self, "entries", tuple(sorted(merged.items())))

    @property
    def exact(self) -> bool:
        return all(_is_int(v) for v, _ in self.entries)

    @property
    def values(self):
        dtype = np.int64 if self.exact else np.float64
        return np.array([v for v, _ in self.entries], dtype=dtype)

    @property
    def multiplicities(self):
        return np.array([m for _, m in self.entries], dtype=np.int64)

    @property
    def ratio(self) -> float:
        return 0.0

    @property
    def weyl_coefficient(self) -> float:
        return 0.0

    @property
    def order(self):
        return None

    @property
    def dim(self) -> int:
        return 0

    @property
    def kernel_removed(self) -> bool:
        return False

    @property
    def min_eigenvalue(self):
        v = self.entries[0][0]
        return int(v) if self.exact else v

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def descriptor(self) -> str:
        parts = []
        for v, m in self.entries:
            v = int(v) if _is_int(v) else v
            parts.append(f"{v}:{m}")
        return "finite(" + ",".join(parts) + ")"

    def count_bound(self):
        return float(self.total_multiplicity), 0.0

    def count_le(self, x):
        cum = np.concatenate([[0], np.cumsum(self.multiplicities)])
        vals = self.values
        if self.exact:
            idx = np.searchsorted(vals, _floor_int(x), side="right")
            if np.ndim(x) == 0:
                idx = idx[0]
        else:
            idx = np.searchsorted(vals, x, side="right")
        out = cum[idx]
        return int(out) if np.ndim(out) == 0 else out

    def count_times_le(self, a, L):
        a = np.asarray(a)
        vals = self.values
        cum = np.concatenate([[0], np.cumsum(self.multiplicities)])
        if self.exact and np.issubdtype(a.dtype, np.integer) and isinstance(L, (int, np.integer)):
            return cum[np.searchsorted(vals, np.int64(L) // a, side="right")]
        a = a.astype(np.float64)
        idx = np.searchsorted(vals.astype(np.float64), float(L) / a, side="right")
        n = len(vals)
        fl = vals.astype(np.float64)
        lower = (idx > 0) & (a * fl[np.maximum(idx - 1, 0)] > L)
        idx = idx - lower
        upper = (idx < n) & (a * fl[np.minimum(idx, n - 1)] <= L)
        idx = idx + upper
        return cum[idx]

    def materialize(self, cutoff) -> "Spectrum1D":
        vals = self.values
        keep = vals <= cutoff
        if not keep.any():
            raise EmptySpectrumError(
                f"cutoff {cutoff} is below the smallest eigenvalue {vals[0]}", module="spectra"
            )
        # a finite spectrum is complete once the cutoff passes its largest entry
        cut = math.inf if keep.all() else float(cutoff)
        return Spectrum1D(vals[keep], self.multiplicities[keep], cut, self)


@dataclass(frozen=True, eq=False)
class Spectrum1D:
    """Materialized (eigenvalue, multiplicity) list, complete up to ``cutoff``."""

    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    cutoff: float
    family: Optional[object] = field(default=None)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues)
        mu = np.asarray(self.multiplicities, dtype=np.int64)
        if ev.shape != mu.shape or ev.ndim != 1:
            raise DomainError("eigenvalue and multiplicity arrays must be 1-d and equal length", module="spectra")
        if ev.size and (np.any(np.diff(ev) <= 0)):
            raise DomainError("eigenvalues must be strictly increasing", module="spectra")
        if ev.size and ev[0] <= 0:
            raise DomainError("eigenvalues must be positive", module="spectra")
        if np.any(mu < 1):
            raise DomainError("multiplicities must be >= 1", module="spectra")
        ev.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "multiplicities", mu)

    @classmethod
    def from_entries(cls, entries, cutoff=math.inf):
        fam = FiniteFamily(tuple(entries))
        return cls(fam.values, fam.multiplicities, cutoff, fam)

    @property
    def entries(self):
        out = []
        for v, m in zip(self.eigenvalues.tolist(), self.multiplicities.tolist()):
            out.append((v, m))
        return out

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def min_eigenvalue(self):
        return self.eigenvalues[0]

    @property
    def total_multiplicity(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def exact(self) -> bool:
        return np.issubdtype(self.eigenvalues.dtype, np.integer)


def circle_laplacian_spectrum(c, k=1, cutoff=math.inf, kernel_removed=False, folded=False) -> Spectrum1D:
    """Eigenvalues ``(j**2 + c)**k <= cutoff`` of the shifted circle Laplacian power."""
    if c < 0:
        raise DomainError(f"shift c must be nonnegative, got {c}", module="spectra")
    if cutoff == math.inf:
        raise CutoffError("an infinite family needs a finite cutoff", module="spectra")
    return CircleFamily(c, k, kernel_removed=kernel_removed, folded=folded).materialize(cutoff)


def _merge(values, weights, exact):
    if values.size == 0:
        return values, weights
    if exact:
        uniq, inv = np.unique(values, return_inverse=True)
        return uniq, np.bincount(inv, weights=weights).astype(np.int64)
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    # group consecutive values within relative tolerance
    new_group = np.empty(values.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = np.diff(values) > MERGE_RTOL * np.abs(values[1:])
    gid = np.cumsum(new_group) - 1
    first = np.flatnonzero(new_group)
    return values[first], np.bincount(gid, weights=weights).astype(np.int64)


def tensor_spectrum(s1: Spectrum1D, s2: Spectrum1D, cutoff) -> Spectrum1D:
    """All products ``lam_j * mu_i <= cutoff`` with multiplied, merged multiplicities."""
    if len(s1) == 0 or len(s2) == 0:
        raise EmptySpectrumError("tensor product of an empty spectrum", module="spectra")
    need1 = cutoff / s2.min_eigenvalue
    need2 = cutoff / s1.min_eigenvalue
    if s1.cutoff < need1:
        raise CutoffError(
            f"factor 1 materialized to {s1.cutoff}, needs >= {need1}", required=need1, module="spectra"
        )
    if s2.cutoff < need2:
        raise CutoffError(
            f"factor 2 materialized to {s2.cutoff}, needs >= {need2}", required=need2, module="spectra"
        )
    exact = s1.exact and s2.exact
    if exact:
        check_range(int(math.floor(cutoff)), "cutoff")
    # loop over the shorter factor, slice the longer one by searchsorted
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    vals, wts = [], []
    ev2 = s2.eigenvalues
    for lam, w in zip(s1.eigenvalues, s1.multiplicities):
        if exact:
            hi = np.searchsorted(ev2, int(cutoff) // int(lam), side="right")
            prod = ev2[:hi] * lam
        else:
            hi = np.searchsorted(ev2, cutoff / lam, side="right") + 1
            prod = ev2[:hi] * lam
            keep = prod <= cutoff
            prod = prod[keep]
            hi = int(keep.sum())
        if hi == 0:
            break
        vals.append(prod)
        wts.append(s2.multiplicities[:hi] * w)
    dtype = np.int64 if exact else np.float64
    values = np.concatenate(vals).astype(dtype) if vals else np.empty(0, dtype=dtype)
    weights = np.concatenate(wts) if wts else np.empty(0, dtype=np.int64)
    values, weights = _merge(values, weights, exact)
    return Spectrum1D(values, weights, float(cutoff), None)


@dataclass(frozen=True)
class ProductOperator:
    """``A = P1 (x) P2`` described by its two factor families."""

    factor1: object
    factor2: object

    @property
    def factors(self):
        return (self.factor1, self.factor2)

    @property
    def orders(self):
        return (self.factor1.order, self.factor2.order)

    @property
    def dims(self):
        return (self.factor1.dim, self.factor2.dim)

    @property
    def ratios(self):
        return (self.factor1.ratio, self.factor2.ratio)

    @property
    def l(self) -> float:
        return self.factor1.ratio

    @property
    def z0(self) -> float:
        """First pole of the spectral zeta function in the variable s = -z."""
        return max(self.ratios)

    @property
    def pole_order(self) -> int:
        r1, r2 = self.ratios
        return 2 if (r1 == r2 and r1 > 0) else 1

    @property
    def kernel_removed(self) -> bool:
        return self.factor1.kernel_removed or self.factor2.kernel_removed

    @property
    def exact(self) -> bool:
        return self.factor1.exact and self.factor2.exact

    @property
    def min_eigenvalue(self):
        return self.factor1.min_eigenvalue * self.factor2.min_eigenvalue

    @property
    def descriptor(self) -> str:
        return f"{self.factor1.descriptor}⊗{self.factor2.descriptor}"

    def swapped(self) -> "ProductOperator":
        return ProductOperator(self.factor2, self.factor1)

    def materialize(self, cutoff) -> Spectrum1D:
        s1 = self.factor1.materialize(cutoff / self.factor2.min_eigenvalue)
        s2 = self.factor2.materialize(cutoff / self.factor1.min_eigenvalue)
        return tensor_spectrum(s1, s2, cutoff)


# -- descriptor grammar ---------------------------------------------------

_FAMILY_RE = re.compile(r"^\s*(circle|folded|finite)\s*\((.*)\)\s*$", re.S)
_SPLIT_RE = re.compile(r"\)\s*(?:⊗|x|\*)\s*(?=[a-z])")


def _parse_number(text):
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        raise DescriptorError(f"not a number: {text!r}") from None
    return int(value) if value.is_integer() and "." not in text and "e" not in text.lower() else value


def parse_family(text: str):
    m = _FAMILY_RE.match(text)
    if not m:
        raise DescriptorError(f"unparsable spectrum descriptor {text!r}")
    name, body = m.group(1), m.group(2).strip()
    if name == "finite":
        entries = []
        for part in filter(None, (p.strip() for p in body.split(","))):
            value, _, mult = part.partition(":")
            entries.append((_parse_number(value), int(_parse_number(mult or "1"))))
        try:
            return FiniteFamily(tuple(entries))
        except DomainError as exc:
            raise DescriptorError(str(exc)) from None
    kwargs = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        key, eq, value = part.partition("=")
        key = key.strip()
        if not eq or key not in ("c", "k"):
            raise DescriptorError(f"unknown parameter {part!r} in {text!r}")
        kwargs[key] = _parse_number(value)
    if "c" not in kwargs:
        raise DescriptorError(f"missing shift c in {text!r}")
    c, k = kwargs["c"], kwargs.get("k", 1)
    if int(k) != k:
        raise DescriptorError(f"power k must be an integer in {text!r}")
    try:
        return CircleFamily(c, int(k), kernel_removed=(c == 0), folded=(name == "folded"))
    except DomainError as exc:
        raise DescriptorError(str(exc)) from None


def parse_descriptor(text: str):
    """Parse ``circle(c=2)`` or ``circle(c=2)⊗circle(c=2,k=2)``.

    The tensor symbol may be written as ``⊗``, ``x`` or ``*``.  ``circle(c=0)``
    always denotes the kernel-removed unshifted Laplacian.
    """
    pieces = _SPLIT_RE.split(text.strip())
    if len(pieces) == 1:
        return parse_family(pieces[0])
    if len(pieces) == 2:
        return ProductOperator(parse_family(pieces[0] + ")"), parse_family(pieces[1]))
    raise DescriptorError(f"only products of two factors are supported: {text!r}")


def as_product(obj) -> ProductOperator:
    if isinstance(obj, ProductOperator):
        return obj
    raise DescriptorError(f"expected a product descriptor, got {getattr(obj, 'descriptor', obj)!r}")


__all__ = [
    "CircleFamily",
    "FiniteFamily",
    "INT_LIMIT",
    "ProductOperator",
    "Spectrum1D",
    "circle_laplacian_spectrum",
    "parse_descriptor",
    "parse_family",
    "tensor_spectrum",
]
