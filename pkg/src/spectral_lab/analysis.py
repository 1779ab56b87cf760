"""Coefficient estimates for D_c and growth of the divisor remainder."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import euler_gamma, gamma_c, gamma_c_partial, second_divisor_coefficient
from .counting import IndexBase, divisor_summatory, fmt, shifted_pair_count
from .errors import DomainError

HARDY = 0.25
HUXLEY = 131 / 416
MIN_FIT_SAMPLES = 20
MIN_FIT_DECADES = 3.0


def shifted_divisor_count(c, lam, index_base=IndexBase.FROM_ZERO) -> int:
    """D_c(lam) = #{(n, m) : sqrt((n^2 + c)(m^2 + c)) <= lam} = N(A_c; lam^2) / 4."""
    lam2 = lam * lam
    if isinstance(lam, (int, np.integer)) or float(lam).is_integer():
        lam2 = int(lam) ** 2
    return shifted_pair_count(c, lam2, index_base)


def estimate_coefficients(c, lam, index_base=IndexBase.FROM_ZERO) -> Tuple[float, float]:
    """(first_est, second_est) for D_c at a single lam.

    first_est = D_c / (lam log lam) estimates the leading coefficient 1;
    second_est = (D_c - lam log lam) / lam estimates 2 gamma_c - 1.
    """
    if not lam >= 1e3:
        raise DomainError(f"estimates need lambda >= 1e3, got {lam}", module="analysis")
    d = shifted_divisor_count(c, lam, index_base)
    lg = math.log(lam)
    return d / (lam * lg), (d - lam * lg) / lam


@dataclass
class RemainderStudy:
    samples: List[Tuple[float, float]] = field(default_factory=list)
    fitted_exponent: Optional[float] = None
    fit_rsquared: Optional[float] = None
    references: Dict[str, float] = field(default_factory=lambda: {"hardy": HARDY, "huxley": HUXLEY})
    c: Optional[float] = None

    HEADER = ("lambda", "delta")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.HEADER)
        for lam, d in self.samples:
            w.writerow([fmt(lam), fmt(d)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RemainderStudy":
        reader = csv.reader(io.StringIO(text))
        if tuple(next(reader)) != cls.HEADER:
            raise DomainError("unexpected remainder header", module="analysis")
        return cls(samples=[(float(a), float(b)) for a, b in reader])

    def to_dict(self):
        return {
            "c": self.c,
            "samples": [list(s) for s in self.samples],
            "fitted_exponent": self.fitted_exponent,
            "fit_rsquared": self.fit_rsquared,
            "references": self.references,
        }


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def remainder_series(grid: Sequence[float], c: Optional[float] = None, threads: int = 1) -> RemainderStudy:
    """Delta(lam) = D(lam) - lam log lam - (2 g - 1) lam on ``grid``.

    With ``c`` the shifted count D_c and g = gamma_c replace D and gamma.
    """
    grid = [float(x) for x in grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("lambda grid must be sorted ascending", module="analysis")
    if c is None:
        g = euler_gamma().value
        count = divisor_summatory
    else:
        g = gamma_c(c, method="poisson").value
        count = lambda lam: shifted_divisor_count(c, lam)  # noqa: E731
    a = 2.0 * g - 1.0

    def delta(lam):
        lg = math.log(lam) if lam > 0 else 0.0
        return lam, count(lam) - lam * lg - a * lam

    return RemainderStudy(samples=_map(delta, grid, threads), c=c)


def log_grid(lo: float, hi: float, points: int) -> List[float]:
    """Log-uniform integer grid, strictly increasing where the integers allow."""
    if not 1 <= lo < hi or points < 2:
        raise DomainError(f"bad grid [{lo}, {hi}] with {points} points", module="analysis")
    xs = np.unique(np.rint(np.geomspace(lo, hi, points)))
    return [float(x) for x in xs]


def exponent_fit(study: RemainderStudy) -> float:
    """Slope of log(running max |Delta|) against log(lam); stored on ``study``."""
    lam = np.array([s[0] for s in study.samples], dtype=np.float64)
    delta = np.array([s[1] for s in study.samples], dtype=np.float64)
    if lam.size < MIN_FIT_SAMPLES:
        raise DomainError(f"need >= {MIN_FIT_SAMPLES} samples, got {lam.size}", module="analysis")
    if not np.all(lam > 0) or math.log10(lam.max() / lam.min()) < MIN_FIT_DECADES:
        raise DomainError(f"samples must span >= {MIN_FIT_DECADES:g} decades", module="analysis")
    order = np.argsort(lam, kind="stable")
    lam, delta = lam[order], delta[order]
    run = np.maximum.accumulate(np.abs(delta))
    # leading exact zeros carry no growth information
    keep = run > 0
    if keep.sum() < MIN_FIT_SAMPLES:
        raise DomainError("running max of |Delta| vanishes on too many samples", module="analysis")
    x, y = np.log(lam[keep]), np.log(run[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    study.fitted_exponent = float(slope)
    study.fit_rsquared = r2
    return float(slope)


# -- coefficient tables -------------------------------------------------------

@dataclass
class CoefficientTable:
    """Rows ``c, estimate, closed_form, error`` plus optional from-one columns."""

    rows: List[Tuple] = field(default_factory=list)
    both_conventions: bool = False

    def header(self):
        h = ["c", "estimate", "closed_form", "error"]
        if self.both_conventions:
            h += ["estimate_from_one", "error_from_one"]
        return h

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoefficientTable":
        reader = csv.reader(io.StringIO(text))
        head = next(reader)
        if head[:4] != ["c", "estimate", "closed_form", "error"]:
            raise DomainError(f"unexpected header {head}", module="analysis")
        rows = []
        for r in reader:
            vals = [float(v) for v in r]
            vals[0] = int(vals[0]) if vals[0].is_integer() else vals[0]
            rows.append(tuple(vals))
        return cls(rows, len(head) > 4)

    def to_dict(self):
        return {"columns": self.header(), "rows": [list(r) for r in self.rows]}


def _table(which, lam, cs, both, closed_form_tau, threads):
    def row(c):
        if which == 1:
            target = 1.0
        elif closed_form_tau is None:
            target = second_divisor_coefficient(c, method="poisson")
        else:
            target = 2.0 * gamma_c_partial(c, closed_form_tau) - 1.0
        est = estimate_coefficients(c, lam)[which - 1]
        out = (c, est, target, abs(est - target))
        if both:
            est1 = estimate_coefficients(c, lam, IndexBase.FROM_ONE)[which - 1]
            out += (est1, abs(est1 - target))
        return out

    return CoefficientTable(_map(row, list(cs), threads), both)


def table1(lam=1e7, cs=range(2, 21), both_conventions=False, threads=1) -> CoefficientTable:
    """First-term estimates against the constant leading coefficient 1."""
    return _table(1, lam, cs, both_conventions, None, threads)


def table2(lam=1e7, cs=range(2, 21), both_conventions=False, closed_form_tau=None, threads=1) -> CoefficientTable:
    """Second-term estimates against 2 gamma_c - 1.

    ``closed_form_tau`` replaces the limit gamma_c by the raw partial sum
    truncated at that index, for comparing against truncated reference values.
    """
    return _table(2, lam, cs, both_conventions, closed_form_tau, threads)
