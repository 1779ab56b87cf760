"""From pole data to counting-function asymptotics.

A pole of zeta(s) at s = z0 with principal part A2/(s-z0)^2 + A1/(s-z0)
translates into

    N(lam) ~ A1 lam^z0 / z0 + A2 d/ds(lam^s / s)|_{s=z0}
           = (A2/z0) lam^z0 log lam + (A1/z0 - A2/z0^2) lam^z0.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .constants import gamma_c
from .errors import DomainError
from .spectra import ProductOperator
from .zeta import LaurentData, closed_form_laurent, laurent_at_pole, zeta_for


@dataclass(frozen=True)
class WeylExpansion:
    """N(lam) ~ coeff_log * lam^z0 * log(lam) + coeff_plain * lam^z0."""

    z0: float
    coeff_log: float
    coeff_plain: float
    remainder_exponent_hint: Optional[float] = None
    method: str = "aramaki"

    def __call__(self, lam):
        p = lam**self.z0
        return self.coeff_log * p * math.log(lam) + self.coeff_plain * p

    def to_dict(self):
        return asdict(self)


def aramaki_expansion(ld: LaurentData, z0: Optional[float] = None) -> WeylExpansion:
    """Exact algebra from Laurent data at the first pole to Weyl coefficients."""
    z0 = ld.z0 if z0 is None else z0
    if abs(ld.z0 - z0) > 1e-12 * max(1.0, abs(z0)):
        raise DomainError(f"Laurent data sits at {ld.z0}, not at z0={z0}", module="weyl")
    if not z0 > 0:
        raise DomainError(f"z0 must be positive, got {z0}", module="weyl")
    if ld.order == 1:
        return WeylExpansion(z0, 0.0, ld.A1 / z0)
    if ld.order == 2:
        return WeylExpansion(z0, ld.A2 / z0, ld.A1 / z0 - ld.A2 / z0**2)
    raise DomainError(f"pole order {ld.order} unsupported", module="weyl")


def equal_order_coefficients(c: float, folded: bool = True, tol: float = 1e-12):
    """(C1, C1') for (-Delta + c) (x) (-Delta + c) on the two-torus.

    ``folded=True`` is the multiplicity-four bookkeeping on pairs of naturals,
    whose count is exactly 4 D_c: C1' = 8 gamma_c - 4.  The true lattice
    multiplicities (j = 0 simple) lose the boundary rows and give
    C1' = 8 gamma_c - 4 - 4/sqrt(c).
    """
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}", module="weyl")
    g = gamma_c(c, tol, method="poisson").value
    c1p = 8.0 * g - 4.0
    if not folded:
        c1p -= 4.0 / math.sqrt(c)
    return 2.0, c1p


def unequal_order_coefficient(op: ProductOperator) -> float:
    """Coefficient C of lam^z0 in N(lam) when the growth ratios differ.

    C = W * zeta_slow(z0), with W the leading Weyl coefficient of the faster
    factor and zeta_slow the partner's spectral zeta at the dominant exponent.
    """
    r1, r2 = op.ratios
    if r1 == r2:
        raise DomainError("equal growth ratios: use equal_order_coefficients", module="weyl")
    fast, slow = (op.factor1, op.factor2) if r1 > r2 else (op.factor2, op.factor1)
    z0 = fast.ratio
    return fast.weyl_coefficient * zeta_for(slow)(z0)


def sphere_volume(n: int) -> float:
    """Surface measure of the unit sphere S^(n-1) in R^n (S^0 counts two points)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def tr_theta_monomial(kappa, l, m1, m2, n1, n2, vol_M) -> float:
    """Angular trace term for a principal symbol kappa |xi1|^m1 |xi2|^m2.

    The angular integrand a^(-l) log a is constant on the unit spheres, so the
    integral reduces to sphere volumes.
    """
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}", module="weyl")
    num = vol_M * sphere_volume(n1) * sphere_volume(n2) * kappa**-l * math.log(kappa)
    return num / ((2 * math.pi) ** (n1 + n2) * m1 * m2)


def wodzicki_residue(ld: LaurentData, m1: float, m2: float) -> float:
    """m1 * m2 times the double-pole coefficient."""
    if ld.order != 2:
        raise DomainError("the bisingular residue needs a double pole", module="weyl")
    return m1 * m2 * ld.A2


def laurent_data(op: ProductOperator, method: str = "closed-form") -> LaurentData:
    if method == "closed-form":
        return closed_form_laurent(op)
    if method == "numeric":
        return laurent_at_pole(zeta_for(op), op.z0, op.pole_order)
    raise DomainError(f"unknown method {method!r}", module="weyl")


def weyl_coefficients(op: ProductOperator, method: str = "closed-form") -> WeylExpansion:
    """Leading counting-function terms of a product operator."""
    ld = laurent_data(op, method)
    w = aramaki_expansion(ld, op.z0)
    return WeylExpansion(w.z0, w.coeff_log, w.coeff_plain, None, method)
