"""Euler-Mascheroni constant and its shifted generalization gamma_c.

    gamma   = lim_T  sum_{i=1}^{T} 1/i             - log T
    gamma_c = lim_T  sum_{i=0}^{T} (c + i^2)^(-1/2) - log T

gamma_c comes from the accelerated identity

    gamma_c = gamma + c^(-1/2) + sum_{i>=1} [(c + i^2)^(-1/2) - 1/i]

whose terms are O(c / i^3), or from its exponentially convergent Poisson form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._special import bessel_k
from .errors import DomainError

PRECISION_FLOOR = 1e-14

# B_2, B_4, ..., B_16
_BERNOULLI_EVEN = (
    1 / 6,
    -1 / 30,
    1 / 42,
    -1 / 30,
    5 / 66,
    -691 / 2730,
    7 / 6,
    -3617 / 510,
)


@dataclass(frozen=True)
class ConstantResult:
    value: float
    error_bound: float
    terms_used: int


def harmonic_minus_log(tau: float) -> float:
    """sum_{i=1}^{[tau]} 1/i - log(tau): the raw defining sequence of gamma."""
    n = int(math.floor(tau))
    return math.fsum(1.0 / i for i in range(1, n + 1)) - math.log(tau)


def euler_gamma(tol: float = 1e-14) -> ConstantResult:
    """gamma from Euler-Maclaurin corrected harmonic sums.

    H_n - log n - 1/(2n) + sum_k B_2k / (2k n^2k) converges to gamma with an
    error below the first omitted term (alternating, decreasing for n >= 2).
    """
    if not tol >= PRECISION_FLOOR:
        raise DomainError(f"tol={tol} is below the double-precision floor {PRECISION_FLOOR}", module="constants")
    for n in range(2, 10_000):
        terms = [b / (2 * (k + 1) * n ** (2 * (k + 1))) for k, b in enumerate(_BERNOULLI_EVEN)]
        used = len(terms) - 1
        bound = abs(terms[-1])
        if bound <= tol / 2:
            break
    harmonic = math.fsum(1.0 / i for i in range(1, n + 1))
    value = math.fsum([harmonic, -math.log(n), -1.0 / (2 * n), *terms[:used]])
    return ConstantResult(value, bound + 4e-16 * n, n)


def _shift_terms(c, i):
    # (c + i^2)^(-1/2) - 1/i without cancellation
    root = np.sqrt(c + i * i)
    return -c / (i * root * (i + root))


def gamma_c(c: float, tol: float = 1e-12, method: str = "series") -> ConstantResult:
    """gamma_c within ``tol``.

    ``method="series"`` sums the accelerated identity up to T = ceil(sqrt(c / (2 tol))).
    Since |(c + i^2)^(-1/2) - 1/i| <= c / (2 i^3) the tail is at most c / (4 T^2).
    The cost grows like sqrt(c / tol).

    ``method="poisson"`` applies Poisson summation to sum_i (c + i^2)^(-1/2):

        gamma_c = log(2 / sqrt(c)) + 1 / (2 sqrt(c)) + 2 sum_{n>=1} K_0(2 pi n sqrt(c)).

    Its terms decay like exp(-2 pi n sqrt(c)).  Since K_0(x + a) <= e^(-a) K_0(x), the tail
    after N terms is below 2 K_0(2 pi (N+1) sqrt(c)) / (1 - e^(-2 pi sqrt(c))).
    """
    _check(c, tol)
    if method == "series":
        return _gamma_c_series(c, tol)
    if method == "poisson":
        return _gamma_c_poisson(c, tol)
    raise DomainError(f"unknown method {method!r}", module="constants")


def _gamma_c_series(c, tol):
    g = euler_gamma(max(tol / 4, PRECISION_FLOOR))
    T = max(1, math.ceil(math.sqrt(c / (2.0 * tol))))
    i = np.arange(1, T + 1, dtype=np.float64)
    terms = _shift_terms(c, i)
    last = abs(float(terms[-1]))
    assert last <= c / (2.0 * T**3) * (1 + 1e-12), "tail bound violated"
    tail = c / (4.0 * T * T)
    s = float(np.sum(terms[::-1]))
    value = g.value + c**-0.5 + s
    # pairwise summation: relative error grows like log2(T)
    rounding = 2.3e-16 * (abs(s) * (math.log2(T) + 2) + abs(value) + c**-0.5)
    return ConstantResult(value, g.error_bound + tail + rounding, T)


def _gamma_c_poisson(c, tol):
    x = 2.0 * math.pi * math.sqrt(c)
    q = 1.0 - math.exp(-x)
    N = 0
    while True:
        tail = 2.0 * bessel_k(0, (N + 1) * x) / q
        if tail <= tol / 4 or tail < 1e-300:
            break
        N += 1
    ks = bessel_k(0, x * np.arange(1, N + 1, dtype=np.float64)) if N else np.zeros(0)
    s = 2.0 * float(np.sum(ks[::-1]))
    value = math.fsum([math.log(2.0) - 0.5 * math.log(c), 0.5 / math.sqrt(c), s])
    # quadrature relative accuracy of bessel_k is about 4e-16
    rounding = 4e-16 * (abs(value) + abs(s) + 0.5 / math.sqrt(c) + abs(math.log(c)) + 1.0)
    return ConstantResult(value, tail + rounding, max(N, 1))


def _check(c, tol):
    if not c > 0:
        raise DomainError(f"gamma_c needs c > 0, got {c} (the constant diverges as c -> 0)", module="constants")
    if not tol >= PRECISION_FLOOR:
        raise DomainError(f"tol={tol} is below the double-precision floor {PRECISION_FLOOR}", module="constants")


def gamma_c_partial(c: float, tau: float) -> float:
    """sum_{i=0}^{[tau]} (c + i^2)^(-1/2) - log(tau): the raw defining sequence.

    Converges to gamma_c like 1/(2 tau); at tau = 1000 it sits about 5e-4
    above the limit.
    """
    if not c > 0:
        raise DomainError(f"gamma_c needs c > 0, got {c}", module="constants")
    n = int(math.floor(tau))
    i = np.arange(0, n + 1, dtype=np.float64)
    return math.fsum((c + i * i) ** -0.5) - math.log(tau)


def second_divisor_coefficient(c: float, tol: float = 1e-12, method: str = "series") -> float:
    """2 gamma_c - 1, the coefficient of lam in D_c(lam) ~ lam log lam + (2 gamma_c - 1) lam."""
    return 2.0 * gamma_c(c, tol, method).value - 1.0
