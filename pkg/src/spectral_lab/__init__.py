"""Spectral counting functions, zeta functions and Weyl coefficients of tensor-product operators."""

from .analysis import (
    RemainderStudy,
    estimate_coefficients,
    exponent_fit,
    remainder_series,
    shifted_divisor_count,
    table1,
    table2,
)
from .constants import ConstantResult, euler_gamma, gamma_c, gamma_c_partial, second_divisor_coefficient
from .counting import (
    CountingTable,
    IndexBase,
    brute_force_count,
    counting_function,
    divisor_sieve,
    divisor_summatory,
    shifted_pair_count,
)
from .errors import (
    BudgetError,
    ConvergenceError,
    CutoffError,
    DescriptorError,
    DomainError,
    EmptySpectrumError,
    NumericRangeError,
    SpectralLabError,
)
from .spectra import (
    CircleFamily,
    FiniteFamily,
    ProductOperator,
    Spectrum1D,
    circle_laplacian_spectrum,
    parse_descriptor,
    tensor_spectrum,
)
from .weyl import (
    WeylExpansion,
    aramaki_expansion,
    equal_order_coefficients,
    tr_theta_monomial,
    unequal_order_coefficient,
    weyl_coefficients,
    wodzicki_residue,
)
from .zeta import (
    LaurentData,
    closed_form_laurent,
    epstein_shifted,
    laurent_at_pole,
    product_zeta,
    riemann_zeta_real,
    spectral_zeta_direct,
    zeta_for,
)

__version__ = "0.1.0"
