"""Special functions, quadrature, differentiation and interpolation."""

from .interp import lagrange_interp
from .quadrature import (
    QuadratureRule,
    central_diff,
    gcq_rule,
    integrate_interval,
    integrate_semi_infinite,
)
from .special import (
    EULER_GAMMA,
    dawson,
    e1_complex,
    e1_real,
    e1_real_scaled,
    e1_scaled,
    kummer_1f1_one,
    ln_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
)

__all__ = [
    "EULER_GAMMA",
    "QuadratureRule",
    "central_diff",
    "dawson",
    "e1_complex",
    "e1_real",
    "e1_real_scaled",
    "e1_scaled",
    "gcq_rule",
    "integrate_interval",
    "integrate_semi_infinite",
    "kummer_1f1_one",
    "lagrange_interp",
    "ln_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
]
