"""Conversions between average performance measures.

* ACC from ABER through the reliability kernel Z_{a,b}(u) = ₁F₁(1; b; -au)/u.
* Outage probability, outage capacity and the SNR density from the
  analytic continuation of the ACC onto the negative real axis.
* Any smooth APM from the ACC by integrating the measure's derivative
  against Im C(-γ̄/r).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channels import (
    Nakagami,
    Rayleigh,
    acc_closed_rayleigh,
    acc_imag_neg_nakagami,
    aber_closed_nakagami_wojnar,
    aber_gnm_wojnar,
    aber_closed_rayleigh_wojnar,
    check_mean_snr,
    snr_cdf,
    snr_pdf,
)
from .curves import ApmCurve, HurstWindow, hurst_window_intersect
from .errors import CapabilityError, DomainError, RangeError, UnsupportedVariantError
from .lamperti import ACC_WINDOW, Kernel, apply_kernel, reliability_window
from .measures import Capacity, OutageIndicator, apm_quadrature
from .numerics.quadrature import central_diff, integrate_semi_infinite
from .numerics.special import e1_real_scaled, kummer_1f1_one, reg_upper_gamma

DEFAULT_EPS = 1e-4
_STANDARD_VALUES = (0.5, 1.0)


class NonStandardModulationWarning(UserWarning):
    pass


class BranchConsistencyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ModulationParams:
    """Wojnar parameters: a (1/2 FSK, 1 PSK) and b (1/2 coherent, 1 non-coherent)."""

    a: float = 1.0
    b: float = 0.5

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"modulation parameters must be positive, got a={self.a!r}, b={self.b!r}")
        if not self.standard:
            warnings.warn(
                f"non-standard modulation parameters a={self.a}, b={self.b}",
                NonStandardModulationWarning,
                stacklevel=3,
            )

    @property
    def standard(self):
        return self.a in _STANDARD_VALUES and self.b in _STANDARD_VALUES


# ---------------------------------------------------------------- curves

def rayleigh_acc_curve():
    """Closed-form Rayleigh ACC with its exact continuation."""
    return ApmCurve(
        real_eval=lambda g: e1_real_scaled(1.0 / np.asarray(g, dtype=float)),
        complex_eval=acc_closed_rayleigh,
        hurst_window=ACC_WINDOW,
        label="acc:rayleigh",
        cut_imag=lambda x: math.pi * np.exp(-1.0 / np.asarray(x, dtype=float)),
    )


def _unit_pdf(model):
    return lambda t: snr_pdf(model, 1.0, t)


def _acc_continuation(model, z, tol=1e-10):
    """∫ ln(1 + z t) p(t) dt over the unit-mean SNR density p.

    For z = -x on the cut the imaginary part is π P(t > 1/x) and the real
    part the principal value of ∫ ln|1 - x t| p(t) dt.
    """
    pdf = _unit_pdf(model)
    z = complex(z)
    if z.imag == 0 and z.real < 0:
        x = -z.real

        def real_part(t):
            out = np.zeros_like(t)
            pos = t > 0
            with np.errstate(divide="ignore"):
                out[pos] = np.log(np.abs(1.0 - x * t[pos])) * pdf(t[pos])
            out[~np.isfinite(out)] = 0.0
            return out

        re = integrate_semi_infinite(real_part, tol=tol, breakpoints=(1.0 / x, 1.0))
        im = math.pi * (1.0 - snr_cdf(model, 1.0, 1.0 / x))
        return complex(re, im)
    if z == 0:
        return 0j

    def integrand(t):
        out = np.zeros(t.shape, dtype=complex)
        pos = t > 0
        out[pos] = np.log(1.0 + z * t[pos]) * pdf(t[pos])
        return out

    return complex(integrate_semi_infinite(integrand, tol=tol, breakpoints=(1.0,)))


def acc_curve(model):
    """ACC of a fading model, with its continuation to complex arguments."""
    if isinstance(model, Rayleigh):
        return rayleigh_acc_curve()
    if len(model.factors) != 1:
        raise UnsupportedVariantError("ACC continuation needs an SNR density; the cascaded model has none")

    def real_eval(g):
        g = np.asarray(g, dtype=float)
        out = np.array([apm_quadrature(model, gi, Capacity()) for gi in g.ravel()])
        return out.reshape(g.shape)

    def complex_eval(z):
        zz = np.asarray(z, dtype=complex)
        out = np.array([_acc_continuation(model, zi) for zi in zz.ravel()]).reshape(zz.shape)
        return complex(out) if zz.ndim == 0 else out

    if isinstance(model, Nakagami):
        def cut_imag(x):
            x = np.asarray(x, dtype=float)
            if x.ndim == 0:
                return acc_imag_neg_nakagami(float(x), model.m)
            return math.pi * np.asarray(reg_upper_gamma(model.m, model.m / x))
    else:
        def cut_imag(x):
            x = np.asarray(x, dtype=float)
            out = math.pi * (1.0 - np.asarray(snr_cdf(model, 1.0, 1.0 / x)))
            return float(out) if out.ndim == 0 else out

    return ApmCurve(real_eval, complex_eval, ACC_WINDOW, f"acc:{model!r}", cut_imag)


def aber_curve(model, params):
    """ABER of a fading model: closed forms for Rayleigh and Nakagami, a
    geometrically convergent trapezoid rule for GNM."""
    params = _as_params(params)
    window = reliability_window(params.b)
    if isinstance(model, Rayleigh):
        return ApmCurve(
            lambda g: aber_closed_rayleigh_wojnar(g, params.a, params.b),
            hurst_window=window,
            label=f"aber:rayleigh:a={params.a}:b={params.b}",
        )
    if isinstance(model, Nakagami):
        return ApmCurve(
            lambda g: aber_closed_nakagami_wojnar(g, model.m, params.a, params.b),
            hurst_window=window,
            label=f"aber:{model!r}:a={params.a}:b={params.b}",
        )
    if len(model.factors) != 1:
        raise UnsupportedVariantError("model ABER needs an SNR density; the cascaded model has none")
    m, xi = model.factors[0]
    return ApmCurve(
        lambda g: aber_gnm_wojnar(g, m, xi, params.a, params.b),
        hurst_window=window,
        label=f"aber:{model!r}:a={params.a}:b={params.b}",
    )


def _as_params(params):
    if isinstance(params, ModulationParams):
        return params
    a, b = params
    return ModulationParams(a, b)


# ---------------------------------------------------------------- ABER → ACC

def kernel_acc_from_reliability(params):
    """Kernel Z_{a,b}(u) = ₁F₁(1; b; -a u)/u mapping channel reliability to ACC."""
    params = _as_params(params)
    a, b = params.a, params.b

    def func(u):
        u = np.asarray(u, dtype=float)
        if np.any(~(u > 0)):
            raise DomainError("kernel is defined for u > 0 only")
        return np.asarray(kummer_1f1_one(b, a * u)) / u

    window = hurst_window_intersect(ACC_WINDOW, reliability_window(b)) or HurstWindow(0.0, 0.0)
    return Kernel(func, tag=f"acc_from_reliability(a={a}, b={b})", window=window)


def acc_from_aber(aber, params, mean_snr, tol=1e-8):
    """ACC (nats) from an ABER curve: ∫ Z_{a,b}(u) {1 - 2 E_avg(u γ̄)} du."""
    params = _as_params(params)
    mean_snr = check_mean_snr(mean_snr)
    kernel = kernel_acc_from_reliability(params)

    def reliability(g):
        values = np.asarray(aber(g), dtype=float)
        if np.any(~((values >= 0.0) & (values <= 0.5))):
            bad = values[~((values >= 0.0) & (values <= 0.5))][0]
            raise RangeError(f"ABER value {bad!r} is outside [0, 1/2]")
        return 1.0 - 2.0 * values

    return apply_kernel(kernel, reliability, mean_snr, tol=tol)


# ---------------------------------------------------------------- ACC → OP/OC/PDF

def _require_continuation(acc):
    if not getattr(acc, "continuable", False):
        raise CapabilityError("the ACC curve has no complex continuation")


def op_from_acc(acc, mean_snr, gamma_th, eps=DEFAULT_EPS):
    """Outage probability 1 - Im{C(-γ̄/γ_th)}/π.

    The continuation is evaluated at e^{ε+iπ} γ̄/γ_th, i.e. on the negative
    real axis at modulus e^ε γ̄/γ_th, as the upper half-plane limit.
    """
    _require_continuation(acc)
    mean_snr = check_mean_snr(mean_snr)
    if not (gamma_th > 0 and math.isfinite(gamma_th)):
        raise DomainError(f"outage threshold must be positive, got {gamma_th!r}")
    if not eps >= 0:
        raise DomainError("eps must be non-negative")
    x = math.exp(eps) * mean_snr / gamma_th
    p_out = 1.0 - float(acc.imag_on_cut(x)) / math.pi
    clamped = min(1.0, max(0.0, p_out))
    if abs(clamped - p_out) > 1e-6:
        warnings.warn(
            f"outage probability {p_out!r} outside [0, 1]; branch of the continuation looks inconsistent",
            BranchConsistencyWarning,
            stacklevel=2,
        )
    return clamped


def oc_from_acc(acc, mean_snr, c_th, eps=DEFAULT_EPS):
    """Outage capacity: the outage probability at γ_th = e^{C_th} - 1 (C_th in nats)."""
    if not (c_th > 0 and math.isfinite(c_th)):
        raise DomainError(f"capacity threshold must be positive, got {c_th!r}")
    return op_from_acc(acc, mean_snr, math.expm1(c_th), eps)


def default_step(r):
    return np.maximum(1e-6, 1e-4 * np.asarray(r, dtype=float))


def pdf_from_acc(acc, mean_snr, r, step=None):
    """SNR density -(1/π) ∂/∂r Im{C(-γ̄/r)} by central differences.

    Evaluated exactly on the cut. Small negative results are clamped to 0;
    below -1e-6 a warning is issued.
    """
    _require_continuation(acc)
    mean_snr = check_mean_snr(mean_snr)
    rr = np.asarray(r, dtype=float)
    if np.any(~(rr > 0)):
        raise DomainError("pdf_from_acc requires r > 0")
    h = default_step(rr) if step is None else np.broadcast_to(np.asarray(step, dtype=float), rr.shape)

    def imag(v):
        return np.asarray(acc.imag_on_cut(mean_snr / v), dtype=float)

    dens = -np.asarray(central_diff(imag, rr, h)) / math.pi
    if np.any(dens < -1e-6):
        warnings.warn("recovered density is negative beyond -1e-6", BranchConsistencyWarning, stacklevel=2)
    dens = np.maximum(dens, 0.0)
    return float(dens) if dens.ndim == 0 else dens


# ---------------------------------------------------------------- ACC → any APM

def apm_from_acc(acc, measure, mean_snr, tol=1e-8, eps=DEFAULT_EPS):
    """H_avg(γ̄) = H(0) + (1/π) ∫₀^∞ H'(r) Im{C(-γ̄/r)} dr.

    The outage indicator has no pointwise derivative; it is routed to
    :func:`op_from_acc` with offset ``eps``. Smooth measures use the cut
    value itself.
    """
    _require_continuation(acc)
    mean_snr = check_mean_snr(mean_snr)
    if isinstance(measure, OutageIndicator):
        return op_from_acc(acc, mean_snr, measure.gamma_th, eps)
    if not hasattr(measure, "derivative") or not hasattr(measure, "value_at_zero"):
        raise CapabilityError("measure must provide value_at_zero() and derivative(r)")

    # r = γ̄ y keeps the integrand centred on y = 1
    def integrand(y):
        out = np.zeros_like(y)
        pos = y > 0
        yp = y[pos]
        out[pos] = np.asarray(measure.derivative(mean_snr * yp)) * np.asarray(acc.imag_on_cut(1.0 / yp))
        return out

    integral = integrate_semi_infinite(integrand, tol=tol, breakpoints=(1.0,))
    return float(measure.value_at_zero() + mean_snr * integral / math.pi)
