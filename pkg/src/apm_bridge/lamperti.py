"""Lamperti transforms, the dilation spectrum, Hurst windows and the
kernel integral linking two performance measures."""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import UNBOUNDED, HurstWindow
from .errors import DomainError, ExistenceError, RangeError
from .numerics.quadrature import gcq_rule, integrate_semi_infinite

MAX_SPECTRAL_FREQUENCY = 10.0

# dilated arguments outside this range are treated as contributing nothing;
# inside the Hurst window the weight there is exponentially small
_LOG_ARG_LIMIT = 690.0

# Hurst windows of the standard measures
ACC_WINDOW = HurstWindow(0.0, 1.0)
OUTAGE_COMPLEMENT_WINDOW = HurstWindow(0.0, math.inf)


def reliability_window(b):
    return HurstWindow(0.0, float(b))


def lamperti_inverse(apm, hurst, mean_snr, lam):
    """e^{Hλ} X(e^{-λ} γ̄): maps a dilation-covariant curve to a stationary one."""
    if not mean_snr > 0:
        raise DomainError("average SNR must be positive")
    log_arg = math.log(mean_snr) - lam
    arg = math.exp(log_arg) if abs(log_arg) < _LOG_ARG_LIMIT else 0.0
    if not (arg > 0 and math.isfinite(arg)):
        raise DomainError(f"dilated average SNR {arg!r} is outside the curve's domain")
    return math.exp(hurst * lam) * apm(arg)


def lamperti_direct(process, hurst, mean_snr):
    """γ̄^H Y(-ln γ̄): recovers X from its stationary image Y(λ)."""
    if not mean_snr > 0:
        raise DomainError("average SNR must be positive")
    return mean_snr ** hurst * process(-math.log(mean_snr))


def dilate(apm, hurst, mean_snr, lam):
    """λ^H X(λ γ̄)."""
    if not lam > 0:
        raise DomainError(f"dilation factor must be positive, got {lam!r}")
    return lam ** hurst * apm(lam * mean_snr)


def _half_line(apm, hurst, omega, mean_snr, sign, part, tol):
    log_mean = math.log(mean_snr)

    def integrand(t):
        lam = sign * np.asarray(t, dtype=float)
        log_arg = log_mean - lam
        ok = np.abs(log_arg) < _LOG_ARG_LIMIT
        out = np.zeros_like(lam)
        if np.any(ok):
            values = np.asarray(apm(np.exp(log_arg[ok])), dtype=float)
            phase = omega * lam[ok]
            osc = np.cos(phase) if part == "re" else np.sin(phase)
            out[ok] = np.exp(hurst * lam[ok]) * osc * values
        return out

    return integrate_semi_infinite(integrand, tol=tol)


def _half_line_rotated(apm, hurst, omega, mean_snr, rotation, sign, part, tol):
    # λ = t + iθ: the curve is sampled on the ray of phase -θ
    log_mean = math.log(mean_snr)
    spin = complex(math.cos(rotation), -math.sin(rotation))

    def integrand(t):
        lam = sign * np.asarray(t, dtype=float)
        log_arg = log_mean - lam
        ok = np.abs(log_arg) < _LOG_ARG_LIMIT
        out = np.zeros_like(lam)
        if np.any(ok):
            values = np.asarray(apm.complex_eval(np.exp(log_arg[ok]) * spin), dtype=complex)
            terms = np.exp((hurst + 1j * omega) * lam[ok]) * values
            out[ok] = terms.real if part == "re" else terms.imag
        return out

    return integrate_semi_infinite(integrand, tol=tol)


def lds_numeric(apm, hurst, omega, mean_snr, tol=1e-10):
    """Lamperti dilation spectrum ∫ e^{(H+iω)λ} X(e^{-λ} γ̄) dλ over the real line.

    Equals γ̄^{H+iω} ∫₀^∞ β^{-H-1-iω} X(β) dβ. The integral is split at
    λ = 0 into two half-line integrals, each with separate real and
    imaginary parts.

    For ω ≠ 0 the spectrum decays like e^{-π|ω|} while the integrand does
    not, so the real-line integral cancels to roundoff. When the curve has
    an analytic continuation the contour is shifted to Im λ = 0.97π sign(ω),
    which removes the cancellation; otherwise the real line is used.
    """
    if abs(omega) > MAX_SPECTRAL_FREQUENCY:
        raise RangeError(f"|omega| > {MAX_SPECTRAL_FREQUENCY} is not supported")
    window = getattr(apm, "hurst_window", UNBOUNDED)
    if not window.contains(hurst):
        raise ExistenceError(f"H={hurst} lies outside the Hurst window ({window.lower}, {window.upper})")
    if not mean_snr > 0:
        raise DomainError("average SNR must be positive")
    if omega != 0 and getattr(apm, "complex_eval", None) is not None:
        theta = 0.97 * math.pi * math.copysign(1.0, omega)
        parts = [
            sum(_half_line_rotated(apm, hurst, omega, mean_snr, theta, s, part, tol) for s in (1.0, -1.0))
            for part in ("re", "im")
        ]
        return complex(*parts) * np.exp(1j * (hurst + 1j * omega) * theta)
    re = sum(_half_line(apm, hurst, omega, mean_snr, s, "re", tol) for s in (1.0, -1.0))
    im = sum(_half_line(apm, hurst, omega, mean_snr, s, "im", tol) for s in (1.0, -1.0))
    return complex(re, im)


@dataclass(frozen=True)
class Kernel:
    """Weight Z(u) on u > 0 with H_avg(γ̄) = ∫ Z(u) G_avg(u γ̄) du."""

    func: Callable
    tag: str = ""
    window: HurstWindow = UNBOUNDED

    def __call__(self, u):
        return self.func(u)


def apply_kernel(kernel, curve, mean_snr, tol=1e-10):
    """Adaptive evaluation of ∫₀^∞ Z(u) G(u γ̄) du."""
    if not mean_snr > 0:
        raise DomainError("average SNR must be positive")

    def integrand(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = np.asarray(kernel(u[pos])) * np.asarray(curve(mean_snr * u[pos]))
        return out

    return float(integrate_semi_infinite(integrand, tol=tol, breakpoints=(1.0 / mean_snr, 1.0)))


def apply_kernel_gcq(kernel, curve, mean_snr, order):
    """Σ w_n Z(λ_n) G(λ_n γ̄) with the tangent-mapped Chebyshev rule."""
    rule = gcq_rule(order)
    values = np.asarray(kernel(rule.nodes)) * np.asarray(curve(mean_snr * rule.nodes))
    return float(np.sum(rule.weights * values))
