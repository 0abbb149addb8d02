"""Instantaneous performance measures and direct averaging over a channel
model, by quadrature or by Monte-Carlo sampling."""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .channels import check_mean_snr, iter_sample_chunks, snr_pdf
from .errors import CapabilityError, DomainError
from .numerics.quadrature import integrate_semi_infinite
from .numerics.special import ln_gamma, reg_lower_gamma, reg_upper_gamma


def _check_modulation(a, b):
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"modulation parameters must be positive, got a={a!r}, b={b!r}")


@dataclass(frozen=True)
class Capacity:
    """Shannon capacity ln(1 + γ) in nats."""

    def evaluate(self, gamma):
        return np.log1p(gamma)

    def value_at_zero(self):
        return 0.0

    def derivative(self, r):
        return 1.0 / (1.0 + np.asarray(r, dtype=float))


@dataclass(frozen=True)
class WojnarBer:
    """Binary-modulation error probability Γ(b, aγ) / (2Γ(b)).

    a = 1/2 for orthogonal FSK, 1 for antipodal PSK; b = 1/2 for coherent,
    1 for non-coherent detection.
    """

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        _check_modulation(self.a, self.b)

    def evaluate(self, gamma):
        return 0.5 * reg_upper_gamma(self.b, self.a * np.asarray(gamma, dtype=float))

    def value_at_zero(self):
        return 0.5

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        ar = self.a * r
        with np.errstate(divide="ignore", over="ignore"):
            log_mag = math.log(self.a) + (self.b - 1.0) * np.log(ar) - ar - ln_gamma(self.b)
        return -0.5 * np.exp(log_mag)


@dataclass(frozen=True)
class Reliability:
    """Channel reliability 1 - 2 E(γ) of the Wojnar error probability."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        _check_modulation(self.a, self.b)

    def evaluate(self, gamma):
        return reg_lower_gamma(self.b, self.a * np.asarray(gamma, dtype=float))

    def value_at_zero(self):
        return 0.0

    def derivative(self, r):
        return -2.0 * WojnarBer(self.a, self.b).derivative(r)


@dataclass(frozen=True)
class OutageIndicator:
    """Step θ(γ_th - γ): 1 below threshold, 1/2 at it, 0 above."""

    gamma_th: float

    def __post_init__(self):
        if not (self.gamma_th > 0 and math.isfinite(self.gamma_th)):
            raise DomainError(f"outage threshold must be positive, got {self.gamma_th!r}")

    def evaluate(self, gamma):
        g = np.asarray(gamma, dtype=float)
        return np.where(g < self.gamma_th, 1.0, np.where(g == self.gamma_th, 0.5, 0.0))

    def value_at_zero(self):
        return 1.0

    def derivative(self, r):
        raise CapabilityError("the outage indicator has no pointwise derivative")


InstantMeasure = Union[Capacity, WojnarBer, Reliability, OutageIndicator]


def eval_instant(measure, gamma):
    """Instantaneous measure at SNR γ >= 0 (scalar or array)."""
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g >= 0)):
        raise DomainError("instantaneous SNR must be >= 0")
    out = np.asarray(measure.evaluate(g), dtype=float)
    return float(out) if out.ndim == 0 else out


def apm_quadrature(model, mean_snr, measure, tol=1e-10):
    """∫ H(r) f(r; γ̄) dr, computed in the unit-mean variable r = γ̄ y."""
    mean_snr = check_mean_snr(mean_snr)

    def integrand(y):
        out = np.zeros_like(y)
        pos = y > 0
        out[pos] = measure.evaluate(mean_snr * y[pos]) * snr_pdf(model, 1.0, y[pos])
        return out

    breaks = [1.0]
    if isinstance(measure, OutageIndicator):
        breaks.append(measure.gamma_th / mean_snr)
    return float(integrate_semi_infinite(integrand, tol=tol, breakpoints=breaks))


def _merge(stats, chunk):
    # Chan et al. pairwise combination of (count, mean, M2)
    n_a, mean_a, m2_a = stats
    n_b = chunk.size
    mean_b = float(np.mean(chunk))
    m2_b = float(np.sum((chunk - mean_b) ** 2))
    n = n_a + n_b
    delta = mean_b - mean_a
    mean = mean_a + delta * n_b / n
    m2 = m2_a + m2_b + delta * delta * n_a * n_b / n
    return n, mean, m2


def apm_monte_carlo(model, mean_snr, measure, samples, seed):
    """Sample mean and standard error of H(γ) over `samples` draws."""
    samples = int(samples)
    if samples < 2:
        raise DomainError("apm_monte_carlo needs at least 2 samples")
    stats = (0, 0.0, 0.0)
    for draws, _ in iter_sample_chunks(model, mean_snr, seed, samples):
        stats = _merge(stats, np.asarray(measure.evaluate(draws), dtype=float))
    n, mean, m2 = stats
    return mean, math.sqrt(m2 / (n - 1) / n)


def simulate_bit_errors(model, mean_snr, a, b, bits, seed):
    """Bit-level ABER simulation.

    Each bit sees an independent SNR draw and is in error with the
    conditional probability E(γ). Returns (error rate, binomial stderr).
    """
    bits = int(bits)
    if bits < 1:
        raise DomainError("bits must be >= 1")
    ber = WojnarBer(a, b)
    errors = 0
    for draws, rng in iter_sample_chunks(model, mean_snr, seed, bits):
        errors += int(np.count_nonzero(rng.random(draws.size) < ber.evaluate(draws)))
    return aber_from_counts(errors, bits)


def aber_from_counts(errors, bits):
    """Error fraction and its binomial standard error."""
    if bits < 1 or not 0 <= errors <= bits:
        raise DomainError("need 0 <= errors <= bits and bits >= 1")
    rate = errors / bits
    return rate, math.sqrt(rate * (1.0 - rate) / bits)
