"""Average-performance-measure curves and their Hurst windows."""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CapabilityError


@dataclass(frozen=True)
class HurstWindow:
    """Open interval (lower, upper) of Hurst exponents with a convergent spectrum."""

    lower: float
    upper: float

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("window bounds must not be NaN")

    @property
    def empty(self):
        return not self.lower < self.upper

    def contains(self, hurst):
        return self.lower < hurst < self.upper


UNBOUNDED = HurstWindow(-math.inf, math.inf)


def hurst_window_intersect(first, second):
    """Intersection of two windows, or None when it is empty."""
    out = HurstWindow(max(first.lower, second.lower), min(first.upper, second.upper))
    return None if out.empty else out


@dataclass(frozen=True)
class ApmCurve:
    """An average performance measure as a function of the average SNR.

    ``real_eval`` maps positive average SNR (scalar or array) to values.
    ``complex_eval`` is the analytic continuation, when known; on the
    negative real axis it is read as the limit from the upper half-plane.
    ``cut_imag`` optionally gives Im C(-x) for x > 0 directly, which is all
    the outage, density and averaging relations need.
    """

    real_eval: Callable
    complex_eval: Optional[Callable] = None
    hurst_window: HurstWindow = UNBOUNDED
    label: str = ""
    cut_imag: Optional[Callable] = None

    def __call__(self, mean_snr):
        out = self.real_eval(mean_snr)
        if np.ndim(mean_snr) == 0:
            return float(np.real_if_close(out))
        return np.asarray(out, dtype=float)

    @property
    def continuable(self):
        return self.complex_eval is not None or self.cut_imag is not None

    def at_complex(self, z):
        if self.complex_eval is None:
            raise CapabilityError(f"curve {self.label!r} has no complex continuation")
        return self.complex_eval(z)

    def imag_on_cut(self, x):
        """Im of the continuation at -x (x > 0), upper-limit convention."""
        if self.cut_imag is not None:
            return self.cut_imag(x)
        if self.complex_eval is None:
            raise CapabilityError(f"curve {self.label!r} has no complex continuation")
        xx = np.asarray(x, dtype=float)
        z = -xx + 0j
        out = np.imag(self.complex_eval(z if z.ndim else complex(z)))
        return float(out) if np.ndim(out) == 0 else out
