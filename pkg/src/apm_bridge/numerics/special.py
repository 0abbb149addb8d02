"""Special functions: log-gamma, regularized incomplete gamma, Dawson's
integral, the exponential integral on real and complex arguments, and
Kummer's function 1F1(1; b; -x).

All functions accept scalars or numpy arrays and return a Python scalar
for scalar input.
"""

import math

import numpy as np
from scipy import special as _sp

from ..errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_SQRT_PI = math.sqrt(math.pi)
_TINY = 1e-300


def _wrap(x, out):
    if np.ndim(x) == 0:
        return out.item() if isinstance(out, np.ndarray) else out
    return out


def ln_gamma(x):
    """Natural log of the gamma function for x > 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return _sp.gammaln(arr)


def reg_upper_gamma(b, x):
    """Regularized upper incomplete gamma Γ(b, x)/Γ(b).

    b = 1 and b = 1/2 use exp(-x) and erfc(√x), which are much faster
    than the general routine.

    The lower counterpart is ``1 - reg_upper_gamma(b, x)``; see
    :func:`reg_lower_gamma` for an evaluation accurate when it is tiny.
    """
    bb = np.asarray(b, dtype=float)
    xx = np.asarray(x, dtype=float)
    if np.any(~(bb > 0)):
        raise DomainError(f"reg_upper_gamma requires b > 0, got {b!r}")
    if np.any(~(xx >= 0)):
        raise DomainError(f"reg_upper_gamma requires x >= 0, got {x!r}")
    if bb.ndim == 0 and float(bb) == 1.0:
        out = np.exp(-xx)
    elif bb.ndim == 0 and float(bb) == 0.5:
        out = _sp.erfc(np.sqrt(xx))
    else:
        out = _sp.gammaincc(bb, xx)
    if bb.ndim == 0 and xx.ndim == 0:
        return float(out)
    return out


def reg_lower_gamma(b, x):
    """Regularized lower incomplete gamma γ(b, x)/Γ(b)."""
    bb = np.asarray(b, dtype=float)
    xx = np.asarray(x, dtype=float)
    if np.any(~(bb > 0)):
        raise DomainError(f"reg_lower_gamma requires b > 0, got {b!r}")
    if np.any(~(xx >= 0)):
        raise DomainError(f"reg_lower_gamma requires x >= 0, got {x!r}")
    if bb.ndim == 0 and float(bb) == 1.0:
        out = -np.expm1(-xx)
    elif bb.ndim == 0 and float(bb) == 0.5:
        out = _sp.erf(np.sqrt(xx))
    else:
        out = _sp.gammainc(bb, xx)
    if bb.ndim == 0 and xx.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------- Dawson

_RYBICKI_H = 0.25
_RYBICKI_N = np.arange(-63, 64, 2, dtype=float)


def dawson(x):
    """Dawson's integral F(x) = exp(-x²) ∫₀ˣ exp(t²) dt.

    Taylor series near zero, Rybicki's exponentially convergent sampling
    sum on 0.5 <= |x| <= 7 and the asymptotic series beyond.
    """
    xx = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xx)):
        raise DomainError("dawson requires finite arguments")
    flat = np.atleast_1d(xx).ravel()
    ax = np.abs(flat)
    out = np.empty_like(ax)

    small = ax < 0.5
    if np.any(small):
        s = ax[small]
        term = s.copy()
        total = s.copy()
        q = -2.0 * s * s
        for k in range(1, 30):
            term = term * q / (2 * k + 1)
            total += term
        out[small] = total

    mid = (ax >= 0.5) & (ax <= 7.0)
    if np.any(mid):
        s = ax[mid][:, None]
        h = _RYBICKI_H
        out[mid] = np.sum(np.exp(-(s - _RYBICKI_N * h) ** 2) / _RYBICKI_N, axis=1) / _SQRT_PI

    big = ax > 7.0
    if np.any(big):
        s = ax[big]
        inv = 0.5 / (s * s)
        term = np.ones_like(s)
        total = np.ones_like(s)
        for k in range(1, 41):
            term = term * (2 * k - 1) * inv
            total += term
        out[big] = total / (2.0 * s)

    out = np.copysign(out, flat).reshape(xx.shape)
    return _wrap(x, out)


# ------------------------------------------------- exponential integrals

def _e1_series(z):
    """-γ - ln z - Σ (-z)^k / (k k!) on a complex array (off the cut)."""
    kmax = int(math.e * float(np.max(np.abs(z)))) + 60
    term = np.ones_like(z)
    total = np.zeros_like(z)
    for k in range(1, kmax + 1):
        term = term * (-z) / k
        inc = term / k
        total += inc
        if np.all(np.abs(inc) <= 1e-17 * np.maximum(np.abs(total), _TINY)):
            break
    return -EULER_GAMMA - np.log(z) - total


def _e1_cf_scaled(z):
    """exp(z) E1(z) by the modified Lentz continued fraction.

    Converges for |arg z| < π; used away from the negative real axis.
    Converged entries are dropped from the working set.
    """
    out = np.empty_like(z)
    idx = np.arange(z.size)
    b = z + 1.0
    c = np.full_like(z, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 20000):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        done = np.abs(delta - 1.0) <= 4e-16
        if np.any(done):
            out[idx[done]] = h[done]
            keep = ~done
            idx, b, c, d, h = idx[keep], b[keep], c[keep], d[keep], h[keep]
            if idx.size == 0:
                return out
    out[idx] = h
    return out


def _ei_scaled(y):
    """exp(-y) Ei(y) for real y > 0."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    low = y <= 40.0
    if np.any(low):
        s = y[low]
        term = np.ones_like(s)
        total = np.zeros_like(s)
        for k in range(1, int(math.e * float(np.max(s))) + 60):
            term = term * s / k
            inc = term / k
            total += inc
            if np.all(inc <= 1e-17 * total):
                break
        out[low] = (EULER_GAMMA + np.log(s) + total) * np.exp(-s)
    high = ~low
    if np.any(high):
        s = y[high]
        term = np.ones_like(s)
        total = np.ones_like(s)
        growing = np.zeros(s.shape, dtype=bool)
        for k in range(1, 80):
            nxt = term * k / s
            growing |= nxt >= term
            term = np.where(growing, term, nxt)
            total = total + np.where(growing, 0.0, nxt)
        out[high] = total / s
    return out


def _e1_core(z, scaled):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("E1 is singular at z = 0")
    flat = np.atleast_1d(z).ravel()
    out = np.empty_like(flat)
    re, im = flat.real, flat.imag

    # negative real axis: limit from the lower half-plane, Im E1 = +π
    cut = (im == 0) & (re < 0)
    if np.any(cut):
        y = -re[cut]
        ei_s = _ei_scaled(y)
        if scaled:
            out[cut] = -ei_s + 1j * math.pi * np.exp(-y)
        else:
            with np.errstate(over="ignore"):
                out[cut] = -ei_s * np.exp(y) + 1j * math.pi

    # the series loses about exp(|z| + Re z) to cancellation; keep that below e^6
    az = np.abs(flat)
    ser = ~cut & (az + re <= 6.0) & (az < 650.0)
    if np.any(ser):
        v = _e1_series(flat[ser])
        out[ser] = v * np.exp(flat[ser]) if scaled else v

    cf = ~cut & ~ser
    if np.any(cf):
        v = _e1_cf_scaled(flat[cf])
        out[cf] = v if scaled else v * np.exp(-flat[cf])
    return out.reshape(z.shape)


def e1_complex(z):
    """Principal-branch E1(z) with the cut on the negative real axis.

    Points exactly on the cut (zero imaginary part of either sign) take
    the limit from the lower half-plane, so ``E1(-x) = -Ei(x) + iπ``.
    """
    out = _e1_core(z, scaled=False)
    return complex(out.item()) if np.ndim(z) == 0 else out


def e1_scaled(z):
    """exp(z) E1(z), same branch rule as :func:`e1_complex`.

    Stays finite where exp(z) and E1(z) separately over/underflow.
    """
    out = _e1_core(z, scaled=True)
    return complex(out.item()) if np.ndim(z) == 0 else out


def e1_real(x):
    """E1(x) for real x > 0."""
    xx = np.asarray(x, dtype=float)
    if np.any(~(xx > 0)):
        raise DomainError(f"e1_real requires x > 0, got {x!r}; use e1_complex")
    out = _e1_core(xx, scaled=False).real
    return _wrap(x, out)


def e1_real_scaled(x):
    """exp(x) E1(x) for real x > 0."""
    xx = np.asarray(x, dtype=float)
    if np.any(~(xx > 0)):
        raise DomainError(f"e1_real_scaled requires x > 0, got {x!r}")
    out = _e1_core(xx, scaled=True).real
    return _wrap(x, out)


# ------------------------------------------------------- Kummer 1F1(1;b;-x)

def _kummer_taylor(b, x):
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 200):
        term = term * (-x) / (b + k - 1)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), _TINY)):
            break
    return total


def _kummer_transformed(b, x):
    # exp(-x) 1F1(b-1; b; x) with Poisson weights built in log space
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        kmax = int(xi + 20.0 * math.sqrt(xi) + 60)
        k = np.arange(1, kmax + 1, dtype=float)
        logp = -xi + k * math.log(xi) - _sp.gammaln(k + 1.0)
        p = np.exp(logp)
        out[i] = math.exp(-xi) + (b - 1.0) * math.fsum(p / (k + b - 1.0))
    return out


def _kummer_asymptotic(b, x):
    term = np.ones_like(x)
    total = np.ones_like(x)
    growing = np.zeros(x.shape, dtype=bool)
    for k in range(1, 120):
        nxt = term * (k + 1 - b) / x
        growing |= np.abs(nxt) >= np.abs(term)
        term = np.where(growing, term, nxt)
        total = total + np.where(growing, 0.0, nxt)
    return (b - 1.0) / x * total


def _kummer_general(b, x):
    """General-b evaluation path, without the closed-form shortcuts."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.empty_like(flat)
    taylor = flat <= 8.0
    asym = (flat > max(40.0, 4.0 * b)) & ~taylor
    mid = ~taylor & ~asym
    if np.any(taylor):
        out[taylor] = _kummer_taylor(b, flat[taylor])
    if np.any(mid):
        out[mid] = _kummer_transformed(b, flat[mid])
    if np.any(asym):
        out[asym] = _kummer_asymptotic(b, flat[asym])
    return out.reshape(x.shape)


def kummer_1f1_one(b, x):
    """Kummer's confluent hypergeometric function 1F1(1; b; -x), x >= 0.

    b = 1 and b = 1/2 use the closed forms exp(-x) and 1 - 2√x F(√x).
    """
    b = float(b)
    if not b > 0:
        raise DomainError(f"kummer_1f1_one requires b > 0, got {b!r}")
    xx = np.asarray(x, dtype=float)
    if np.any(~(xx >= 0)):
        raise DomainError("kummer_1f1_one requires x >= 0")
    if b == 1.0:
        out = np.exp(-xx)
    elif b == 0.5:
        r = np.sqrt(xx)
        out = 1.0 - 2.0 * r * np.asarray(dawson(r))
    else:
        out = _kummer_general(b, xx)
    return _wrap(x, np.asarray(out, dtype=float))
