"""Scalar special functions used throughout the package.

Every function accepts a Python float or a numpy array and returns the same
shape (floats for scalar input). The heavy lifting is done by ``scipy.special``
kernels (``ndtr`` evaluates through ``erfc`` on the tail side, ``ndtri`` uses a
rational approximation with refinement); this module adds domain validation,
log-domain variants and a guarded beta quantile.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from .errors import DomainError, InfiniteQuantileError

__all__ = [
    "std_normal_cdf",
    "std_normal_sf",
    "std_normal_pdf",
    "log_std_normal_cdf",
    "log_std_normal_pdf",
    "std_normal_quantile",
    "std_normal_quantile_from_log",
    "log_gamma",
    "log_beta",
    "log_binom",
    "regularized_incomplete_beta",
    "beta_quantile",
]

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_float_array(x, name):
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise DomainError(f"{name} must not be NaN")
    return arr


def _ret(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _require_finite(x, name):
    arr = _as_float_array(x, name)
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} must be finite")
    return arr


def std_normal_cdf(x):
    """Standard normal CDF, evaluated in the tail-stable direction."""
    return _ret(sc.ndtr(_require_finite(x, "x")))


def std_normal_sf(x):
    """Upper tail ``1 - Phi(x)`` without cancellation."""
    return _ret(sc.ndtr(-_require_finite(x, "x")))


def std_normal_pdf(x):
    x = _require_finite(x, "x")
    return _ret(np.exp(-0.5 * x * x - LOG_SQRT_2PI))


def log_std_normal_cdf(x):
    """``log Phi(x)``; accurate deep into the lower tail."""
    return _ret(sc.log_ndtr(_require_finite(x, "x")))


def log_std_normal_pdf(x):
    x = _require_finite(x, "x")
    return _ret(-0.5 * x * x - LOG_SQRT_2PI)


def std_normal_quantile(p):
    """Inverse standard normal CDF.

    Raises
    ------
    InfiniteQuantileError
        If any ``p`` equals 0 or 1.
    DomainError
        If any ``p`` lies outside [0, 1].
    """
    p = _as_float_array(p, "p")
    if ((p < 0.0) | (p > 1.0)).any():
        raise DomainError("p must lie in [0, 1]")
    if ((p == 0.0) | (p == 1.0)).any():
        raise InfiniteQuantileError("the normal quantile at 0 or 1 is infinite")
    return _ret(sc.ndtri(p))


def std_normal_quantile_from_log(logp):
    """Solve ``log Phi(x) = logp`` for x; usable when ``exp(logp)`` underflows."""
    logp = _as_float_array(logp, "logp")
    if (logp > 0.0).any():
        raise DomainError("logp must be <= 0")
    if (logp == 0.0).any() or np.isneginf(logp).any():
        raise InfiniteQuantileError("the normal quantile at 0 or 1 is infinite")
    return _ret(sc.ndtri_exp(logp))


def log_gamma(x):
    x = _as_float_array(x, "x")
    if (x <= 0.0).any():
        raise DomainError("log_gamma requires x > 0")
    return _ret(sc.gammaln(x))


def log_beta(a, b):
    """``log B(a, b)``; symmetric in its arguments."""
    a = _as_float_array(a, "a")
    b = _as_float_array(b, "b")
    if (a <= 0.0).any() or (b <= 0.0).any():
        raise DomainError("log_beta requires positive arguments")
    return _ret(sc.betaln(a, b))


def log_binom(n, k):
    """Log binomial coefficient, valid for real ``n >= k >= 0``."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    if (k < 0).any() or (k > n).any():
        raise DomainError("log_binom requires 0 <= k <= n")
    return _ret(sc.gammaln(n + 1.0) - sc.gammaln(k + 1.0) - sc.gammaln(n - k + 1.0))


def _check_shape_params(a, b):
    a = _as_float_array(a, "a")
    b = _as_float_array(b, "b")
    if (a <= 0.0).any() or (b <= 0.0).any():
        raise DomainError("beta shape parameters must be positive")
    return a, b


def regularized_incomplete_beta(x, a, b):
    """``I_x(a, b)``, the Beta(a, b) CDF at x."""
    x = _as_float_array(x, "x")
    if ((x < 0.0) | (x > 1.0)).any():
        raise DomainError("x must lie in [0, 1]")
    a, b = _check_shape_params(a, b)
    return _ret(sc.betainc(a, b, x))


_QUANTILE_TOL = 1e-10


def _beta_quantile_scalar(p, a, b):
    # quantiles closer to an endpoint than the neighbouring double round to it
    below_one = math.nextafter(1.0, 0.0)
    if sc.betainc(a, b, below_one) < p:
        return 1.0
    if sc.betainc(a, b, 5e-324) > p:
        return 0.0
    # bisection until the bracket is narrower than 1e-3, then safeguarded Newton
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if sc.betainc(a, b, mid) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    log_norm = sc.betaln(a, b)
    for _ in range(100):
        f = sc.betainc(a, b, x) - p
        if abs(f) <= 0.01 * _QUANTILE_TOL:
            break
        if f < 0:
            lo = x
        else:
            hi = x
        dens = math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_norm)
        step = f / dens if dens > 0 and math.isfinite(dens) else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if x_new == x or not (0.0 < x_new < 1.0):
            break
        x = x_new
    return x


def beta_quantile(p, a, b):
    """Quantile of Beta(a, b).

    ``p = 0`` and ``p = 1`` return 0 and 1 exactly. Interior results satisfy
    ``|I_x(a, b) - p| <= 1e-10`` unless the true quantile is not representable
    in double precision (extremely small shape parameters), in which case the
    nearest representable value is returned.
    """
    p = _as_float_array(p, "p")
    if ((p < 0.0) | (p > 1.0)).any():
        raise DomainError("p must lie in [0, 1]")
    a, b = _check_shape_params(a, b)
    shape = np.broadcast(p, a, b).shape
    p, a, b = (np.broadcast_to(v, shape).ravel() for v in (p, a, b))
    x = np.array(sc.betaincinv(a, b, p), dtype=float)
    interior = (p > 0.0) & (p < 1.0)
    x[p == 0.0] = 0.0
    x[p == 1.0] = 1.0
    resid = np.abs(sc.betainc(a, b, x) - p)
    for i in np.flatnonzero(interior & ~(resid <= _QUANTILE_TOL)):
        x[i] = _beta_quantile_scalar(float(p[i]), float(a[i]), float(b[i]))
    return _ret(x.reshape(shape))
