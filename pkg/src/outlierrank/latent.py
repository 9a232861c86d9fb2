"""The latent success probability ``Z = Phi((X0 - mu) / sigma)`` and its beta surrogate.

Conditionally on the outlier value ``X0``, the number of in-group values below
it is Binomial(n, Z). Everything about the outlier's rank therefore flows
through the law of ``Z``, which depends on the model only through

    delta = (mu - mu0) / sigma0,   rho = sigma / sigma0.

Standardizing ``X0`` to N(0, 1) gives ``Z = Phi((y - delta) / rho)`` with
``y ~ N(0, 1)``, the form used throughout this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc
from scipy.special import logsumexp

from ._quadrature import DEFAULT_QUADRATURE, QuadratureConfig, standard_normal_nodes
from .errors import BoundaryError, DomainError, NumericalIntegrityError
from .special import LOG_SQRT_2PI, _ret

__all__ = [
    "OutlierModel",
    "LatentSuccessLaw",
    "BetaSurrogate",
    "VarianceBreakdown",
    "z_density",
    "z_cdf",
    "z_quantile",
    "z_mean",
    "z_variance",
    "log_z_variance",
    "z_raw_moment",
    "beta_surrogate",
    "EXTREME_DELTA",
]

# beyond this |delta| the mean and variance are too small for the closed-form
# integral to be resolved in double precision, so the log-domain route is used
EXTREME_DELTA = 12.0

_THETA_LO = 11.0 * math.pi / 12.0
_THETA_MID = 5.0 * math.pi / 4.0
_THETA_SPAN = 2.0 * math.pi / 3.0


@dataclass(frozen=True)
class LatentSuccessLaw:
    """Law of ``Z = Phi((y - delta) / rho)`` with ``y ~ N(0, 1)``."""

    rho: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise DomainError("rho must be positive and finite")
        if not math.isfinite(self.delta):
            raise DomainError("delta must be finite")


@dataclass(frozen=True)
class OutlierModel:
    """One outlier ``X0 ~ N(mu0, sigma0^2)`` among ``n`` iid ``N(mu, sigma^2)``."""

    mu0: float
    sigma0: float
    mu: float
    sigma: float
    n: int

    def __post_init__(self):
        for name in ("mu0", "sigma0", "mu", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.sigma0 <= 0 or self.sigma <= 0:
            raise DomainError("standard deviations must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def standardized(cls, rho: float, delta: float, n: int) -> "OutlierModel":
        """Model with ``X0 ~ N(0, 1)`` and in-group ``N(delta, rho^2)``."""
        return cls(mu0=0.0, sigma0=1.0, mu=float(delta), sigma=float(rho), n=n)

    @property
    def delta(self) -> float:
        return (self.mu - self.mu0) / self.sigma0

    @property
    def rho(self) -> float:
        return self.sigma / self.sigma0

    @property
    def law(self) -> LatentSuccessLaw:
        return LatentSuccessLaw(self.rho, self.delta)


@dataclass(frozen=True)
class VarianceBreakdown:
    """``Var Z = integral_term + arccos_term - mean_sq_term``."""

    integral_term: float
    arccos_term: float
    mean_sq_term: float
    total: float


@dataclass(frozen=True)
class BetaSurrogate:
    """Beta(a, b) matching the mean and variance of ``Z``.

    ``extreme`` marks parameters computed through the log-domain route
    (``|delta| > EXTREME_DELTA``), where mean and variance are tiny.
    """

    a: float
    b: float
    iota: float
    mean: float
    variance: float
    extreme: bool = False


def _law(law) -> LatentSuccessLaw:
    if isinstance(law, OutlierModel):
        return law.law
    if not isinstance(law, LatentSuccessLaw):
        raise TypeError("expected a LatentSuccessLaw or OutlierModel")
    return law


def _unit_interval(y, name):
    y = np.asarray(y, dtype=float)
    if np.isnan(y).any() or ((y < 0.0) | (y > 1.0)).any():
        raise DomainError(f"{name} must lie in [0, 1]")
    return y


def z_density(law, y):
    """Density of ``Z`` at ``y`` in (0, 1).

    ``rho * exp(-((rho^2 - 1) t^2 + 2 rho delta t + delta^2) / 2)`` with
    ``t = Phi^{-1}(y)``.
    """
    law = _law(law)
    y = _unit_interval(y, "y")
    if ((y == 0.0) | (y == 1.0)).any():
        raise BoundaryError("the density is not defined on the boundary of (0, 1)")
    r, d = law.rho, law.delta
    t = sc.ndtri(y)
    logf = math.log(r) - 0.5 * ((r * r - 1.0) * t * t + 2.0 * r * d * t + d * d)
    return _ret(np.exp(logf))


def z_cdf(law, y):
    """``Pr(Z <= y) = Phi(delta + rho Phi^{-1}(y))``; exact 0 and 1 at the ends."""
    law = _law(law)
    y = _unit_interval(y, "y")
    out = np.empty_like(y)
    lo, hi = y == 0.0, y == 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    out[mid] = sc.ndtr(law.delta + law.rho * sc.ndtri(y[mid]))
    return _ret(out)


def z_quantile(law, u):
    """``Phi((Phi^{-1}(u) - delta) / rho)`` for u in (0, 1)."""
    law = _law(law)
    u = _unit_interval(u, "u")
    if ((u == 0.0) | (u == 1.0)).any():
        raise BoundaryError("the quantile is requested on the boundary of (0, 1)")
    return _ret(sc.ndtr((sc.ndtri(u) - law.delta) / law.rho))


def z_mean(law) -> float:
    """``E Z = Pr(X1 <= X0) = Phi(-delta / sqrt(rho^2 + 1))``."""
    law = _law(law)
    return float(sc.ndtr(-law.delta / math.hypot(law.rho, 1.0)))


def _g_integrand(theta, rho, delta):
    r2 = rho * rho
    b = math.sqrt(6.0) * delta * np.sin(theta + math.pi / 4.0) / (r2 + 2.0)
    a = (r2 * (np.sin(2.0 * theta) + 2.0) + 2.0 * np.cos(theta + math.pi / 4.0) ** 2) / (
        2.0 * r2 * (r2 + 2.0)
    )
    x = b / np.sqrt(2.0 * a)
    # Phi(x) / phi(x) and the Gaussian factor combined in logs: both blow up
    # or vanish separately when |delta| is large
    log_scale = sc.log_ndtr(x) + 0.5 * x * x + LOG_SQRT_2PI - delta * delta / (r2 + 2.0)
    pref = math.sqrt(3.0) / (2.0 * math.pi * rho * math.sqrt(r2 + 2.0))
    return pref * b / (2.0 * a) ** 1.5 * np.exp(log_scale)


def _theta_integral(rho, delta, bin_width, method):
    if method == "riemann":
        # left-endpoint bins over the full interval, as a plain binned sum
        k = int(math.floor(_THETA_SPAN / bin_width))
        theta = _THETA_LO + np.arange(k + 1) * bin_width
        return float(bin_width * _g_integrand(theta, rho, delta).sum())
    if method == "simpson":
        # the integrand is symmetric about 5 pi / 4: integrate half, double
        half = _THETA_MID - _THETA_LO
        m = int(math.ceil(half / bin_width))
        m += m % 2
        theta = np.linspace(_THETA_LO, _THETA_MID, m + 1)
        g = _g_integrand(theta, rho, delta)
        h = half / m
        s = g[0] + g[-1] + 4.0 * g[1:-1:2].sum() + 2.0 * g[2:-1:2].sum()
        return float(2.0 * s * h / 3.0)
    raise ValueError("method must be 'simpson' or 'riemann'")


def z_variance(law, bin_width: float = 1e-4, method: str = "simpson") -> VarianceBreakdown:
    """Variance of ``Z`` as a one-dimensional angular integral plus closed-form terms.

    ``method="simpson"`` (default) is accurate to roughly 1e-13 relative for
    moderate parameters. ``method="riemann"`` is the plain left-endpoint binned
    sum with step ``bin_width``, kept for reproducing binned figure values.

    Raises
    ------
    NumericalIntegrityError
        If the total falls outside ``(0, m (1 - m))``.
    """
    law = _law(law)
    if not (0.0 < bin_width <= 1e-2):
        raise DomainError("bin_width must lie in (0, 1e-2]")
    r, d = law.rho, law.delta
    r2 = r * r
    integral = _theta_integral(r, d, bin_width, method)
    arccos = math.acos(-1.0 / (r2 + 1.0)) / (2.0 * math.pi) * math.exp(-d * d / (r2 + 2.0))
    m = z_mean(law)
    total = integral + arccos - m * m
    bound = m * float(sc.ndtr(d / math.hypot(r, 1.0)))
    if not (0.0 < total < bound):
        raise NumericalIntegrityError(
            f"variance {total!r} outside (0, {bound!r}) at rho={r}, delta={d}; "
            "use log_z_variance for extreme parameters"
        )
    return VarianceBreakdown(integral, arccos, m * m, total)


def _log_abs_diff(log_x, log_y):
    """``log|x - y|`` from ``log x`` and ``log y`` without forming x or y."""
    hi = np.maximum(log_x, log_y)
    lo = np.minimum(log_x, log_y)
    with np.errstate(divide="ignore"):
        return hi + np.log(-np.expm1(lo - hi))


def log_z_variance(law, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``log Var Z`` by quadrature of ``(Z - m)^2`` carried out in logs.

    Usable far beyond the range of ``z_variance``: at ``rho = 1, delta = 40``
    the variance is about 1e-232.
    """
    law = _law(law)
    # Var is even in delta; take delta >= 0 so that m <= 1/2 is the small side
    r, d = law.rho, abs(law.delta)
    y, logw = standard_normal_nodes(r, d, config)
    log_z = sc.log_ndtr((y - d) / r)
    log_m = float(sc.log_ndtr(-d / math.hypot(r, 1.0)))
    return float(logsumexp(2.0 * _log_abs_diff(log_z, log_m) + logw))


def z_raw_moment(law, k: int, grid_halfwidth: float = 8.0, grid_points: int = 20001) -> float:
    """``E Z^k = Pr(X1, ..., Xk <= X0)`` by the trapezoid rule in the outlier coordinate."""
    law = _law(law)
    if int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    y = np.linspace(-grid_halfwidth, grid_halfwidth, grid_points)
    f = np.exp(k * sc.log_ndtr((y - law.delta) / law.rho) - 0.5 * y * y - LOG_SQRT_2PI)
    h = y[1] - y[0]
    return float(h * (f.sum() - 0.5 * (f[0] + f[-1])))


def beta_surrogate(law, bin_width: float = 1e-4, method: str = "simpson") -> BetaSurrogate:
    """Moment-matched Beta(a, b) for ``Z``.

    ``a = m (m (1 - m) - v) / v`` and ``b = (1 - m) (m (1 - m) - v) / v``.
    For ``|delta| > EXTREME_DELTA`` the variance comes from ``log_z_variance``
    and ``a, b`` are assembled in logs as ``m (q - 1)`` and ``(1 - m)(q - 1)``
    with ``q = m (1 - m) / v``; the result is flagged ``extreme``.
    """
    law = _law(law)
    # work on the side delta >= 0, where m = E Z <= 1/2 carries full relative
    # precision, and reflect: a and b swap under delta -> -delta
    flip = law.delta < 0
    d = abs(law.delta)
    s = math.hypot(law.rho, 1.0)
    log_m = float(sc.log_ndtr(-d / s))
    log_1m = float(sc.log_ndtr(d / s))
    extreme = d > EXTREME_DELTA
    if extreme:
        log_v = log_z_variance(LatentSuccessLaw(law.rho, d))
    else:
        log_v = math.log(z_variance(LatentSuccessLaw(law.rho, d), bin_width, method).total)
    log_q = log_m + log_1m - log_v
    if not log_q > 0.0:
        raise NumericalIntegrityError("variance is not below m (1 - m)")
    if extreme:
        log_q1 = log_q + math.log(-math.expm1(-log_q))
        a = math.exp(log_m + log_q1)
        b = math.exp(log_1m + log_q1)
    else:
        m, v = math.exp(log_m), math.exp(log_v)
        slack = m * math.exp(log_1m) - v
        a = m * slack / v
        b = math.exp(log_1m) * slack / v
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise NumericalIntegrityError("beta parameters are not representable")
    m = math.exp(log_1m) if flip else math.exp(log_m)
    if flip:
        a, b = b, a
    return BetaSurrogate(a, b, 1.0 / (a + b + 1.0), m, math.exp(log_v), extreme=extreme)
