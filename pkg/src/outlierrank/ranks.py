"""Rank distributions for the single-outlier normal model.

``R0 - 1`` given ``Z`` is Binomial(n, Z). Integrating ``Z`` exactly gives the
exact-integral pmf; replacing ``Z`` by its moment-matched Beta(a, b) gives a
beta-binomial pmf in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special as sc
from scipy.special import logsumexp

from ._quadrature import DEFAULT_QUADRATURE, QuadratureConfig, standard_normal_nodes
from .errors import DimensionError, DomainError, QueryError
from .latent import BetaSurrogate, OutlierModel, beta_surrogate
from .metrics import w1_discrete

__all__ = [
    "RankPmf",
    "JointRankQuery",
    "RankMoments",
    "ExtremeProbs",
    "RegimeReport",
    "r0_pmf_surrogate",
    "r0_pmf_exact",
    "joint_prob",
    "rank_moments",
    "in_group_marginal",
    "extreme_probs",
    "asymptotic_regime_check",
    "REGIMES",
]

METHODS = ("exact-integral", "surrogate", "monte-carlo")


@dataclass(frozen=True, eq=False)
class RankPmf:
    """Distribution of a rank over ``{1, ..., n + 1}``; ``probs[k - 1] = Pr(R = k)``.

    ``raw_sum`` is the mass before renormalization for quadrature-based pmfs.
    """

    n: int
    probs: np.ndarray
    method: str
    raw_sum: float | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.n + 1,):
            raise DimensionError(f"expected {self.n + 1} probabilities, got {probs.shape}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise DomainError("probabilities must be nonnegative and sum to 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.n + 2)

    def mean(self) -> float:
        return float(self.ranks @ self.probs)

    def variance(self) -> float:
        k = self.ranks - self.mean()
        return float((k * k) @ self.probs)

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)


@dataclass(frozen=True)
class JointRankQuery:
    """Event ``{R0 = j0, R_{i_1} = j_1, ..., R_{i_m} = j_m}``; ``j0`` may be omitted.

    In-group indices run over ``1..n`` and ranks over ``1..n+1``.
    """

    indices: tuple[int, ...]
    ranks: tuple[int, ...]
    j0: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "ranks", tuple(int(j) for j in self.ranks))
        if len(self.indices) != len(self.ranks):
            raise QueryError("indices and ranks must have equal length")
        if len(self.indices) < 1:
            raise QueryError("at least one in-group rank is required")
        if len(set(self.indices)) != len(self.indices):
            raise QueryError("in-group indices must be distinct")
        taken = self.ranks + ((self.j0,) if self.j0 is not None else ())
        if len(set(taken)) != len(taken):
            raise QueryError("ranks must be distinct")

    def validate(self, n: int) -> None:
        m = len(self.indices)
        if m > n:
            raise QueryError(f"at most n = {n} in-group ranks can be queried")
        if any(i < 1 or i > n for i in self.indices):
            raise QueryError(f"in-group indices must lie in 1..{n}")
        taken = self.ranks + ((self.j0,) if self.j0 is not None else ())
        if any(j < 1 or j > n + 1 for j in taken):
            raise QueryError(f"ranks must lie in 1..{n + 1}")


@dataclass(frozen=True)
class RankMoments:
    mean_r0: float
    var_r0: float
    mean_r1: float
    var_r1: float
    cov_r0_r1: float
    cov_r1_r2: float


@dataclass(frozen=True)
class ExtremeProbs:
    """Surrogate ``Pr(R0 = 1)``, ``Pr(R0 = n/2 + 1)``, ``Pr(R0 = n + 1)`` and large-n forms."""

    min: float
    max: float
    asymptotic_min: float
    asymptotic_max: float
    median: float | None = None
    asymptotic_median: float | None = None


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    ladder: tuple[float, ...]
    distances: tuple[float, ...]
    decreasing: bool


def _surrogate(model: OutlierModel, surrogate: BetaSurrogate | None) -> BetaSurrogate:
    return surrogate if surrogate is not None else beta_surrogate(model.law)


def r0_pmf_surrogate(model: OutlierModel, surrogate: BetaSurrogate | None = None) -> RankPmf:
    """Beta-binomial pmf ``C(n, k-1) B(a + k - 1, b + n + 1 - k) / B(a, b)``."""
    s = _surrogate(model, surrogate)
    n = model.n
    j = np.arange(n + 1, dtype=float)
    logp = (
        sc.gammaln(n + 1.0) - sc.gammaln(j + 1.0) - sc.gammaln(n - j + 1.0)
        + sc.betaln(s.a + j, s.b + n - j) - sc.betaln(s.a, s.b)
    )
    probs = np.exp(logp)
    return RankPmf(n, probs / probs.sum(), "surrogate", raw_sum=float(probs.sum()))


def _log_binomial_kernel(log_z, log_1mz, n):
    # rows: successes j = 0..n, columns: quadrature nodes
    j = np.arange(n + 1, dtype=float)[:, None]
    log_c = sc.gammaln(n + 1.0) - sc.gammaln(j + 1.0) - sc.gammaln(n - j + 1.0)
    return log_c + j * log_z[None, :] + (n - j) * log_1mz[None, :]


def _finish_exact(n, log_mass, tol_warn=1e-2):
    raw = np.exp(log_mass)
    raw_sum = float(raw.sum())
    notes = ()
    if abs(raw_sum - 1.0) > tol_warn:
        msg = f"raw quadrature mass {raw_sum:.6g} deviates from 1 by more than {tol_warn:g}"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        notes = (msg,)
    return RankPmf(n, raw / raw_sum, "exact-integral", raw_sum=raw_sum, warnings=notes)


def r0_pmf_exact(
    model: OutlierModel,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    scheme: str = "quadrature",
    bin_width: float = 1e-4,
    chunk: int = 2048,
) -> RankPmf:
    """Exact pmf ``C(n, k-1) E[Z^(k-1) (1 - Z)^(n+1-k)]`` by numerical integration.

    ``scheme="quadrature"`` integrates over the standardized outlier value with
    the integrand assembled in logs. ``scheme="z-bins"`` sums the density of
    ``Z`` over left-endpoint bins of width ``bin_width`` on (0, 1), the simple
    binning whose mass degrades when the density is sharply peaked.

    The returned pmf is renormalized; ``raw_sum`` holds the mass before
    renormalization and a warning is attached when it is off by more than 1e-2.
    """
    n = model.n
    law = model.law
    if scheme == "quadrature":
        y, logw = standard_normal_nodes(law.rho, law.delta, config)
        t = (y - law.delta) / law.rho
        log_z, log_1mz = sc.log_ndtr(t), sc.log_ndtr(-t)
        log_mass = np.empty(n + 1)
        for start in range(0, n + 1, chunk):
            stop = min(start + chunk, n + 1)
            j = np.arange(start, stop, dtype=float)[:, None]
            log_c = sc.gammaln(n + 1.0) - sc.gammaln(j + 1.0) - sc.gammaln(n - j + 1.0)
            terms = log_c + j * log_z[None, :] + (n - j) * log_1mz[None, :] + logw[None, :]
            log_mass[start:stop] = logsumexp(terms, axis=1)
        return _finish_exact(n, log_mass)
    if scheme == "z-bins":
        if not (0.0 < bin_width <= 1e-2):
            raise DomainError("bin_width must lie in (0, 1e-2]")
        # left endpoints of the bins; the one at z = 0 is dropped because the
        # density is 0 or infinite there
        z = np.arange(1, int(math.ceil(1.0 / bin_width))) * bin_width
        r, d = law.rho, law.delta
        tq = sc.ndtri(z)
        log_f = math.log(r) - 0.5 * ((r * r - 1.0) * tq * tq + 2.0 * r * d * tq + d * d)
        log_mass = logsumexp(
            _log_binomial_kernel(np.log(z), np.log1p(-z), n) + log_f[None, :], axis=1
        ) + math.log(bin_width)
        return _finish_exact(n, log_mass)
    raise ValueError("scheme must be 'quadrature' or 'z-bins'")


def joint_prob(model: OutlierModel, query: JointRankQuery, pmf: RankPmf | None = None) -> float:
    """Probability of a joint rank event built from the marginal pmf of ``R0``.

    Given ``R0``, the in-group ranks are a uniformly random arrangement of the
    remaining slots, so

    * with ``j0``: ``pmf[j0] / prod_{i=1}^{m} (n - i + 1)``
    * without: ``(1 - sum_k pmf[j_k]) / prod_{i=1}^{m} (n - i + 1)``

    ``pmf`` defaults to the surrogate pmf.
    """
    n = model.n
    query.validate(n)
    if pmf is None:
        pmf = r0_pmf_surrogate(model)
    if pmf.n != n:
        raise DimensionError("pmf and model disagree on n")
    m = len(query.indices)
    log_perm = math.lgamma(n + 1) - math.lgamma(n - m + 1)
    if query.j0 is not None:
        mass = float(pmf.probs[query.j0 - 1])
    else:
        mass = 1.0 - float(sum(pmf.probs[j - 1] for j in query.ranks))
    return max(mass, 0.0) * math.exp(-log_perm)


def in_group_marginal(pmf: RankPmf) -> np.ndarray:
    """``Pr(R_i = k) = (1 - Pr(R0 = k)) / n`` for any in-group index ``i``."""
    return (1.0 - pmf.probs) / pmf.n


def rank_moments(model: OutlierModel, surrogate: BetaSurrogate | None = None) -> RankMoments:
    """Closed-form first and second moments of ``R0`` and of in-group ranks.

    Exact for the normal model: they only involve ``E Z`` and ``Var Z``, which
    the surrogate matches.
    """
    s = _surrogate(model, surrogate)
    n = model.n
    m = s.mean
    mbar = 1.0 - m
    iota = s.iota
    pq = m * mbar
    var_r0 = n * pq * (1.0 + (n - 1) * iota)
    return RankMoments(
        mean_r0=1.0 + n * m,
        var_r0=var_r0,
        mean_r1=(n + 1) / 2.0 + mbar,
        var_r1=(n * n - 1) / 12.0 + n * pq * (1.0 - (n - 1) * iota / n),
        cov_r0_r1=-var_r0 / n,
        cov_r1_r2=-(n + 1) / 12.0 + 2.0 * pq * (iota - 0.5),
    )


def extreme_probs(model: OutlierModel, include_median: bool | None = None) -> ExtremeProbs:
    """Surrogate probabilities that the outlier is smallest, median or largest.

    ``include_median`` defaults to ``n`` even; requesting it for odd ``n``
    raises ``QueryError``. The asymptotic forms are the large-``n`` leading
    terms ``Gamma(a+b) / (n^a Gamma(b))``, ``2^(1-a-b) / (m B(a, b))`` and
    ``Gamma(a+b) / (n^b Gamma(a))`` with ``n = 2m``: the chance of the
    smallest rank decays like ``n^-a``, since small ``a`` puts mass near 0.
    """
    n = model.n
    if include_median is None:
        include_median = n % 2 == 0
    if include_median and n % 2:
        raise QueryError("the median rank exists only for even n")
    s = beta_surrogate(model.law)
    a, b = s.a, s.b
    lb = sc.betaln(a, b)
    lg_ab = sc.gammaln(a + b)
    out = dict(
        min=math.exp(sc.betaln(a, b + n) - lb),
        max=math.exp(sc.betaln(a + n, b) - lb),
        asymptotic_min=math.exp(lg_ab - a * math.log(n) - sc.gammaln(b)),
        asymptotic_max=math.exp(lg_ab - b * math.log(n) - sc.gammaln(a)),
    )
    if include_median:
        half = n // 2
        log_c = sc.gammaln(n + 1.0) - 2.0 * sc.gammaln(half + 1.0)
        out["median"] = math.exp(log_c + sc.betaln(a + half, b + half) - lb)
        out["asymptotic_median"] = math.exp((1.0 - a - b) * math.log(2.0) - math.log(half) - lb)
    return ExtremeProbs(**out)


REGIMES = ("rho->0", "rho->inf", "|delta|->inf", "rho,|delta|->inf", "n->inf")

_DEFAULT_LADDERS = {
    "rho->0": (0.5, 0.125, 0.03125, 0.0078125),
    "rho->inf": (1.0, 4.0, 16.0, 64.0),
    "|delta|->inf": (2.0, 4.0, 8.0, 16.0),
    "rho,|delta|->inf": (1.0, 4.0, 16.0, 64.0),
    "n->inf": (10.0, 100.0, 1000.0, 10000.0),
}


def _scaled_rank_kolmogorov(pmf: RankPmf, rho: float, delta: float) -> float:
    """Sup distance between the law of ``(R0 - 1)/n`` and the law of ``Z``."""
    n = pmf.n
    x = np.arange(n + 1) / n
    cdf = np.cumsum(pmf.probs)
    left = np.concatenate([[0.0], cdf[:-1]])
    with np.errstate(divide="ignore"):
        t = np.where(x > 0, sc.ndtri(x), -np.inf)
    fz = np.where(x >= 1.0, 1.0, sc.ndtr(delta + rho * t))
    return float(np.max(np.maximum(np.abs(cdf - fz), np.abs(left - fz))))


def asymptotic_regime_check(
    regime: str,
    ladder=None,
    n: int = 25,
    rho: float = 2.0,
    delta: float = 1.0,
    ratio: float = 1.0,
) -> RegimeReport:
    """Distance between approximation and truth along a ladder of parameters.

    The four parameter regimes compare the surrogate and exact-integral pmfs of
    ``R0`` by W1 at fixed ``n``:

    * ``"rho->0"`` and ``"rho->inf"``: ladder over ``rho`` with ``delta`` fixed
    * ``"|delta|->inf"``: ladder over ``delta`` with ``rho`` fixed
    * ``"rho,|delta|->inf"``: ladder over ``rho`` with ``delta = ratio * rho``

    ``"n->inf"`` compares the exact law of ``(R0 - 1)/n`` with the law of ``Z``
    by Kolmogorov distance along a ladder over ``n``.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    ladder = tuple(float(v) for v in (ladder if ladder is not None else _DEFAULT_LADDERS[regime]))
    dist = []
    for v in ladder:
        if regime == "n->inf":
            model = OutlierModel.standardized(rho, delta, int(v))
            dist.append(_scaled_rank_kolmogorov(r0_pmf_exact(model), rho, delta))
            continue
        if regime in ("rho->0", "rho->inf"):
            model = OutlierModel.standardized(v, delta, n)
        elif regime == "|delta|->inf":
            model = OutlierModel.standardized(rho, v, n)
        else:
            model = OutlierModel.standardized(v, ratio * v, n)
        dist.append(w1_discrete(r0_pmf_exact(model), r0_pmf_surrogate(model)))
    decreasing = all(b < a for a, b in zip(dist, dist[1:]))
    return RegimeReport(regime, ladder, tuple(dist), decreasing)
