"""Ranking probabilities for classical latent-utility models.

A ranking ``r`` assigns rank ``r[i]`` (1 = smallest) to item ``i``; ``o`` is
the inverse permutation, so ``o[j]`` is the item in position ``j + 1``.
``Pr(R = r) = Pr(X_{o_1} < X_{o_2} < ... < X_{o_n})``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc
from scipy.integrate import cumulative_simpson, simpson

from .errors import ComplexityError, DomainError, PatternError
from .latent import OutlierModel
from .special import std_normal_quantile_from_log

__all__ = [
    "Ranking",
    "GammaRaceModel",
    "TaylorConfig",
    "all_rankings",
    "exp_rank_prob",
    "gumbel_rank_prob",
    "gamma_rank_prob",
    "gamma_lattice_size",
    "gamma_outlier_to_normal",
    "blom_scores",
    "taylor_rank_prob",
    "normal_rank_prob_quadrature",
]


@dataclass(frozen=True, eq=False)
class Ranking:
    """A permutation ``r`` of ``1..n``; ``order`` holds 0-based item indices by position."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r)
        if r.ndim != 1 or r.size == 0 or not np.array_equal(np.sort(r), np.arange(1, r.size + 1)):
            raise DomainError("a ranking must be a permutation of 1..n")
        r = r.astype(int)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def order(self) -> np.ndarray:
        return np.argsort(self.r)

    def reversed(self) -> "Ranking":
        return Ranking(self.n + 1 - self.r)

    def __eq__(self, other):
        return isinstance(other, Ranking) and np.array_equal(self.r, other.r)

    def __hash__(self):
        return hash(tuple(self.r))


def _ranking(ranking) -> Ranking:
    return ranking if isinstance(ranking, Ranking) else Ranking(ranking)


def all_rankings(n: int):
    """Every ranking of ``n`` items."""
    for perm in itertools.permutations(range(1, n + 1)):
        yield Ranking(perm)


@dataclass(frozen=True, eq=False)
class GammaRaceModel:
    """Independent ``Gamma(s, lambda_i)`` utilities (shape ``s``, rate ``lambda_i``)."""

    s: int
    lambdas: np.ndarray

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 1:
            raise DomainError("shape s must be an integer >= 1")
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size < 1 or not (np.isfinite(lam) & (lam > 0)).all():
            raise DomainError("rates must be positive and finite")
        lam.setflags(write=False)
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "lambdas", lam)


@dataclass(frozen=True, eq=False)
class TaylorConfig:
    """Unit-variance normal utilities with means ``mus`` close to zero."""

    mus: np.ndarray

    def __post_init__(self):
        mus = np.asarray(self.mus, dtype=float)
        if mus.ndim != 1 or mus.size < 2 or not np.isfinite(mus).all():
            raise DomainError("need at least two finite means")
        mus.setflags(write=False)
        object.__setattr__(self, "mus", mus)

    @property
    def n(self) -> int:
        return self.mus.size


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if not (np.isfinite(x) & (x > 0)).all():
        raise DomainError(f"{name} must be positive and finite")
    return x


def _check_size(ranking: Ranking, n: int):
    if ranking.n != n:
        raise DomainError(f"ranking has {ranking.n} items, parameters have {n}")


def exp_rank_prob(lambdas, ranking) -> float:
    """Exponential utilities: ``prod_j lambda_{o_j} / sum_{k >= j} lambda_{o_k}``."""
    lam = _positive(lambdas, "rates")
    ranking = _ranking(ranking)
    _check_size(ranking, lam.size)
    lo = lam[ranking.order]
    tail = np.cumsum(lo[::-1])[::-1]
    return float(np.exp(np.sum(np.log(lo) - np.log(tail))))


def gumbel_rank_prob(mus, sigmas, ranking) -> float:
    """Gumbel (maximum-type) utilities with locations ``mus`` and scales ``sigmas``.

    Uses ``exp(-X_i / sigma_i) ~ Exp(exp(mu_i / sigma_i))``, which reverses
    the order: ``prod_j w_{o_{n-j+1}} / sum_{k <= n-j+1} w_{o_k}`` with
    ``w_i = exp(mu_i / sigma_i)``. The transformation is one order-reversing
    map only when all ``sigma_i`` are equal, so the result is the ranking
    probability of the model in that case.
    """
    mus = np.asarray(mus, dtype=float)
    sig = _positive(sigmas, "scales")
    mus, sig = np.broadcast_arrays(mus, sig)
    ranking = _ranking(ranking)
    _check_size(ranking, mus.size)
    logw = (mus / sig)[ranking.order]
    # prefix log-sums: log sum_{k <= t} w_{o_k}
    prefix = np.logaddexp.accumulate(logw)
    return float(np.exp(np.sum(logw - prefix)))


def _gamma_log_terms(model: GammaRaceModel, ranking: Ranking):
    """Per-position pieces of the gamma race sum.

    Returns ``log(lambda_{o_j} / Lambda_j)`` and ``log(Lambda_{j+1} / Lambda_j)``
    for ``j = 1..n-1``, where ``Lambda_j = sum_{k >= j} lambda_{o_k}``.
    """
    lo = model.lambdas[ranking.order]
    big = np.cumsum(lo[::-1])[::-1]
    log_own = np.log(lo[:-1]) - np.log(big[:-1])
    log_rest = np.log(big[1:]) - np.log(big[:-1])
    return log_own, log_rest


def gamma_lattice_size(s: int, n: int) -> int:
    """Number of terms in the nested gamma sum for ``n`` racers.

    Counts tuples ``(i_1, ..., i_{n-1})`` with ``0 <= i_j <= s - 1 + i_{j+1}``
    and ``i_n = 0``.
    """
    if n < 2:
        return 1
    # counts[v] = number of admissible (i_j, ..., i_{n-1}) with i_j = v
    counts = [1] * s
    for _ in range(n - 2):
        suffix = list(itertools.accumulate(reversed(counts)))[::-1]
        width = len(counts) + s - 1
        counts = [suffix[max(0, u - (s - 1))] for u in range(width)]
    return sum(counts)


def _gamma_recursive(s, log_own, log_rest):
    # S_1(u) = sum_{i <= u} t_1(i),  S_j(u) = sum_{i <= u} t_j(i) S_{j-1}(s - 1 + i);
    # the probability is S_{n-1}(s - 1). S_j is needed up to u = (n - j)(s - 1).
    m = log_own.size
    prev = None
    for j in range(m):
        width = (m - j) * (s - 1) + 1
        i = np.arange(width, dtype=float)
        log_t = sc.gammaln(s + i) - sc.gammaln(i + 1.0) - sc.gammaln(s) + i * log_rest[j] + s * log_own[j]
        if prev is not None:
            log_t = log_t + prev[s - 1 : s - 1 + width]
        prev = np.logaddexp.accumulate(log_t)
    return 0.0 if prev is None else float(prev[-1])


def _gamma_odometer(s, log_own, log_rest):
    m = log_own.size
    if m == 0:
        return 0.0
    idx = [0] * m  # idx[j] is i_{j+1}
    # bound on i_{j+1} given i_{j+2} (i_m <= s - 1 since i_{m+1} = 0)
    limit = lambda j: s - 1 + (idx[j + 1] if j + 1 < m else 0)  # noqa: E731
    lgs = math.lgamma(s)
    run_max, run_sum = -math.inf, 0.0
    while True:
        lt = 0.0
        for j in range(m):
            i = idx[j]
            lt += math.lgamma(s + i) - math.lgamma(i + 1) - lgs + i * log_rest[j] + s * log_own[j]
        if lt > run_max:
            run_sum = run_sum * math.exp(run_max - lt) + 1.0
            run_max = lt
        else:
            run_sum += math.exp(lt - run_max)
        # advance the odometer from the innermost digit i_1
        j = 0
        while j < m:
            if idx[j] < limit(j):
                idx[j] += 1
                for k in range(j - 1, -1, -1):
                    idx[k] = 0
                break
            j += 1
        if j == m:
            break
    return run_max + math.log(run_sum)


def gamma_rank_prob(
    model: GammaRaceModel, ranking, method: str = "recursive", work_guard: float = 1e8
) -> float:
    """Gamma race ranking probability.

    The probability is the nested sum over failure counts ``i_{n-1}, ..., i_1``
    (``i_n = 0``, ``i_j <= s - 1 + i_{j+1}``) of
    ``prod_j C(s - 1 + i_j, i_j) (Lambda_{j+1}/Lambda_j)^{i_j} (lambda_{o_j}/Lambda_j)^s``.

    ``method="recursive"`` evaluates the same sum level by level with running
    partial sums, in ``O(n^2 s)`` log-domain operations. ``method="odometer"``
    enumerates every lattice term and raises ``ComplexityError`` when the
    lattice has more than ``work_guard`` terms.
    """
    ranking = _ranking(ranking)
    _check_size(ranking, model.lambdas.size)
    log_own, log_rest = _gamma_log_terms(model, ranking)
    if method == "recursive":
        return float(np.exp(_gamma_recursive(model.s, log_own, log_rest)))
    if method == "odometer":
        size = gamma_lattice_size(model.s, model.lambdas.size)
        if size > work_guard:
            raise ComplexityError(
                f"{size} lattice terms exceed the work guard {work_guard:g}; "
                "use method='recursive' or the normal surrogate"
            )
        return float(math.exp(_gamma_odometer(model.s, log_own, log_rest)))
    raise ValueError("method must be 'recursive' or 'odometer'")


def gamma_outlier_to_normal(model: GammaRaceModel) -> OutlierModel:
    """Normal model with matching moments: ``Gamma(s, lambda) ~ N(s/lambda, s/lambda^2)``.

    ``lambdas[0]`` is the outlier rate; the remaining rates must be equal.
    """
    lam = model.lambdas
    if lam.size < 2:
        raise PatternError("need an outlier and at least one in-group rate")
    if not np.all(lam[1:] == lam[1]):
        raise PatternError("in-group rates must be equal")
    s = model.s
    root = math.sqrt(s)
    return OutlierModel(
        mu0=s / lam[0], sigma0=root / lam[0], mu=s / lam[1], sigma=root / lam[1], n=lam.size - 1
    )


def blom_scores(n: int, denominator_offset: float = 0.25) -> np.ndarray:
    """Approximate expected normal order statistics ``Phi^{-1}((i - 3/8) / (n + offset))``.

    The default offset 1/4 is Blom's. ``denominator_offset=-0.75`` gives the
    variant ``(i - 3/8) / (n - 3/4)``, which exceeds 1 at ``i = n``; asking for
    a score that is not a probability raises ``DomainError``.
    """
    p = (np.arange(1, n + 1) - 0.375) / (n + denominator_offset)
    if ((p <= 0) | (p >= 1)).any():
        raise DomainError("order-statistic score probability outside (0, 1)")
    return sc.ndtri(p)


def _psi(log_k):
    """``Phi^{-1}(1/k)`` and ``log phi`` at it, from ``log k``."""
    psi = float(std_normal_quantile_from_log(-log_k))
    return psi, -0.5 * psi * psi - 0.5 * math.log(2.0 * math.pi)


def taylor_rank_prob(
    config: TaylorConfig,
    *,
    ranking=None,
    leader: int | None = None,
    pair: tuple[int, int] | None = None,
    denominator_offset: float = 0.25,
    center: bool = True,
) -> float:
    """First-order expansions around equal means for unit-variance normals.

    With ``mu_(i)`` the approximate expected order statistics and
    ``psi_k = Phi^{-1}(1/k)``:

    * ``ranking``: ``Phi(psi_{n!} + sum_i mu_{o_i} mu_(i) / (n! phi(psi_{n!})))``
    * ``leader=i`` (0-based): ``Pr(R_i = 1) = Phi(psi_n + mu_i mu_(1) / ((n-1) phi(psi_n)))``
    * ``pair=(i, j)``: ``Pr(R_i = 1, R_j = 2) = Phi(psi_{n(n-1)}
      + (mu_i mu_(1) + mu_j mu_(2)) / (n(n-1) phi) + (mu_i + mu_j)(mu_(1) + mu_(2)) / (n(n-1)(n-2) phi))``

    The leader formula keeps the ``(n - 1)`` denominator exactly as it is
    usually stated, even though the ranking formula has ``n!``.

    The expansions are taken around equal means, so ``center=True`` (default)
    first subtracts the average mean; rank probabilities do not change under a
    common shift but the formulas do. ``center=False`` plugs the means in as
    given.
    """
    given = sum(v is not None for v in (ranking, leader, pair))
    if given != 1:
        raise ValueError("pass exactly one of ranking, leader or pair")
    n = config.n
    mu = config.mus - config.mus.mean() if center else config.mus
    if ranking is not None:
        ranking = _ranking(ranking)
        _check_size(ranking, n)
        scores = blom_scores(n, denominator_offset)
        log_k = math.lgamma(n + 1)
        psi, log_phi = _psi(log_k)
        lin = float(mu[ranking.order] @ scores)
        return float(sc.ndtr(psi + lin * math.exp(-log_k - log_phi)))
    scores = sc.ndtri((np.arange(1, 3) - 0.375) / (n + denominator_offset))
    if leader is not None:
        if not 0 <= leader < n:
            raise DomainError("leader index out of range")
        psi, log_phi = _psi(math.log(n))
        return float(sc.ndtr(psi + mu[leader] * scores[0] / ((n - 1) * math.exp(log_phi))))
    i, j = pair
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise DomainError("pair must hold two distinct indices in range")
    if n < 3:
        raise DomainError("the pair expansion needs n >= 3")
    psi, log_phi = _psi(math.log(n) + math.log(n - 1))
    phi = math.exp(log_phi)
    first = (mu[i] * scores[0] + mu[j] * scores[1]) / (n * (n - 1) * phi)
    second = (mu[i] + mu[j]) * (scores[0] + scores[1]) / (n * (n - 1) * (n - 2) * phi)
    return float(sc.ndtr(psi + first + second))


def normal_rank_prob_quadrature(mus, sigmas, ranking, points: int = 40001, span: float = 10.0) -> float:
    """``Pr(X_{o_1} < ... < X_{o_n})`` for independent normals, ``n <= 4``.

    Evaluates the nested integral from the innermost level outward on one
    shared grid: ``h_n(x) = Pr(X_{o_n} > x)`` and
    ``h_j(x) = int_x^inf f_{o_j}(t) h_{j+1}(t) dt``, each a cumulative Simpson
    integral; the answer is ``h_1(-inf)``.
    """
    mus = np.asarray(mus, dtype=float)
    sig = _positive(sigmas, "standard deviations")
    mus, sig = np.broadcast_arrays(mus, sig)
    n = mus.size
    if n > 4:
        raise ComplexityError("nested quadrature is limited to n <= 4")
    ranking = _ranking(ranking)
    _check_size(ranking, n)
    if n == 1:
        return 1.0
    lo = float(np.min(mus - span * sig))
    hi = float(np.max(mus + span * sig))
    x = np.linspace(lo, hi, points)
    o = ranking.order
    h = sc.ndtr((mus[o[-1]] - x) / sig[o[-1]])
    for j in range(n - 2, -1, -1):
        k = o[j]
        f = np.exp(-0.5 * ((x - mus[k]) / sig[k]) ** 2) / (sig[k] * math.sqrt(2.0 * math.pi))
        g = f * h
        if j == 0:
            return float(simpson(g, x=x))
        left = cumulative_simpson(g, x=x, initial=0.0)
        h = left[-1] - left
    raise AssertionError("unreachable")
