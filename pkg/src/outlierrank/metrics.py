"""Wasserstein distances: quantile-based W2 on (0, 1) and CDF-based W1 on ranks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as sc

from .errors import DimensionError, DomainError
from .latent import LatentSuccessLaw, beta_surrogate
from .special import beta_quantile

__all__ = [
    "QuantileFunction",
    "latent_quantile_function",
    "beta_quantile_function",
    "w2_continuous",
    "w1_discrete",
    "w2_latent_vs_surrogate",
    "w2_surrogate_map",
]


@dataclass(frozen=True)
class QuantileFunction:
    """A nondecreasing map u -> F^{-1}(u), vectorized over numpy arrays.

    ``accuracy`` is the absolute error the callable promises.
    """

    func: Callable[[np.ndarray], np.ndarray]
    accuracy: float = 0.0
    name: str = ""

    def __call__(self, u):
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)


def latent_quantile_function(law: LatentSuccessLaw) -> QuantileFunction:
    """Quantile of ``Z`` extended by the support endpoints at u = 0 and u = 1."""

    def q(u):
        with np.errstate(divide="ignore", invalid="ignore"):
            return sc.ndtr((sc.ndtri(u) - law.delta) / law.rho)

    return QuantileFunction(q, accuracy=1e-15, name=f"Z(rho={law.rho:g}, delta={law.delta:g})")


def beta_quantile_function(a: float, b: float) -> QuantileFunction:
    return QuantileFunction(lambda u: beta_quantile(u, a, b), accuracy=1e-10, name=f"Beta({a:g}, {b:g})")


def _gauss_nodes(nodes_per_panel=8, inner_panels=40, tail_decades=14):
    # geometric panels toward each endpoint, uniform panels in the bulk
    edge = 10.0 ** -np.arange(tail_decades, 1, -1)
    inner = np.linspace(0.01, 0.99, inner_panels + 1)
    breaks = np.concatenate([[0.0], edge, inner, 1.0 - edge[::-1], [1.0]])
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    left, right = breaks[:-1], breaks[1:]
    half = 0.5 * (right - left)
    u = (0.5 * (left + right))[:, None] + half[:, None] * x[None, :]
    return u.ravel(), (half[:, None] * w[None, :]).ravel()


def _grid(bin_width, rule):
    """Evaluation points and weights on (0, 1)."""
    if rule == "gauss":
        return _gauss_nodes()
    if not (0.0 < bin_width < 1.0):
        raise DomainError("bin_width must lie in (0, 1)")
    k = int(math.ceil(1.0 / bin_width - 1e-9))
    if rule == "left":
        u = np.arange(k) * bin_width
    elif rule == "midpoint":
        u = (np.arange(k) + 0.5) * bin_width
    else:
        raise ValueError("rule must be 'left', 'midpoint' or 'gauss'")
    return u, np.full(k, bin_width)


def w2_continuous(qx, qy, bin_width: float = 1e-4, rule: str = "midpoint") -> float:
    """``sqrt(sum_k (qx(u_k) - qy(u_k))^2 * bin_width)`` over bins of (0, 1).

    ``rule="left"`` evaluates at bin left endpoints ``u_k = k * bin_width``
    (the plain binned sum); ``"midpoint"`` at bin centres. ``"gauss"`` ignores
    ``bin_width`` and uses composite Gauss-Legendre panels that refine
    geometrically toward 0 and 1, about 500 evaluations in all.

    With the left rule, a non-finite quantile at u = 0 (an unbounded support)
    drops that single bin; any other non-finite value raises ``DomainError``.
    """
    u, w = _grid(bin_width, rule)
    with np.errstate(invalid="ignore"):
        dx = qx(u) - qy(u)
    bad = ~np.isfinite(dx)
    if rule == "left" and bad[0]:
        bad[0] = False
        dx[0] = 0.0
    if bad.any():
        raise DomainError("quantile function returned a non-finite value inside (0, 1)")
    return math.sqrt(float(w @ (dx * dx)))


def _probs(p):
    return np.asarray(getattr(p, "probs", p), dtype=float)


def w1_discrete(p, q) -> float:
    """``sum_k |P(R <= k) - Q(R <= k)|`` for pmfs on the same rank set.

    Accepts ``RankPmf`` objects or plain probability vectors. Each term is
    taken from whichever side (lower CDF or upper tail) is smaller so that
    differences between tiny tail masses are not lost to rounding.
    """
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise DimensionError(f"pmfs have different supports: {p.shape} vs {q.shape}")
    cp, cq = np.cumsum(p), np.cumsum(q)
    # upper tails P(R > k), summed from the right
    sp = np.cumsum(p[::-1])[::-1][1:]
    sq = np.cumsum(q[::-1])[::-1][1:]
    lower = np.abs(cp[:-1] - cq[:-1])
    upper = np.abs(sp - sq)
    use_upper = np.minimum(sp, sq) < np.minimum(cp[:-1], cq[:-1])
    return float(np.where(use_upper, upper, lower).sum())


def w2_latent_vs_surrogate(
    rho: float, delta: float, bin_width: float = 1e-4, rule: str = "gauss", *, _grid_cache=None
) -> float:
    """W2 between ``Z`` and its moment-matched Beta surrogate."""
    law = LatentSuccessLaw(rho, delta)
    s = beta_surrogate(law)
    u, w, t = _grid_cache if _grid_cache is not None else _latent_grid(bin_width, rule)
    with np.errstate(invalid="ignore"):
        qz = sc.ndtr((t - delta) / rho)
    d = qz - beta_quantile(u, s.a, s.b)
    return math.sqrt(float(w @ (d * d)))


def _latent_grid(bin_width, rule):
    u, w = _grid(bin_width, rule)
    with np.errstate(divide="ignore"):
        return u, w, sc.ndtri(u)


def _map_row(args):
    rho, deltas, bin_width, rule = args
    cache = _latent_grid(bin_width, rule)
    return [w2_latent_vs_surrogate(rho, d, bin_width, rule, _grid_cache=cache) for d in deltas]


def w2_surrogate_map(rhos, deltas, bin_width: float = 1e-4, rule: str = "gauss", jobs: int = 1) -> np.ndarray:
    """W2(Z, surrogate) on the grid ``rhos x deltas``; rows follow ``rhos``.

    ``jobs > 1`` spreads rows over worker processes. Each point is computed
    independently, so the result does not depend on ``jobs``.
    """
    rhos = [float(r) for r in rhos]
    deltas = [float(d) for d in deltas]
    tasks = [(r, deltas, bin_width, rule) for r in rhos]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_map_row, tasks))
    else:
        rows = [_map_row(t) for t in tasks]
    return np.array(rows, dtype=float)
