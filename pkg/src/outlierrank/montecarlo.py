"""Seeded simulation of latent utilities and their ranks.

The only source of randomness is numpy's ``Philox`` counter-based generator
(Random123 Philox4x64-10), keyed per replication block from
``SeedSequence([seed, block])``. Uniforms come from ``Generator.random`` and
every other variate is an explicit inverse-CDF transform, so a table depends
only on ``(config, seed)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from .classical import GammaRaceModel
from .errors import DomainError
from .latent import LatentSuccessLaw, OutlierModel
from .ranks import RankPmf

__all__ = [
    "GenericModel",
    "SimConfig",
    "EmpiricalRankTable",
    "EmpiricalRankingTable",
    "uniforms",
    "standard_normals",
    "simulate_outlier_ranks",
    "simulate_rankings",
    "sample_z",
]

# values per block; block boundaries are fixed so results never depend on how
# blocks are scheduled
_BLOCK_VALUES = 1 << 22


@dataclass(frozen=True, eq=False)
class GenericModel:
    """Independent utilities from one family with per-item parameters.

    ``family`` is ``"normal"`` (loc = mean, scale = sd), ``"gumbel"``
    (maximum-type, loc and scale) or ``"exponential"`` (scale = 1 / rate;
    loc ignored).
    """

    locs: np.ndarray
    scales: np.ndarray
    family: str = "normal"

    def __post_init__(self):
        locs = np.asarray(self.locs, dtype=float)
        scales = np.asarray(self.scales, dtype=float)
        locs, scales = np.broadcast_arrays(locs, scales)
        if not (np.isfinite(scales) & (scales > 0)).all() or not np.isfinite(locs).all():
            raise DomainError("parameters must be finite with positive scales")
        if self.family not in ("normal", "gumbel", "exponential"):
            raise DomainError("family must be normal, gumbel or exponential")
        object.__setattr__(self, "locs", np.array(locs))
        object.__setattr__(self, "scales", np.array(scales))


@dataclass(frozen=True)
class SimConfig:
    replications: int
    seed: int
    model: OutlierModel | GammaRaceModel | GenericModel

    def __post_init__(self):
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainError("replications must be an integer >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class EmpiricalRankTable:
    """Simulated ranks of the outlier and of tracked in-group members.

    ``marginal[k - 1]`` counts ``R0 = k``. ``joint`` maps tuples
    ``(R0, R_{i_1}, ..., R_{i_m})`` for the tracked indices to counts.
    """

    n: int
    replications: int
    seed: int
    marginal: np.ndarray
    tracked: tuple[int, ...] = ()
    joint: dict = field(default_factory=dict)

    def frequencies(self) -> np.ndarray:
        return self.marginal / self.replications

    def to_pmf(self) -> RankPmf:
        return RankPmf(self.n, self.frequencies(), "monte-carlo")

    def in_group_marginal(self, index: int) -> np.ndarray:
        """Counts of ``R_index = k`` for a tracked in-group index."""
        pos = self.tracked.index(index) + 1
        out = np.zeros(self.n + 1, dtype=np.int64)
        for key, c in self.joint.items():
            out[key[pos] - 1] += c
        return out


@dataclass(frozen=True, eq=False)
class EmpiricalRankingTable:
    """Counts of complete ranking vectors ``r`` (1 = smallest)."""

    replications: int
    seed: int
    counts: dict

    def frequency(self, ranking) -> float:
        return self.counts.get(tuple(int(v) for v in np.asarray(getattr(ranking, "r", ranking))), 0) / self.replications


def _blocks(replications: int, width: int):
    rows = max(1, _BLOCK_VALUES // max(width, 1))
    for b, start in enumerate(range(0, replications, rows)):
        yield b, min(rows, replications - start)


def _generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def uniforms(rng: np.random.Generator, size) -> np.ndarray:
    """Uniforms on (0, 1); the generator's exact zero (probability 2^-53) is nudged up."""
    u = rng.random(size)
    u[u == 0.0] = 2.0**-53
    return u


def standard_normals(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normals by the inverse-CDF method."""
    return sc.ndtri(uniforms(rng, size))


def _outlier_utilities(model: OutlierModel, rng, rows):
    # column 0 is the outlier; all values standardized by the outlier's law
    x = standard_normals(rng, (rows, model.n + 1))
    x[:, 1:] = model.delta + model.rho * x[:, 1:]
    return x


def simulate_outlier_ranks(config: SimConfig, track=()) -> EmpiricalRankTable:
    """Simulate ``R0 = sum_j 1{X_j <= X0}`` and, optionally, in-group ranks.

    ``track`` lists in-group indices (1..n) whose ranks are recorded jointly
    with ``R0``. In-group ranks count weak inequalities over all ``n + 1``
    values, which matches a sort with index tie-break since ties have
    probability zero.
    """
    model = config.model
    if not isinstance(model, OutlierModel):
        raise TypeError("simulate_outlier_ranks needs an OutlierModel")
    n = model.n
    track = tuple(int(i) for i in track)
    if any(i < 1 or i > n for i in track) or len(set(track)) != len(track):
        raise DomainError(f"tracked indices must be distinct and lie in 1..{n}")
    marginal = np.zeros(n + 1, dtype=np.int64)
    joint: Counter = Counter()
    for block, rows in _blocks(config.replications, n + 1):
        x = _outlier_utilities(model, _generator(config.seed, block), rows)
        r0 = (x[:, 1:] <= x[:, :1]).sum(axis=1) + 1
        marginal += np.bincount(r0 - 1, minlength=n + 1)
        if track:
            cols = [r0] + [(x <= x[:, [i]]).sum(axis=1) for i in track]
            keys, counts = np.unique(np.column_stack(cols), axis=0, return_counts=True)
            for key, c in zip(map(tuple, keys.tolist()), counts.tolist()):
                joint[key] += c
    return EmpiricalRankTable(n, config.replications, int(config.seed), marginal, track, dict(joint))


def _utilities(model, rng, rows):
    if isinstance(model, OutlierModel):
        return _outlier_utilities(model, rng, rows)
    if isinstance(model, GammaRaceModel):
        # a Gamma(s, lambda) variate is a sum of s independent Exp(lambda)
        k = model.lambdas.size
        e = -np.log1p(-uniforms(rng, (rows, k, model.s))).sum(axis=2)
        return e / model.lambdas[None, :]
    u = uniforms(rng, (rows, model.locs.size))
    if model.family == "normal":
        return model.locs + model.scales * sc.ndtri(u)
    if model.family == "gumbel":
        return model.locs - model.scales * np.log(-np.log(u))
    return -np.log1p(-u) * model.scales


def simulate_rankings(config: SimConfig) -> EmpiricalRankingTable:
    """Counts of complete rankings (rank 1 = smallest utility)."""
    model = config.model
    if isinstance(model, OutlierModel):
        width = model.n + 1
    elif isinstance(model, GammaRaceModel):
        width = model.lambdas.size * model.s
    else:
        width = model.locs.size
    counts: Counter = Counter()
    for block, rows in _blocks(config.replications, width):
        x = _utilities(model, _generator(config.seed, block), rows)
        ranks = np.argsort(np.argsort(x, axis=1, kind="stable"), axis=1, kind="stable") + 1
        keys, c = np.unique(ranks, axis=0, return_counts=True)
        for key, v in zip(map(tuple, keys.tolist()), c.tolist()):
            counts[key] += v
    return EmpiricalRankingTable(config.replications, int(config.seed), dict(counts))


def sample_z(law: LatentSuccessLaw, m: int, seed: int) -> np.ndarray:
    """``m`` draws of ``Z = Phi((X0 - delta) / rho)`` with ``X0 ~ N(0, 1)``."""
    if int(m) != m or m < 2:
        raise DomainError("m must be an integer >= 2")
    out = np.empty(int(m))
    for block, rows in _blocks(int(m), 1):
        start = block * _BLOCK_VALUES
        x = standard_normals(_generator(seed, block), rows)
        out[start : start + rows] = sc.ndtr((x - law.delta) / law.rho)
    return out
