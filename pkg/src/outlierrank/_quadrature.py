"""Quadrature nodes for expectations over the standardized outlier value.

With ``X0`` standardized to N(0, 1) and the in-group standardized to
N(delta, rho^2), every quantity of interest is ``E[h(Z)]`` where
``Z = Phi((y - delta) / rho)`` and ``y ~ N(0, 1)``. The integrand is smooth in
``y`` apart from a transition of width ``rho`` around ``y = delta``, so the
panel breakpoints are refined there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import LOG_SQRT_2PI


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre rule on the standardized outlier axis.

    ``halfwidth`` bounds the bulk of N(0, 1) (mass beyond 8 is below 1e-15).
    The range is stretched to ``delta +/- max(halfwidth, refine_span * rho)``
    so that tail integrals beyond the transition keep their relative accuracy,
    but never beyond ``max_abs`` where the normal density underflows.
    """

    halfwidth: float = 8.0
    panel_width: float = 0.25
    nodes_per_panel: int = 12
    refine_span: float = 12.0
    refine_step: float = 0.5
    max_abs: float = 38.0

    def __post_init__(self):
        if self.halfwidth <= 0 or self.panel_width <= 0 or self.refine_step <= 0:
            raise ValueError("quadrature widths must be positive")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be at least 2")


DEFAULT_QUADRATURE = QuadratureConfig()


def standard_normal_nodes(rho: float, delta: float, config: QuadratureConfig = DEFAULT_QUADRATURE):
    """Nodes ``y`` and log-weights such that ``sum(exp(logw) * h(y)) ~ E h(y)``.

    The log-weights already include the standard normal density.
    """
    reach = max(config.halfwidth, config.refine_span * rho)
    lo = max(-config.max_abs, min(-config.halfwidth, delta - reach))
    hi = min(config.max_abs, max(config.halfwidth, delta + reach))
    n_base = int(np.ceil((hi - lo) / config.panel_width))
    base = np.linspace(lo, hi, n_base + 1)
    offsets = np.arange(-config.refine_span, config.refine_span + 0.5 * config.refine_step, config.refine_step)
    refine = delta + rho * offsets
    refine = refine[(refine > lo) & (refine < hi)]
    breaks = np.unique(np.concatenate([base, refine]))
    breaks = breaks[np.concatenate([[True], np.diff(breaks) > 1e-12])]

    x, w = np.polynomial.legendre.leggauss(config.nodes_per_panel)
    left, right = breaks[:-1], breaks[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    y = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    logw = np.log(weights) - 0.5 * y * y - LOG_SQRT_2PI
    return y, logw
