"""Composite Gauss-Legendre rules on partitioned intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre configuration.

    Attributes:
        panels: number of panels laid over [0, 1]; a piece of length L
            receives ``max(1, ceil(panels * L))`` of them.
        nodes_per_panel: Gauss-Legendre order on each panel (4..16).
    """

    panels: int = 16
    nodes_per_panel: int = 8

    def __post_init__(self):
        if self.panels < 8:
            raise ValueError(f"panels must be >= 8, got {self.panels}")
        if not 4 <= self.nodes_per_panel <= 16:
            raise ValueError(
                f"nodes_per_panel must be in 4..16, got {self.nodes_per_panel}"
            )

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(self.panels * factor, self.nodes_per_panel)


@lru_cache(maxsize=None)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panels_for(length: float, quad: QuadratureSpec) -> int:
    return max(1, math.ceil(quad.panels * length - 1e-12))


def composite_rule(
    breakpoints, quad: QuadratureSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes and weights of a composite rule over consecutive pieces.

    Each piece ``[breakpoints[i], breakpoints[i+1]]`` is split into
    equal panels in proportion to its length.

    Returns:
        ``(nodes, weights, piece)`` where ``piece[q]`` is the index of the
        piece containing node ``q``.
    """
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    x, w = _reference_rule(quad.nodes_per_panel)
    nodes, weights, piece = [], [], []
    for i, (a, b) in enumerate(zip(bp[:-1], bp[1:])):
        m = panels_for(b - a, quad)
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
        piece.append(np.full(m * x.size, i))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(piece)
