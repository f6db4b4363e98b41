"""Sampled C^2 functions on [-r, 1] and the associated C^2 norm."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

MAIN = "main"
FULL = "full"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@lru_cache(maxsize=64)
def _nodes(m: int, n: int) -> np.ndarray:
    return _frozen(np.arange(-m, n + 1) / n)


def grid_nodes(r: float, n: int, warn: bool = False) -> tuple[np.ndarray, int]:
    """Uniform nodes over [-r', 1] with step 1/n and a node pinned at 0.

    ``r'`` is ``r`` rounded up to a whole number of steps. Returns the
    nodes and the index of ``t = 0``.
    """
    if r <= 0:
        raise ValueError(f"history horizon r must be positive, got {r}")
    if n < 16:
        raise ValueError(f"n must be >= 16, got {n}")
    steps = r * n
    m = math.ceil(steps - 1e-9)
    if warn and abs(m - steps) > 1e-9:
        warnings.warn(
            f"r={r} is not a multiple of h=1/{n}; history grid extended to {m}/{n}",
            stacklevel=3,
        )
    return _nodes(m, n), m


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values and first two derivatives of a function on a uniform grid.

    ``nodes`` run over ``[-m/n, 1]`` with ``nodes[zero] == 0.0`` exactly.
    Instances are immutable; arithmetic returns new objects.
    """

    r: float
    n: int
    vals: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        nodes, zero = grid_nodes(self.r, self.n)
        for name in ("vals", "d1", "d2"):
            arr = _frozen(getattr(self, name))
            if arr.shape != nodes.shape:
                raise ValueError(
                    f"{name} has shape {arr.shape}, expected {nodes.shape}"
                )
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "zero", zero)

    @classmethod
    def from_callable(cls, fn: Callable, r: float, n: int) -> "GridFunction":
        """Sample ``fn(t, d)`` for d = 0, 1, 2 at every node."""
        nodes, _ = grid_nodes(r, n, warn=True)
        return cls(r, n, *(np.broadcast_to(fn(nodes, d), nodes.shape) for d in range(3)))

    @classmethod
    def zeros(cls, r: float, n: int) -> "GridFunction":
        nodes, _ = grid_nodes(r, n, warn=True)
        z = np.zeros_like(nodes)
        return cls(r, n, z, z, z)

    @classmethod
    def zeros_like(cls, g: "GridFunction") -> "GridFunction":
        z = np.zeros_like(g.vals)
        return cls(g.r, g.n, z, z, z)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def left(self) -> float:
        return float(self.nodes[0])

    def tracks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.vals, self.d1, self.d2

    def track(self, d: int) -> np.ndarray:
        return self.tracks()[d]

    def main(self, d: int = 0) -> np.ndarray:
        """Track ``d`` restricted to the nodes of [0, 1]."""
        return self.track(d)[self.zero:]

    def history(self, d: int = 0) -> np.ndarray:
        return self.track(d)[: self.zero + 1]

    def _check_compatible(self, other: "GridFunction"):
        if self.n != other.n or self.nodes.size != other.nodes.size:
            raise ValueError("grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(
            self.r, self.n, self.vals + other.vals, self.d1 + other.d1, self.d2 + other.d2
        )

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.r, self.n, c * self.vals, c * self.d1, c * self.d2)

    __rmul__ = __mul__

    def with_main(self, vals, d1, d2) -> "GridFunction":
        """Copy with the [0, 1] part of every track replaced."""
        out = []
        for old, new in zip(self.tracks(), (vals, d1, d2)):
            arr = old.copy()
            arr[self.zero:] = new
            out.append(arr)
        return GridFunction(self.r, self.n, *out)

    def eval(self, t, d: int = 0):
        """Evaluate the d-th derivative at arbitrary points of the grid range.

        Nodes return stored values exactly. Between nodes, ``d = 0, 1`` use
        cubic Hermite interpolation of the pair (track d, track d+1); ``d = 2``
        uses the cubic through the four nearest nodes. Stencils never cross
        ``t = 0``, where the third derivative may jump.
        """
        if d not in (0, 1, 2):
            raise ValueError(f"derivative order must be 0, 1 or 2, got {d}")
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.nodes[0], self.nodes[-1]
        if np.any(t < lo - 1e-13) or np.any(t > hi + 1e-13):
            bad = t[(t < lo - 1e-13) | (t > hi + 1e-13)][0]
            raise ValueError(f"t={bad} outside the grid range [{lo}, {hi}]")
        x = (np.clip(t, lo, hi) - lo) * self.n
        last = self.nodes.size - 1
        i = np.clip(np.floor(x).astype(int), 0, last - 1)
        theta = x - i
        if d < 2:
            y, dy = self.track(d), self.track(d + 1)
            h = self.h
            t2, t3 = theta * theta, theta**3
            h00 = 2 * t3 - 3 * t2 + 1
            h10 = t3 - 2 * t2 + theta
            h01 = -2 * t3 + 3 * t2
            h11 = t3 - t2
            out = h00 * y[i] + h * h10 * dy[i] + h01 * y[i + 1] + h * h11 * dy[i + 1]
        else:
            out = self._lagrange_d2(x, i)
        exact = np.isclose(theta, 0.0, rtol=0, atol=1e-12)
        out = np.where(exact, self.track(d)[i], out)
        exact_r = np.isclose(theta, 1.0, rtol=0, atol=1e-12)
        out = np.where(exact_r, self.track(d)[np.minimum(i + 1, last)], out)
        return float(out[0]) if scalar else out

    def _lagrange_d2(self, x: np.ndarray, i: np.ndarray) -> np.ndarray:
        y = self.d2
        last = self.nodes.size - 1
        seg_lo = np.where(i >= self.zero, self.zero, 0)
        seg_hi = np.where(i >= self.zero, last, self.zero)
        start = np.clip(i - 1, seg_lo, seg_hi - 3)
        u = x - start
        out = np.zeros_like(x)
        for a in range(4):
            basis = np.ones_like(x)
            for b in range(4):
                if b != a:
                    basis *= (u - b) / (a - b)
            out += basis * y[start + a]
        return out


def c2_norm(g: GridFunction, interval: str = MAIN) -> float:
    """Max of |g|, |g'|, |g''| over the nodes of [0, 1] (``main``) or all nodes (``full``)."""
    if interval == MAIN:
        sl = slice(g.zero, None)
    elif interval == FULL:
        sl = slice(None)
    else:
        raise ValueError(f"interval must be {MAIN!r} or {FULL!r}, got {interval!r}")
    return float(max(np.abs(tr[sl]).max() for tr in g.tracks()))


class HistoryView:
    """The state ``u_t``: ``theta -> u^(d)(t + theta)`` for theta in [-r, 0].

    Arguments at or before 0 are served by the analytic history datum,
    later ones by the grid.
    """

    def __init__(self, g: GridFunction, psi: Callable, t: float, r: float):
        self.g = g
        self.psi = psi
        self.t = float(t)
        self.r = float(r)

    def __call__(self, theta, d: int = 0):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta > 1e-15) or np.any(theta < -self.r - 1e-12):
            raise ValueError(f"theta must lie in [-{self.r}, 0]")
        return point_values(self.g, self.psi, self.t + theta, d)


def point_values(g: GridFunction, psi: Callable, points, d: int):
    """u^(d) at arbitrary points: ``psi`` for points <= 0, grid interpolation after."""
    points = np.asarray(points, dtype=float)
    scalar = points.ndim == 0
    p = np.atleast_1d(points)
    past = p <= 0.0
    out = np.empty_like(p)
    if np.any(past):
        out[past] = psi(p[past], d)
    if not np.all(past):
        out[~past] = g.eval(p[~past], d)
    return float(out[0]) if scalar else out


def state_view(g: GridFunction, psi, t: float) -> HistoryView:
    """History view ``u_t`` of ``g`` completed by the history datum ``psi``.

    ``psi`` is either a callable ``psi(t, d)`` or an object with such a
    ``__call__`` and an ``r`` attribute.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return HistoryView(g, psi, t, getattr(psi, "r", g.r))


@dataclass(frozen=True)
class ConeReport:
    min_value: float
    history_flatness: float
    tol: float

    @property
    def member(self) -> bool:
        return self.min_value >= -self.tol and self.history_flatness <= self.tol


def cone_check(w: GridFunction, tol: float = 1e-10) -> ConeReport:
    """Membership diagnostics for the cone of nonnegative C^2 functions flat on [-r, 0]."""
    flat = max(float(np.abs(tr).max()) for tr in (w.history(0), w.history(1), w.history(2)))
    return ConeReport(float(w.vals.min()), flat, tol)
