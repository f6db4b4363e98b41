"""Problem data: history datum, right-hand side, boundary functional."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from .funcspace import GridFunction, grid_nodes, point_values, state_view
from .kernels import BcKind, KernelSet


class InvariantViolation(ValueError):
    """A problem callable produced a value outside its admissible range."""


@dataclass(frozen=True)
class HistoryDatum:
    """Initial function ``psi`` on [-r, 0], given analytically.

    ``psi(t, d)`` returns the d-th derivative (d = 0, 1, 2) and must accept
    arrays.
    """

    r: float
    psi: Callable[[np.ndarray, int], np.ndarray]
    check: bool = True

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"history horizon r must be positive, got {self.r}")
        if self.check:
            ts = np.linspace(-self.r, 0.0, 201)
            lo = float(np.min(self(ts, 0)))
            if lo < -1e-14:
                raise InvariantViolation(f"psi must be nonnegative on [-r, 0]; min is {lo}")
            for d in (1, 2):
                v = float(self(0.0, d))
                if v < -1e-14:
                    raise InvariantViolation(f"psi^({d})(0) must be nonnegative, got {v}")

    def __call__(self, t, d: int = 0):
        t = np.asarray(t, dtype=float)
        out = np.broadcast_to(np.asarray(self.psi(t, d), dtype=float), t.shape)
        return float(out) if out.ndim == 0 else np.array(out)

    def initial_data(self) -> tuple[float, float, float]:
        return tuple(float(self(0.0, d)) for d in range(3))

    @classmethod
    def zero(cls, r: float) -> "HistoryDatum":
        return cls(r, lambda t, d: np.zeros_like(t))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], r: float) -> "HistoryDatum":
        """psi(t) = sum coeffs[k] t^k."""
        p = np.polynomial.Polynomial(coeffs)
        derivs = (p, p.deriv(1), p.deriv(2))
        return cls(r, lambda t, d: derivs[d](t))


class GenericRHS:
    """Right-hand side ``F(t, view)`` with ``view(theta, d) = u^(d)(t + theta)``.

    Evaluated point by point; use :class:`DelayRHS` when F only reads a
    few point values of the state.
    """

    def __init__(self, func: Callable, lags: Sequence[float] = ()):
        self.func = func
        self.lags = tuple(float(x) for x in lags)

    def sample(self, u: GridFunction, psi: HistoryDatum, points: np.ndarray) -> np.ndarray:
        return np.array([float(self.func(t, state_view(u, psi, t))) for t in points])


class DelayRHS:
    """Right-hand side built from point evaluations of the state.

    ``taps`` lists ``(order, lag)`` pairs; ``f`` is called as
    ``f(t, v_1, ..., v_k)`` with ``v_i = u^(order_i)(t - lag_i)`` and must
    be vectorized.
    """

    def __init__(self, f: Callable, taps: Sequence[tuple[int, float]]):
        taps = tuple((int(d), float(lag)) for d, lag in taps)
        for d, lag in taps:
            if d not in (0, 1, 2):
                raise ValueError(f"tap order must be 0, 1 or 2, got {d}")
            if lag < 0:
                raise ValueError(f"lags must be nonnegative, got {lag}")
        self.f = f
        self.taps = taps

    @classmethod
    def dde(cls, f: Callable, r0: float, r1: float, r2: float) -> "DelayRHS":
        """``f(t, u(t), u'(t), u''(t), u(t-r0), u'(t-r1), u''(t-r2))``."""
        for lag in (r0, r1, r2):
            if not lag > 0:
                raise ValueError(f"delays must be positive, got {lag}")
        return cls(f, [(0, 0.0), (1, 0.0), (2, 0.0), (0, r0), (1, r1), (2, r2)])

    @property
    def lags(self) -> tuple[float, ...]:
        return tuple(lag for _, lag in self.taps if lag > 0)

    def sample(self, u: GridFunction, psi: HistoryDatum, points: np.ndarray) -> np.ndarray:
        args = [point_values(u, psi, points - lag, d) for d, lag in self.taps]
        return np.broadcast_to(np.asarray(self.f(points, *args), dtype=float), points.shape)


RightHandSide = GenericRHS | DelayRHS


def integrate_grid(g: GridFunction, values: np.ndarray) -> float:
    """Composite Simpson integral of nodal ``values`` over the whole grid, split at 0."""
    values = np.asarray(values, dtype=float)
    z = g.zero
    total = simpson(values[z:], x=g.nodes[z:])
    if z > 0:
        total += simpson(values[: z + 1], x=g.nodes[: z + 1])
    return float(total)


@dataclass(frozen=True)
class BoundaryFunctional:
    """``B[u]`` acting on the full sampled solution over [-r, 1]."""

    func: Callable[[GridFunction], float]
    label: str = ""

    @classmethod
    def constant(cls, c: float) -> "BoundaryFunctional":
        if c < 0:
            raise ValueError(f"constant boundary functional must be nonnegative, got {c}")
        return cls(lambda u: c, f"B = {c}")


# rho -> (delta(s), eta): lower bounds for F and B on the radius-rho boundary
BoundsFn = Callable[[float], tuple[Callable[[np.ndarray], np.ndarray], float]]


@dataclass(frozen=True)
class ProblemSpec:
    bc: BcKind
    psi: HistoryDatum
    rhs: GenericRHS | DelayRHS
    b: BoundaryFunctional
    label: str = ""
    bounds: BoundsFn | None = field(default=None, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bc", BcKind.of(self.bc))
        lags = self.rhs.lags
        if lags and max(lags) > self.psi.r + 1e-14:
            raise ValueError(
                f"history horizon r={self.psi.r} shorter than the largest delay {max(lags)}"
            )

    @property
    def r(self) -> float:
        return self.psi.r


def build_psihat(psi: HistoryDatum, ks: KernelSet, n: int) -> GridFunction:
    """Vertex of the translated cone: ``psi`` on [-r, 0] and
    ``gamma_0 psi(0) + gamma_1 psi'(0) + gamma_2 psi''(0)`` on (0, 1]."""
    nodes, zero = grid_nodes(psi.r, n, warn=True)
    data = psi.initial_data()
    past, main = nodes[:zero], nodes[zero:]
    tracks = []
    for d in range(3):
        ext = sum(c * ks.gamma(i, main, d) for i, c in enumerate(data))
        tracks.append(np.concatenate([psi(past, d), ext]))
    return GridFunction(psi.r, n, *tracks)


def sample_forcing(spec: ProblemSpec, u: GridFunction, points) -> np.ndarray:
    """F(s, u_s) at each point; raises if any value is negative or not finite."""
    points = np.asarray(points, dtype=float)
    vals = np.asarray(spec.rhs.sample(u, spec.psi, points), dtype=float)
    bad = ~np.isfinite(vals) | (vals < 0)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise InvariantViolation(
            f"right-hand side is {vals[k]} at t={points[k]}; it must be finite and >= 0"
        )
    return vals


def eval_rhs(spec: ProblemSpec, u: GridFunction, t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return float(sample_forcing(spec, u, np.array([t]))[0])


def eval_boundary_functional(spec: ProblemSpec, u: GridFunction) -> float:
    value = float(spec.b.func(u))
    if not np.isfinite(value) or value < 0:
        raise InvariantViolation(f"boundary functional returned {value}; it must be finite and >= 0")
    return value
