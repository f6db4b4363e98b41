"""Named problem presets configured by scalar parameters."""

from __future__ import annotations

from typing import Any, Callable, Mapping

import numpy as np
from scipy.integrate import simpson

from .funcspace import GridFunction
from .kernels import BcKind
from .problem import (
    BoundaryFunctional,
    DelayRHS,
    HistoryDatum,
    ProblemSpec,
)

EXAMPLE41_DELAYS = (0.5, 1.0 / 3.0, 0.25)

_REGISTRY: dict[str, Callable[..., ProblemSpec]] = {}


def preset(name: str):
    def register(builder):
        _REGISTRY[name] = builder
        return builder

    return register


def available() -> list[str]:
    return sorted(_REGISTRY)


def _one_minus_cos(t, d):
    if d == 0:
        return 1.0 - np.cos(t)
    if d == 1:
        return np.sin(t)
    return np.cos(t)


def _example41_f(t, u, du, u_lag, ddu_lag1, ddu_lag2):
    return t * np.exp(u + ddu_lag1**2) * (1.0 + du**2 + u_lag**2 + ddu_lag2**2)


def example41_functional(u: GridFunction) -> float:
    """1/(1 + u(1/2)^2) + int_{-1/2}^1 t^3 u''(t)^2 dt."""
    mid = u.eval(0.5, 0)
    keep = u.nodes >= -0.5 - 1e-12
    if not np.isclose(u.nodes[keep][0], -0.5, rtol=0, atol=1e-12):
        raise ValueError("the grid must contain t = -1/2; use an even n")
    z = u.zero - int(np.argmax(keep))
    t = u.nodes[keep]
    y = t**3 * u.d2[keep] ** 2
    total = simpson(y[z:], x=t[z:]) + simpson(y[: z + 1], x=t[: z + 1])
    return 1.0 / (1.0 + mid**2) + float(total)


@preset("example41")
def _example41(bc_j: int = 3, delays=EXAMPLE41_DELAYS, r: float | None = None) -> ProblemSpec:
    """u'''' + lam t e^{u(t) + u''(t-1/3)^2} (1 + u'(t)^2 + u(t-1/2)^2 + u''(t-1/4)^2) = 0,
    psi = 1 - cos t on [-1/2, 0], u^(j)(1) = lam B[u]."""
    r0, r1, r2 = (float(x) for x in delays)
    horizon = max(r0, r1, r2, 0.5) if r is None else float(r)
    rhs = DelayRHS(_example41_f, [(0, 0.0), (1, 0.0), (0, r0), (2, r1), (2, r2)])

    def bounds(rho):
        return (lambda s: np.asarray(s, dtype=float)), 1.0 / (1.0 + rho**2)

    return ProblemSpec(
        bc=BcKind(bc_j),
        psi=HistoryDatum(horizon, _one_minus_cos),
        rhs=rhs,
        b=BoundaryFunctional(example41_functional, "1/(1+u(1/2)^2) + int t^3 u''^2"),
        label="example41",
        bounds=bounds,
        params={"delays": (r0, r1, r2)},
    )


@preset("constant")
def _constant(bc_j: int = 3, c_F: float = 1.0, c_B: float = 1.0, r: float | None = None) -> ProblemSpec:
    """F = c_F, B = c_B, psi = 0."""
    c_F, c_B = float(c_F), float(c_B)
    if c_F < 0 or c_B < 0:
        raise ValueError("c_F and c_B must be nonnegative")
    rhs = DelayRHS(lambda t: np.full_like(t, c_F), [])
    return ProblemSpec(
        bc=BcKind(bc_j),
        psi=HistoryDatum.zero(0.25 if r is None else float(r)),
        rhs=rhs,
        b=BoundaryFunctional.constant(c_B),
        label="constant",
        bounds=lambda rho: ((lambda s: np.full_like(np.asarray(s, dtype=float), c_F)), c_B),
        params={"c_F": c_F, "c_B": c_B},
    )


@preset("polyforce")
def _polyforce(
    bc_j: int = 3, coeffs=(0.0, 1.0), c_B: float = 0.0, r: float | None = None
) -> ProblemSpec:
    """F(t, .) = sum coeffs[k] t^k (state independent), B = c_B, psi = 0."""
    p = np.polynomial.Polynomial([float(c) for c in coeffs])
    if p(np.linspace(0.0, 1.0, 1001)).min() < 0:
        raise ValueError("polynomial forcing must be nonnegative on [0, 1]")
    rhs = DelayRHS(lambda t: p(t), [])
    return ProblemSpec(
        bc=BcKind(bc_j),
        psi=HistoryDatum.zero(0.25 if r is None else float(r)),
        rhs=rhs,
        b=BoundaryFunctional.constant(float(c_B)),
        label="polyforce",
        bounds=lambda rho: (p, float(c_B)),
        params={"coeffs": tuple(p.coef), "c_B": float(c_B)},
    )


def make_preset(
    name: str,
    params: Mapping[str, Any] | None = None,
    bc_j: int | None = None,
    r: float | None = None,
) -> ProblemSpec:
    """Build a registered problem. ``bc_j`` and ``r`` override the preset defaults."""
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(available())}") from None
    kwargs = dict(params or {})
    if bc_j is not None:
        kwargs["bc_j"] = bc_j
    if r is not None:
        kwargs["r"] = r
    try:
        return builder(**kwargs)
    except TypeError as exc:
        raise ValueError(f"bad parameters for preset {name!r}: {exc}") from None
