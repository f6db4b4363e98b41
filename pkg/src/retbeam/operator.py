"""The perturbed Hammerstein operator

    (Fu)(t) = int_0^1 k(t, s) F(s, u_s) ds + gamma_3(t) B[u],   t in [0, 1],

with zero extension to [-r, 0), evaluated on all three derivative tracks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .funcspace import GridFunction
from .kernels import KernelSet, make_kernel_set
from .problem import (
    ProblemSpec,
    build_psihat,
    eval_boundary_functional,
    sample_forcing,
)
from .quadrature import QuadratureSpec, composite_rule


@dataclass(frozen=True, eq=False)
class KernelPlan:
    """Quadrature-weighted kernel rows for every grid node of [0, 1].

    ``rows[d][i, q] = w_q * d^d/dt^d k(t_i, s_q)``. Every grid node is a
    breakpoint of the composite rule, so each panel lies on one side of
    the kernel's diagonal seam. Grid nodes shifted by each delay are
    breakpoints too: delayed state values are read through piecewise
    interpolants whose pieces end there.
    """

    ks: KernelSet
    t: np.ndarray
    s: np.ndarray
    w: np.ndarray
    rows: tuple[np.ndarray, np.ndarray, np.ndarray]
    gamma3: tuple[np.ndarray, np.ndarray, np.ndarray]

    def integrate(self, values: np.ndarray, d: int = 0) -> np.ndarray:
        return self.rows[d] @ values


@lru_cache(maxsize=16)
def kernel_plan(
    j: int, n: int, quad: QuadratureSpec, lags: tuple[float, ...] = ()
) -> KernelPlan:
    """Build (and cache) the kernel rows for boundary kind ``j`` on the 1/n grid."""
    ks = make_kernel_set(j)
    t = np.arange(n + 1) / n
    bp = np.sort(np.concatenate([t] + [t + lag for lag in lags]))
    bp = bp[bp <= 1.0]
    bp = bp[np.concatenate([[True], np.diff(bp) > 1e-12])]
    bp[-1] = 1.0
    s, w, _ = composite_rule(bp, quad)
    rows = []
    for d in range(3):
        m = w[None, :] * ks.k(t[:, None], s[None, :], d)
        m.flags.writeable = False
        rows.append(m)
    gamma3 = tuple(ks.gamma(3, t, d) for d in range(3))
    return KernelPlan(ks, t, s, w, tuple(rows), gamma3)


@dataclass(frozen=True, eq=False)
class OperatorOutput:
    g: GridFunction
    b_value: float
    forcing_cache: np.ndarray


def _plan_for(spec: ProblemSpec, ks: KernelSet, n: int, quad: QuadratureSpec) -> KernelPlan:
    if ks.j != spec.bc.j:
        raise ValueError(f"kernel set j={ks.j} does not match problem j={spec.bc.j}")
    lags = tuple(sorted(set(round(x, 15) for x in spec.rhs.lags)))
    return kernel_plan(ks.j, n, quad, lags)


def apply(
    spec: ProblemSpec, ks: KernelSet, u: GridFunction, quad: QuadratureSpec | None = None
) -> OperatorOutput:
    """Evaluate the operator at ``u`` (defined on all of [-r, 1])."""
    quad = quad or QuadratureSpec()
    plan = _plan_for(spec, ks, u.n, quad)
    forcing = sample_forcing(spec, u, plan.s)
    b = eval_boundary_functional(spec, u)
    tracks = [plan.integrate(forcing, d) + b * plan.gamma3[d] for d in range(3)]
    g = GridFunction.zeros_like(u).with_main(*tracks)
    return OperatorOutput(g, b, forcing)


class HammersteinOperator:
    """The operator bound to one problem, grid and quadrature rule.

    Calling it with a shifted unknown ``w`` evaluates the operator at
    ``psihat + w``.
    """

    def __init__(self, spec: ProblemSpec, n: int = 256, quad: QuadratureSpec | None = None):
        self.spec = spec
        self.n = n
        self.quad = quad or QuadratureSpec()
        self.ks = make_kernel_set(spec.bc)
        self.psihat = build_psihat(spec.psi, self.ks, n)
        self.plan = _plan_for(spec, self.ks, n, self.quad)

    def __call__(self, w: GridFunction) -> OperatorOutput:
        return apply(self.spec, self.ks, self.psihat + w, self.quad)

    def zero(self) -> GridFunction:
        return GridFunction.zeros_like(self.psihat)


def operator_norm_lower_bound(
    ks: KernelSet,
    delta,
    eta: float,
    n: int = 256,
    quad: QuadratureSpec | None = None,
) -> float:
    """sup over grid t in [0, 1] of ``gamma_3(t) eta + int_0^1 k(t, s) delta(s) ds``.

    ``delta`` is a vectorized callable on [0, 1] (or a scalar constant).
    """
    if eta < 0:
        raise ValueError(f"eta must be nonnegative, got {eta}")
    plan = kernel_plan(ks.j, n, quad or QuadratureSpec())
    dv = delta(plan.s) if callable(delta) else delta
    dv = np.broadcast_to(np.asarray(dv, dtype=float), plan.s.shape)
    if np.any(dv < 0):
        raise ValueError("delta must be nonnegative")
    return float(np.max(plan.gamma3[0] * eta + plan.integrate(dv, 0)))
