"""Solution pairs ``(lam, u)`` with ``u = psihat + lam * F(u)`` on the sphere
``||u - psihat||_{[0,1],2} = rho``."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence


from .funcspace import ConeReport, GridFunction, c2_norm, cone_check
from .kernels import KernelSet, make_kernel_set
from .operator import HammersteinOperator, operator_norm_lower_bound
from .problem import ProblemSpec
from .quadrature import QuadratureSpec

log = logging.getLogger(__name__)

MIN_DAMPING = 1.0 / 16.0


class SolverError(RuntimeError):
    pass


class DegenerateOperator(SolverError):
    """The operator vanished at an iterate, so no radius can be matched."""


class NonConvergence(SolverError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolverOptions:
    n: int = 256
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    tol_fix: float = 1e-10
    tol_res: float = 1e-8
    max_iter: int = 500
    damping: float = 1.0

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"n must be >= 16, got {self.n}")
        if not (self.tol_fix > 0 and self.tol_res > 0 and self.max_iter > 0):
            raise ValueError("tolerances and max_iter must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")

    def refined(self) -> "SolverOptions":
        return replace(self, n=2 * self.n, quad=self.quad.refined())


@dataclass(frozen=True, eq=False)
class SolutionPair:
    lam: float
    rho: float
    u: GridFunction
    w: GridFunction
    residual: float
    iterations: int
    cone: ConeReport

    @property
    def norm_check(self) -> float:
        """Relative deviation of ||u - psihat|| from rho."""
        return abs(c2_norm(self.w) - self.rho) / self.rho

    @property
    def min_u(self) -> float:
        return float(self.u.vals.min())


def check_feasibility(delta, eta: float, ks: KernelSet, n: int = 256,
                      quad: QuadratureSpec | None = None) -> float:
    """Lower bound of ``||F u||`` over the radius-rho boundary; must be > 0."""
    return operator_norm_lower_bound(ks, delta, eta, n, quad)


def feasibility_value(spec: ProblemSpec, rho: float, opts: SolverOptions | None = None) -> float:
    """``check_feasibility`` with the lower bounds the problem declares at ``rho``."""
    if spec.bounds is None:
        raise ValueError(f"problem {spec.label!r} declares no lower bounds")
    opts = opts or SolverOptions()
    delta, eta = spec.bounds(rho)
    return check_feasibility(delta, eta, make_kernel_set(spec.bc), opts.n, opts.quad)


def _normalized(op: HammersteinOperator, w: GridFunction, rho: float):
    out = op(w)
    norm = c2_norm(out.g)
    if not norm > 0:
        raise DegenerateOperator(f"operator vanished at an iterate (rho={rho})")
    return out.g, rho / norm


def solve_at_rho(
    spec: ProblemSpec,
    rho: float,
    opts: SolverOptions | None = None,
    start: GridFunction | None = None,
    op: HammersteinOperator | None = None,
) -> SolutionPair:
    """Damped normalized fixed-point iteration on ``w = u - psihat``.

    Each step evaluates ``v = F(psihat + w)``, sets ``lam = rho / ||v||`` and
    moves ``w`` toward ``lam v``, renormalizing to radius ``rho``. The
    iteration stops when ``||w - lam v|| <= tol_fix * rho``; that ``w`` and
    ``lam`` are returned.

    Args:
        start: initial shifted unknown, rescaled to radius ``rho``; defaults
            to the direction of ``F(psihat)``.
        op: prebuilt operator matching ``opts`` (sweeps reuse one).

    Raises:
        DegenerateOperator: the operator vanished at an iterate.
        NonConvergence: ``max_iter`` reached.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    opts = opts or SolverOptions()
    op = op or HammersteinOperator(spec, opts.n, opts.quad)
    if spec.bounds is not None:
        feas = feasibility_value(spec, rho, opts)
        if feas <= 0:
            warnings.warn(f"feasibility value {feas} <= 0 at rho={rho}", stacklevel=2)

    if start is None:
        v, lam = _normalized(op, op.zero(), rho)
        w = lam * v
    else:
        norm = c2_norm(start)
        if not norm > 0:
            raise ValueError("start must be nonzero")
        w = (rho / norm) * start

    omega = opts.damping
    history: list[float] = []
    for it in range(1, opts.max_iter + 1):
        v, lam = _normalized(op, w, rho)
        target = lam * v
        residual = c2_norm(w - target)
        if residual <= opts.tol_fix * rho:
            if residual > opts.tol_res * rho:
                raise NonConvergence("residual above tol_res", residual, it)
            u = op.psihat + w
            return SolutionPair(lam, rho, u, w, residual, it, cone_check(w))
        history.append(residual)
        if (
            len(history) >= 4
            and history[-1] > history[-2] > history[-3] > history[-4]
            and omega > MIN_DAMPING
        ):
            omega = max(omega / 2, MIN_DAMPING)
            history.clear()
            log.debug("rho=%g: damping reduced to %g at iteration %d", rho, omega, it)
        mix = (1.0 - omega) * w + omega * target
        w = (rho / c2_norm(mix)) * mix
    raise NonConvergence(
        f"no convergence at rho={rho} after {opts.max_iter} iterations (residual {residual:.3e})",
        residual,
        opts.max_iter,
    )


@dataclass
class SweepResult:
    rho: float
    pair: SolutionPair | None = None
    error: SolverError | None = None


def sweep_rho(
    spec: ProblemSpec, rhos: Sequence[float], opts: SolverOptions | None = None
) -> list[SweepResult]:
    """Solve at each radius in turn, warm-starting from the previous solution."""
    rhos = [float(x) for x in rhos]
    if any(x <= 0 for x in rhos):
        raise ValueError("radii must be positive")
    if rhos != sorted(rhos):
        raise ValueError("radii must be sorted")
    opts = opts or SolverOptions()
    if not rhos:
        return []
    op = HammersteinOperator(spec, opts.n, opts.quad)
    results, start = [], None
    for rho in rhos:
        try:
            pair = solve_at_rho(spec, rho, opts, start=start, op=op)
        except SolverError as exc:
            log.warning("rho=%g: %s", rho, exc)
            results.append(SweepResult(rho, error=exc))
            continue
        results.append(SweepResult(rho, pair))
        start = pair.w
    return results
