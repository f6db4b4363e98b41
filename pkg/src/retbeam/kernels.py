"""Green's kernels and boundary cubics for the clamped-left fourth-order problem.

For each boundary kind ``j`` the homogeneous problem

    -u''''(t) = y(t),   u(0) = u'(0) = u''(0) = 0,   u^(j)(1) = 0

is solved by ``u(t) = int_0^1 k(t, s) y(s) ds`` with

    k(t, s) = [ (1 - s)^(3-j) t^3 - (t - s)_+^3 ] / 6.

The first term is the branch valid for ``t <= s``; subtracting the
truncated cube produces the ``t >= s`` branch. Both are cubics in ``t``
and every derivative is taken term by term, so no differencing enters
the evaluation path.

The cubics ``gamma_0 .. gamma_3`` solve ``u'''' = 0`` with one unit datum
among ``u(0), u'(0), u''(0), u^(j)(1)`` and zeros elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import QuadratureSpec, composite_rule

__all__ = [
    "BcKind",
    "KernelSet",
    "make_kernel_set",
    "kernel_row_integral",
]


@dataclass(frozen=True)
class BcKind:
    """Order ``j`` of the derivative prescribed at ``t = 1``."""

    j: int

    def __post_init__(self):
        if isinstance(self.j, bool) or self.j not in (0, 1, 2, 3):
            raise ValueError(f"boundary kind j must be one of 0, 1, 2, 3; got {self.j!r}")

    @classmethod
    def of(cls, value: "BcKind | int") -> "BcKind":
        return value if isinstance(value, BcKind) else cls(int(value))


def _monomial(t, p: int, d: int):
    """d-th derivative of t**p."""
    if d > p:
        return np.zeros_like(np.asarray(t, dtype=float))
    return math.perm(p, d) * np.asarray(t, dtype=float) ** (p - d)


class KernelSet:
    """Kernel ``k`` and cubics ``gamma_i`` for one boundary kind.

    ``k(t, s, d)`` is the d-th partial derivative in ``t`` (``d`` in 0..3);
    on the diagonal ``t == s`` the ``t >= s`` branch is used.
    ``gamma(i, t, d)`` is the d-th derivative of ``gamma_i`` (``d`` in 0..4).
    Both broadcast over array arguments.
    """

    def __init__(self, bc: BcKind):
        self.bc = bc
        j = bc.j
        # gamma_i = t^i/i! - c_i t^3 (i < 3), gamma_3 = t^3 / (d^j t^3 at 1)
        cubic_at_one = math.perm(3, j)
        coeffs = []
        for i in range(3):
            at_one = math.perm(i, j) / math.factorial(i) if j <= i else 0.0
            coeffs.append((i, 1.0 / math.factorial(i), at_one / cubic_at_one))
        self._gamma_coeffs = tuple(coeffs)
        self._gamma3_coeff = 1.0 / cubic_at_one

    @property
    def j(self) -> int:
        return self.bc.j

    def __repr__(self):
        return f"KernelSet(j={self.j})"

    def upper_weight(self, s):
        """Coefficient ``(1 - s)^(3-j)`` of ``t^3/6`` in the ``t <= s`` branch."""
        return (1.0 - np.asarray(s, dtype=float)) ** (3 - self.j)

    def k(self, t, s, d: int = 0):
        if d not in (0, 1, 2, 3):
            raise ValueError(f"kernel derivative order must be 0..3, got {d}")
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        upper = self.upper_weight(s) * _monomial(t, 3, d)
        diff = t - s
        lower = upper - _monomial(diff, 3, d)
        return np.where(diff >= 0.0, lower, upper) / 6.0

    def gamma(self, i: int, t, d: int = 0):
        if i not in (0, 1, 2, 3):
            raise ValueError(f"gamma index must be 0..3, got {i}")
        if d not in (0, 1, 2, 3, 4):
            raise ValueError(f"gamma derivative order must be 0..4, got {d}")
        if i == 3:
            return self._gamma3_coeff * _monomial(t, 3, d)
        p, lead, cubic = self._gamma_coeffs[i]
        return lead * _monomial(t, p, d) - cubic * _monomial(t, 3, d)


def make_kernel_set(bc: BcKind | int) -> KernelSet:
    return KernelSet(BcKind.of(bc))


def kernel_row_integral(
    ks: KernelSet,
    t: float,
    d: int,
    forcing: Callable[[np.ndarray], np.ndarray],
    quad: QuadratureSpec | None = None,
) -> float:
    """Compute ``int_0^1 d^d/dt^d k(t, s) forcing(s) ds``.

    The s-range is split at ``s = t`` so each piece sees a single
    polynomial branch of the kernel.

    Args:
        forcing: vectorized callable on [0, 1].
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if d not in (0, 1, 2):
        raise ValueError(f"row integrals are defined for d in 0..2, got {d}")
    quad = quad or QuadratureSpec()
    bp = [0.0, 1.0] if t in (0.0, 1.0) else [0.0, t, 1.0]
    s, w, _ = composite_rule(bp, quad)
    fs = np.broadcast_to(np.asarray(forcing(s), dtype=float), s.shape)
    return float(np.dot(w * ks.k(t, s, d), fs))
