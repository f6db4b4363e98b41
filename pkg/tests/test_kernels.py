from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retbeam.kernels import BcKind, kernel_row_integral, make_kernel_set
from retbeam.quadrature import QuadratureSpec, composite_rule

# u(t) = int_0^1 k(t,s) s^p ds at t = 0.3, 0.7, 1, from a symbolic solve of the
# defining BVP (-u'''' = s^p, clamped at 0, u^(j)(1) = 0)
RECONSTRUCTION = {
    (0, 0): ("63/80000", "343/80000", "0"),
    (0, 1): ("819/4000000", "5831/4000000", "0"),
    (0, 3): ("12753/400000000", "124117/400000000", "0"),
    (1, 0): ("93/80000", "6517/720000", "1/72"),
    (1, 2): ("5919/40000000", "568351/360000000", "1/360"),
    (2, 0): ("153/80000", "4459/240000", "1/24"),
    (2, 3): ("629271/2800000000", "1104117/400000000", "1/140"),
    (3, 0): ("333/80000", "3773/80000", "1/8"),
    (3, 1): ("8919/4000000", "108731/4000000", "3/40"),
    (3, 2): ("59919/40000000", "6742351/360000000", "19/360"),
}


# expanded piecewise forms, times 6; the j=2 upper branch here is the squared
# variant, which breaks continuity, so only its lower branch is compared
def expanded_kernel(j, t, s):
    if j == 0:
        up = t**3 * (1 - s) ** 3
        lo = s * (1 - t) * (s**2 * t**2 - 3 * s * t**2 + 3 * t**2 + s**2 * t - 3 * s * t + s**2)
    elif j == 1:
        up = t**3 * (1 - s) ** 2
        lo = s * (s * t**3 - 2 * t**3 + 3 * t**2 - 3 * s * t + s**2)
    elif j == 2:
        up = t**3 * (1 - s) ** 2
        lo = s * (-(t**3) + 3 * t**2 - 3 * s * t + s**2)
    else:
        up = t**3
        lo = s * (3 * t**2 - 3 * t * s + s**2)
    return np.where(t <= s, up, lo) / 6


def test_bc_kind_rejects_bad_values():
    for bad in (-1, 4, 1.5, True):
        with pytest.raises(ValueError):
            BcKind(bad)
    assert BcKind.of(2) == BcKind(2)


@pytest.mark.parametrize("j, t, s, d, expected", [
    (3, 1.0, 1.0, 0, 1 / 6),
    (0, 0.5, 0.25, 0, 19 / 3072),
    (1, 0.0, 0.5, 0, 0.0),
    (2, 0.0, 0.5, 1, 0.0),
])
def test_kernel_values(j, t, s, d, expected):
    assert make_kernel_set(j).k(t, s, d) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("j, i, t, d, expected", [
    (3, 3, 1.0, 0, 1 / 6),
    (0, 0, 1.0, 0, 0.0),
    (1, 3, 1.0, 1, 1.0),
    (1, 3, 1.0, 0, 1 / 3),
    (2, 2, 1.0, 2, 0.0),
    (0, 2, 0.5, 0, 0.0625),
])
def test_gamma_values(j, i, t, d, expected):
    assert make_kernel_set(j).gamma(i, t, d) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("j", [0, 1, 3])
def test_matches_expanded_kernels(j):
    t, s = np.meshgrid(np.linspace(0, 1, 41), np.linspace(0, 1, 41))
    assert np.allclose(make_kernel_set(j).k(t, s), expanded_kernel(j, t, s), atol=1e-15)


def test_j2_matches_expanded_lower_branch_only():
    t, s = np.meshgrid(np.linspace(0, 1, 41), np.linspace(0, 1, 41))
    ks = make_kernel_set(2)
    lower = t > s
    assert np.allclose(ks.k(t, s)[lower], expanded_kernel(2, t, s)[lower], atol=1e-15)
    assert np.allclose(ks.k(t, s)[~lower], (t**3 * (1 - s) / 6)[~lower], atol=1e-15)


def test_gamma_boundary_data(ks):
    j = ks.j
    for i in range(4):
        data = [ks.gamma(i, 0.0, 0), ks.gamma(i, 0.0, 1), ks.gamma(i, 0.0, 2), ks.gamma(i, 1.0, j)]
        expected = np.eye(4)[i]
        assert np.allclose(data, expected, atol=1e-14), (i, data)
        t = np.linspace(0, 1, 11)
        assert np.all(ks.gamma(i, t, 4) == 0)


def test_kernel_left_end_clamped(ks):
    s = np.linspace(0, 1, 51)
    for d in range(3):
        assert np.all(ks.k(0.0, s, d) == 0)


def test_kernel_right_end_condition(ks):
    s = np.linspace(0, 1, 51)
    assert np.allclose(ks.k(1.0, s, ks.j), 0, atol=1e-14)


def test_third_derivative_jump(ks):
    s = np.linspace(0.01, 0.99, 50)
    jump = ks.k(s, s, 3) - ks.k(s - 1e-9, s, 3)
    assert np.allclose(jump, -1.0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(j=st.integers(0, 3), t=st.floats(1e-3, 1 - 1e-3), d=st.integers(0, 2))
def test_diagonal_continuity(j, t, d):
    ks = make_kernel_set(j)
    gap = 1e-9
    assert abs(ks.k(t - gap / 2, t, d) - ks.k(t + gap / 2, t, d)) <= 1e-8


def test_nonnegative_on_grid(ks):
    x = np.linspace(0, 1, 200)
    t, s = np.meshgrid(x, x)
    assert ks.k(t, s).min() >= -1e-14
    for i in range(4):
        assert ks.gamma(i, x).min() >= -1e-14


@pytest.mark.parametrize("key", sorted(RECONSTRUCTION))
def test_row_integral_against_symbolic_values(key):
    j, p = key
    ks = make_kernel_set(j)
    for t, frac in zip((0.3, 0.7, 1.0), RECONSTRUCTION[key]):
        got = kernel_row_integral(ks, t, 0, lambda s: s**p)
        assert got == pytest.approx(float(Fr(frac)), abs=1e-15)


def test_row_integral_zero_forcing(ks):
    assert kernel_row_integral(ks, 0.4, 1, lambda s: 0.0 * s) == 0.0


def test_row_integral_rejects_bad_arguments(ks):
    with pytest.raises(ValueError):
        kernel_row_integral(ks, 1.5, 0, np.ones_like)
    with pytest.raises(ValueError):
        kernel_row_integral(ks, 0.5, 3, np.ones_like)


def test_row_integral_smooth_forcing_against_quad(ks):
    from scipy.integrate import quad

    t = 0.37
    f = lambda s: np.exp(s) * np.cos(3 * s)
    ref = quad(lambda s: ks.k(t, s, 1) * f(s), 0, t)[0] + quad(lambda s: ks.k(t, s, 1) * f(s), t, 1)[0]
    assert kernel_row_integral(ks, t, 1, f, QuadratureSpec(8, 8)) == pytest.approx(ref, abs=1e-13)


def _third_derivative_row(ks, t, y):
    bp = [0.0, 1.0] if t in (0.0, 1.0) else [0.0, t, 1.0]
    s, w, _ = composite_rule(bp, QuadratureSpec())
    return float(np.dot(w * ks.k(t, s, 3), y(s)))


@pytest.mark.parametrize("p", [0, 1, 2, 3])
def test_greens_reconstruction(ks, p):
    y = lambda s: s**p
    left = [kernel_row_integral(ks, 0.0, d, y) for d in range(3)]
    assert max(map(abs, left)) <= 1e-10
    if ks.j < 3:
        right = kernel_row_integral(ks, 1.0, ks.j, y)
    else:
        right = _third_derivative_row(ks, 1.0, y)
    assert abs(right) <= 1e-8
    h = 1e-2
    for t in (0.25, 0.5, 0.8):
        f = [kernel_row_integral(ks, t + k * h, 2, y) for k in (-2, -1, 0, 1, 2)]
        fourth = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        assert fourth == pytest.approx(-y(t), abs=1e-6)
