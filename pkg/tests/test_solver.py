import numpy as np
import pytest

from retbeam.funcspace import c2_norm
from retbeam.kernels import make_kernel_set
from retbeam.presets import make_preset
from retbeam.problem import BoundaryFunctional, build_psihat, DelayRHS, HistoryDatum, ProblemSpec
from retbeam.solver import (
    DegenerateOperator,
    NonConvergence,
    SolverOptions,
    check_feasibility,
    feasibility_value,
    solve_at_rho,
    sweep_rho,
)

OPTS = SolverOptions(n=64)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 3.0])
def test_constant_preset_closed_form(rho):
    spec = make_preset("constant")
    pair = solve_at_rho(spec, rho, OPTS)
    assert pair.lam == pytest.approx(2 * rho / 3, abs=1e-12)
    assert pair.iterations == 1
    assert pair.residual <= 1e-12
    t = pair.u.nodes[pair.u.zero:]
    assert np.allclose(pair.w.main(0), pair.lam * (-t**4 / 24 + t**3 / 3), atol=1e-14)


@pytest.mark.parametrize("rho", [0.3, 1.0, 4.0])
def test_boundary_term_only(rho):
    spec = make_preset("constant", {"c_F": 0.0, "c_B": 1.0})
    pair = solve_at_rho(spec, rho, OPTS)
    assert pair.lam == pytest.approx(rho, abs=1e-12)
    t = pair.u.nodes[pair.u.zero:]
    assert np.allclose(pair.u.main(0), rho * t**3 / 6, atol=1e-14)


def test_polyforce_scaling_law():
    spec = make_preset("polyforce", {"coeffs": [1.0, 0.0, 3.0], "c_B": 0.5}, bc_j=1)
    lams = [solve_at_rho(spec, rho, OPTS).lam for rho in (0.5, 1.0, 2.0)]
    assert lams[1] == pytest.approx(2 * lams[0], rel=1e-13)
    assert lams[2] == pytest.approx(2 * lams[1], rel=1e-13)


def test_degenerate_operator():
    spec = make_preset("constant", {"c_F": 0.0, "c_B": 0.0})
    with pytest.warns(UserWarning, match="feasibility"), pytest.raises(DegenerateOperator):
        solve_at_rho(spec, 1.0, OPTS)


def test_nonconvergence_reported():
    spec = make_preset("example41")
    with pytest.raises(NonConvergence) as info:
        solve_at_rho(spec, 1.0, SolverOptions(n=64, max_iter=2))
    assert info.value.iterations == 2
    assert info.value.residual > 0


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(damping=0.0)
    with pytest.raises(ValueError):
        SolverOptions(damping=1.5)
    with pytest.raises(ValueError):
        SolverOptions(n=8)
    with pytest.raises(ValueError):
        solve_at_rho(make_preset("constant"), -1.0, OPTS)


@pytest.mark.parametrize("j", range(4))
def test_example41_pair_properties(j):
    spec = make_preset("example41", bc_j=j)
    pair = solve_at_rho(spec, 1.0, OPTS)
    assert pair.lam > 0
    assert pair.residual <= OPTS.tol_res * pair.rho
    psihat = build_psihat(spec.psi, make_kernel_set(j), 64)
    assert c2_norm(pair.u - psihat - pair.w, "full") <= 1e-15
    assert abs(c2_norm(pair.w) - 1.0) <= 1e-9
    assert pair.norm_check <= OPTS.tol_fix
    assert pair.min_u >= -1e-10
    assert pair.cone.member
    assert pair.cone.history_flatness <= 1e-12


def test_fixed_point_equation_holds():
    from retbeam.operator import HammersteinOperator

    spec = make_preset("example41")
    pair = solve_at_rho(spec, 0.8, OPTS)
    op = HammersteinOperator(spec, 64)
    rhs = op.psihat + pair.lam * op(pair.w).g
    assert c2_norm(pair.u - rhs, "full") <= 1e-8 * pair.rho


def test_damping_reaches_same_fixed_point():
    spec = make_preset("example41")
    a = solve_at_rho(spec, 1.0, OPTS)
    b = solve_at_rho(spec, 1.0, SolverOptions(n=64, damping=0.5))
    assert b.lam == pytest.approx(a.lam, rel=1e-9)
    assert b.iterations > a.iterations


def test_refinement_changes_lambda_little():
    spec = make_preset("example41", bc_j=2)
    a = solve_at_rho(spec, 0.7, SolverOptions(n=128))
    b = solve_at_rho(spec, 0.7, SolverOptions(n=128, quad=SolverOptions().quad.refined()))
    assert b.lam == pytest.approx(a.lam, rel=1e-7)


def test_sweep_constant():
    results = sweep_rho(make_preset("constant"), [1, 2, 3], OPTS)
    assert [r.pair.lam for r in results] == pytest.approx([2 / 3, 4 / 3, 2], abs=1e-12)


def test_sweep_empty_and_validation():
    spec = make_preset("constant")
    assert sweep_rho(spec, [], OPTS) == []
    with pytest.raises(ValueError):
        sweep_rho(spec, [2, 1], OPTS)
    with pytest.raises(ValueError):
        sweep_rho(spec, [0, 1], OPTS)


def test_sweep_collects_errors():
    spec = make_preset("example41", bc_j=0)
    results = sweep_rho(spec, [0.5, 8.0], SolverOptions(n=64, max_iter=60))
    assert results[0].pair is not None
    assert results[1].pair is None and isinstance(results[1].error, NonConvergence)


def test_sweep_warm_start_matches_cold_start():
    spec = make_preset("example41")
    rhos = [0.5, 1.0, 2.0]
    warm = sweep_rho(spec, rhos, OPTS)
    for r in warm:
        cold = solve_at_rho(spec, r.rho, OPTS)
        assert r.pair.lam == pytest.approx(cold.lam, rel=1e-9)


def test_feasibility_examples():
    ks = make_kernel_set(3)
    assert check_feasibility(lambda s: s, 0.5, ks) == pytest.approx(19 / 120, abs=1e-12)
    assert check_feasibility(0.0, 0.0, ks) == 0.0
    assert check_feasibility(1.0, 0.0, ks) == pytest.approx(1 / 8, abs=1e-14)
    spec = make_preset("example41")
    for rho in (0.5, 1.0, 2.0):
        value = feasibility_value(spec, rho)
        assert value == pytest.approx(1 / (6 * (1 + rho**2)) + 3 / 40, abs=1e-12)
    nobounds = ProblemSpec(3, HistoryDatum.zero(0.5), DelayRHS(lambda t: np.ones_like(t), []),
                           BoundaryFunctional.constant(1.0))
    with pytest.raises(ValueError):
        feasibility_value(nobounds, 1.0)
