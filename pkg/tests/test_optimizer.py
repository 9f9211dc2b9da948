import math

import numpy as np
import pytest

from commands.ingest import ingest
from hypercircle.cellcomplex import subtriangulate
from hypercircle.energy import AngleData, TargetData, VariableLayout, feasibility, residuals
from hypercircle.errors import GenusTooLow, InputError, MaxIterExceeded
from hypercircle.optimizer import SolveOptions, default_init, minimize, two_loop_direction
from utils.run_config import load_run_config

TWO_PI = 2.0 * math.pi


def test_options_are_validated():
    with pytest.raises(InputError):
        SolveOptions(grad_tol=0.0)
    with pytest.raises(InputError):
        SolveOptions(max_iter=0)
    with pytest.raises(InputError):
        SolveOptions(memory=0)
    with pytest.raises(InputError):
        SolveOptions(backtrack_shrink=1.0)


def test_two_loop_without_memory_is_steepest_descent():
    g = np.array([1.0, -2.0, 0.5])
    np.testing.assert_array_equal(two_loop_direction(g, []), -g)


def test_two_loop_recovers_a_quadratic():
    hessian = np.diag([1.0, 4.0])
    pairs = [(s, hessian @ s) for s in (np.array([1.0, 0.0]), np.array([0.0, 1.0]))]
    g = np.array([2.0, 8.0])
    np.testing.assert_allclose(two_loop_direction(g, pairs), -np.linalg.solve(hessian, g))


def test_default_init_is_feasible(lawson_tri, octahedron_tri):
    for tri in (lawson_tri, octahedron_tri):
        t = default_init(tri)
        assert feasibility(t, tri).in_TE
        assert np.all(t.b[sorted(tri.v1)] >= 1.0)


def test_lawson_converges(lawson_solution):
    sol = lawson_solution
    result = sol.result
    assert result.converged
    assert result.grad_norm <= 1e-10
    assert result.report.in_TE
    res = residuals(result.x_star, sol.tri, sol.target)
    assert res.max_angle < 1e-9
    assert res.max_cone < 1e-9
    assert np.all(sol.metric.r[sorted(sol.tri.v1)] > 0.0)
    assert [row['iteration'] for row in result.trace] == list(range(1, result.iterations + 1))
    assert result.to_dict()['trace_length'] == result.iterations


def test_starting_at_the_solution_stops_immediately(lawson_solution):
    sol = lawson_solution
    again = minimize(sol.tri, sol.target, SolveOptions(grad_tol=1e-9), x0=sol.result.x_star)
    assert again.iterations == 0
    assert again.converged


def test_spherical_target_is_rejected(octahedron, octahedron_tri):
    data = AngleData(octahedron, np.full(12, math.pi / 3.0), np.full(6, TWO_PI))
    target = TargetData.from_angle_data(data, octahedron_tri)
    with pytest.raises(GenusTooLow) as exc:
        minimize(octahedron_tri, target)
    assert exc.value.details['euler_characteristic'] == 2


def test_iteration_limit_carries_the_last_iterate(lawson_tri, lawson_solution):
    with pytest.raises(MaxIterExceeded) as exc:
        minimize(lawson_tri, lawson_solution.target, SolveOptions(grad_tol=1e-14, max_iter=2))
    assert exc.value.exit_code == 1
    assert exc.value.result is not None
    assert exc.value.result.iterations == 2
    assert not exc.value.result.converged


def test_callback_sees_every_iteration(lawson_tri, lawson_solution):
    seen = []
    minimize(lawson_tri, lawson_solution.target, SolveOptions(grad_tol=1e-8, max_iter=500),
             callback=lambda it, gnorm: seen.append(it))
    assert seen == list(range(len(seen)))


def test_fold_must_match_the_variables(lawson_tri, lawson_solution):
    n = VariableLayout(lawson_tri).size
    with pytest.raises(InputError):
        minimize(lawson_tri, lawson_solution.target, fold=list(range(n - 1)))


def test_identity_fold_gives_the_same_solution(lawson_tri, lawson_solution):
    n = VariableLayout(lawson_tri).size
    folded = minimize(lawson_tri, lawson_solution.target, SolveOptions(grad_tol=1e-10, max_iter=500),
                      fold=list(range(n)))
    np.testing.assert_allclose(folded.x_star.a, lawson_solution.result.x_star.a, atol=1e-7)
    np.testing.assert_allclose(folded.x_star.b, lawson_solution.result.x_star.b, atol=1e-7)


def test_trace_records_the_gradient_after_each_step(lawson_solution):
    result = lawson_solution.result
    assert result.trace
    assert result.trace[-1]['grad_norm'] == pytest.approx(result.grad_norm)
    assert result.trace[-1]['grad_norm'] <= 1e-10
    assert result.trace[0]['grad_norm'] > result.trace[-1]['grad_norm']


def test_start_on_the_b_bound_still_converges(lawson_tri, lawson_solution):
    x0 = default_init(lawson_tri)
    v1 = sorted(lawson_tri.v1)
    x0.b[v1] = 1e-12
    result = minimize(lawson_tri, lawson_solution.target, SolveOptions(grad_tol=1e-10, max_iter=1000), x0=x0)
    assert result.converged
    assert result.report.in_TE
    np.testing.assert_allclose(result.x_star.b[v1], lawson_solution.result.x_star.b[v1], atol=1e-6)


def test_options_reject_a_nonpositive_margin():
    with pytest.raises(InputError):
        SolveOptions(feasibility_margin=0.0)


@pytest.mark.slow
@pytest.mark.parametrize('name', ['lawson-curve', 'hyperelliptic-random'])
def test_branched_cover_bundles_converge(data_dir, name):
    ingested = ingest(load_run_config(data_dir / f"{name}.json"))
    data = ingested.data
    tri = subtriangulate(data.complex)
    target = TargetData.from_angle_data(data, tri)
    result = minimize(tri, target, SolveOptions(grad_tol=1e-10, max_iter=2000))
    assert result.converged
    assert result.report.in_TE
    res = residuals(result.x_star, tri, target)
    assert res.max_angle < 1e-8
    assert res.max_cone < 1e-8
