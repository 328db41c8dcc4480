"""Closed-form and projected-gradient solvers, gradient checks, min-penalty."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammareg import (
    ForwardOperator,
    GridCompatibilityError,
    GridFunction,
    InconsistentDataError,
    SolveConfig,
    TikhonovProblem,
    UnsupportedPenaltyError,
    constant_kernel,
    eval_T,
    from_callable,
    gaussian_kernel,
    grad_check,
    half_sq_l2,
    identity_operator,
    linf_penalty,
    make_quadrature_family,
    min_penalty_solution,
    minimize_problem,
    norm,
    norm_ball,
    p_power_norm,
    projected_gradient,
    shifted_half_sq,
    solve_linear_quadratic,
)


def doubling_surrogate():
    """F = 2I on two nodes, y = 1, alpha = 1: minimum 0.1 at the constant 0.4."""
    op = ForwardOperator(2.0 * np.eye(2), 2, 2)
    return TikhonovProblem(op, GridFunction(np.ones(2)), alpha=1.0)


def gaussian_problem(m=17, alpha=0.1):
    family = make_quadrature_family(gaussian_kernel(0.2), (m,), m, input_m=m)
    op = family.reference
    y = op.apply(from_callable(lambda t: np.sin(np.pi * t), m))
    return TikhonovProblem(op, y, alpha=alpha)


# ------------------------------------------------------------- closed form


def test_closed_form_matches_hand_minimum():
    res = solve_linear_quadratic(doubling_surrogate())
    assert res.status == "converged"
    assert np.allclose(res.minimizer.values, 0.4, atol=1e-12)
    assert res.value.as_float() == pytest.approx(0.1, abs=1e-12)


def test_identity_with_zero_alpha_returns_the_data():
    op = identity_operator(9)
    y = from_callable(lambda t: np.sin(np.pi * t) + 0.2, 9)
    res = solve_linear_quadratic(TikhonovProblem(op, y, alpha=0.0))
    assert np.allclose(res.minimizer.values, y.values, atol=1e-12)
    assert res.value.as_float() == pytest.approx(0.0, abs=1e-14)


def test_rank_deficient_operator_with_zero_alpha_is_infeasible():
    op = ForwardOperator(np.zeros((5, 5)), 5, 5)
    y = GridFunction(np.ones(5))
    res = solve_linear_quadratic(TikhonovProblem(op, y, alpha=0.0))
    assert res.status == "infeasible"
    assert res.value.sign == 1


def test_closed_form_requires_linear_quadratic_shape():
    problem = gaussian_problem()
    cubic = TikhonovProblem(problem.operator, problem.data_y, 0.1, exponent_p=3.0)
    with pytest.raises(UnsupportedPenaltyError):
        solve_linear_quadratic(cubic)


def test_shifted_penalty_recenters_the_solution():
    # with y = F(shift) and the penalty centered at the same shift, the
    # shift itself is the exact minimizer for every alpha
    op = identity_operator(9)
    shift = from_callable(lambda t: 0.3 * np.cos(np.pi * t), 9)
    problem = TikhonovProblem(op, shift, alpha=0.7, penalty=shifted_half_sq(shift))
    res = solve_linear_quadratic(problem)
    assert np.allclose(res.minimizer.values, shift.values, atol=1e-12)


def test_closed_form_gradient_is_small_at_solution():
    res = solve_linear_quadratic(gaussian_problem())
    assert res.grad_norm_final < 1e-10


# ------------------------------------------------------- projected gradient


def test_projected_gradient_matches_closed_form():
    problem = gaussian_problem(m=17)
    exact = solve_linear_quadratic(problem)
    x0 = GridFunction(np.zeros(17))
    res = projected_gradient(problem, x0, SolveConfig(max_iter=2000, grad_tol=1e-9))
    assert res.status == "converged"
    assert res.monotone
    assert norm(res.minimizer - exact.minimizer) < 1e-6


def test_ball_constraint_saturates_when_unconstrained_solution_is_outside():
    # unconstrained minimizer of 0.5||x - y||^2 + alpha 0.5||x||^2 is
    # y/(1 + alpha) with norm 2/(1 + alpha) > 0.3, so the constrained
    # minimizer sits on the boundary of the 0.3-ball
    op = identity_operator(9)
    y = GridFunction(np.full(9, 2.0))
    for alpha in (0.1, 0.5):
        problem = TikhonovProblem(op, y, alpha=alpha, domain=norm_ball(0.3))
        res = projected_gradient(
            problem, GridFunction(np.zeros(9)), SolveConfig(max_iter=500, grad_tol=1e-10)
        )
        assert res.status == "converged"
        assert norm(res.minimizer) == pytest.approx(0.3, abs=1e-9)


def test_infeasible_start_is_reported():
    op = identity_operator(9)
    problem = TikhonovProblem(
        op, GridFunction(np.zeros(9)), alpha=1.0, domain=norm_ball(0.5)
    )
    res = projected_gradient(problem, GridFunction(np.full(9, 1.0)))
    assert res.status == "infeasible"
    assert res.value.sign == 1
    assert res.iterations == 0


def test_target_value_stops_early():
    problem = gaussian_problem(m=17)
    exact = solve_linear_quadratic(problem).value.as_float()
    res = projected_gradient(
        problem,
        GridFunction(np.zeros(17)),
        SolveConfig(max_iter=5000, grad_tol=1e-14),
        target_value=exact + 1e-3,
    )
    assert res.status == "converged"
    assert res.value.as_float() <= exact + 1e-3 + 1e-15


def test_gradient_method_needs_smooth_pieces():
    op = identity_operator(5)
    y = GridFunction(np.zeros(5))
    x0 = GridFunction(np.zeros(5))
    with pytest.raises(UnsupportedPenaltyError):
        projected_gradient(TikhonovProblem(op, y, 1.0, penalty=linf_penalty()), x0)
    with pytest.raises(UnsupportedPenaltyError):
        projected_gradient(TikhonovProblem(op, y, 1.0, exponent_p=1.0), x0)


def test_quartic_discrepancy_is_solved_to_tolerance():
    # p = 4 with a power penalty: smooth but not linear-quadratic
    problem = TikhonovProblem(
        identity_operator(9),
        from_callable(lambda t: np.sin(np.pi * t), 9),
        alpha=0.01,
        exponent_p=4.0,
        penalty=p_power_norm(2.0),
    )
    res = projected_gradient(
        problem, GridFunction(np.zeros(9)), SolveConfig(max_iter=3000, grad_tol=1e-9)
    )
    assert res.status == "converged"
    assert res.monotone
    assert res.grad_norm_final <= 1e-9


def test_minimize_problem_dispatches_on_shape():
    lq = gaussian_problem()
    assert solve_linear_quadratic(lq).value.as_float() == pytest.approx(
        minimize_problem(lq).value.as_float(), abs=1e-15
    )
    constrained = TikhonovProblem(
        lq.operator, lq.data_y, lq.alpha, domain=norm_ball(10.0)
    )
    res = minimize_problem(constrained, SolveConfig(max_iter=2000, grad_tol=1e-9))
    assert res.status == "converged"
    assert res.value.as_float() == pytest.approx(
        solve_linear_quadratic(lq).value.as_float(), rel=1e-6
    )


def test_solver_config_validation():
    with pytest.raises(GridCompatibilityError):
        SolveConfig(max_iter=0)
    with pytest.raises(GridCompatibilityError):
        SolveConfig(grad_tol=0.0)
    with pytest.raises(GridCompatibilityError):
        SolveConfig(shrink=1.0)
    with pytest.raises(GridCompatibilityError):
        SolveConfig(restarts=-1)


# ----------------------------------------------------------- gradient check


def test_grad_check_tiny_on_quadratic_problems():
    problem = gaussian_problem(m=17)
    x = from_callable(lambda t: 0.5 * np.cos(np.pi * t), 17)
    assert grad_check(problem, x) < 1e-10


def test_grad_check_scales_with_step_on_quartic_problems():
    # central differences are second order: shrinking h by 1000 must win
    # at least a factor 10 on a smooth non-quadratic objective
    problem = TikhonovProblem(
        identity_operator(9),
        from_callable(lambda t: np.sin(np.pi * t), 9),
        alpha=0.1,
        exponent_p=4.0,
    )
    x = from_callable(lambda t: 0.4 + 0.2 * t, 9)
    coarse = grad_check(problem, x, h_fd=1e-2)
    fine = grad_check(problem, x, h_fd=1e-5)
    assert fine < coarse / 10.0


# ------------------------------------------------------------- min penalty


def test_min_penalty_solution_identity_returns_data():
    op = identity_operator(9)
    y = from_callable(lambda t: np.sin(np.pi * t), 9)
    x = min_penalty_solution(op, y)
    assert norm(x - y) < 1e-12


def test_min_penalty_solution_rank_one_hand_value():
    # constant kernel kappa = 2 maps x to the constant 2 * integral(x);
    # among all profiles with integral 0.3 the constant 0.3 has least L2
    # norm, so it is the minimum-penalty solution for y = 0.6
    family = make_quadrature_family(constant_kernel(2.0), (33,), 33, input_m=33)
    y = GridFunction(np.full(33, 0.6))
    x = min_penalty_solution(family.reference, y)
    assert np.allclose(x.values, 0.3, atol=1e-7)


def test_min_penalty_solution_consistency_on_smoothing_kernel():
    family = make_quadrature_family(gaussian_kernel(0.2), (65,), 65, input_m=65)
    op = family.reference
    truth = from_callable(lambda t: np.sin(np.pi * t), 65)
    y = op.apply(truth)
    x = min_penalty_solution(op, y)
    # attains the data and penalizes no harder than the generating profile
    assert norm(op.apply(x) - y) < 1e-5
    assert half_sq_l2().evaluate(x) <= half_sq_l2().evaluate(truth) + 1e-6


def test_min_penalty_solution_refuses_unattainable_data():
    # a constant-kernel operator only produces constants; a ramp is out
    family = make_quadrature_family(constant_kernel(1.0), (33,), 33, input_m=33)
    ramp = from_callable(lambda t: t, 33)
    with pytest.raises(InconsistentDataError):
        min_penalty_solution(family.reference, ramp)


def test_min_penalty_ladder_needs_three_rungs():
    op = identity_operator(5)
    with pytest.raises(GridCompatibilityError):
        min_penalty_solution(op, GridFunction(np.zeros(5)), ladder=(1e-3, 1e-5))


# -------------------------------------------------------------- properties


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=0, max_value=10_000))
def test_descent_is_never_violated(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 10))
    mat = rng.standard_normal((m, m))
    op = ForwardOperator(mat, m, m)
    y = GridFunction(rng.standard_normal(m))
    problem = TikhonovProblem(op, y, alpha=float(rng.uniform(0.01, 1.0)))
    res = projected_gradient(
        problem, GridFunction(np.zeros(m)), SolveConfig(max_iter=60, grad_tol=1e-10)
    )
    assert res.monotone


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=0, max_value=10_000))
def test_closed_form_gradient_vanishes(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 12))
    mat = rng.standard_normal((m, m))
    op = ForwardOperator(mat, m, m)
    y = GridFunction(rng.standard_normal(m))
    problem = TikhonovProblem(op, y, alpha=float(rng.uniform(0.05, 1.0)))
    res = solve_linear_quadratic(problem)
    assert res.status == "converged"
    assert res.grad_norm_final < 1e-8
