"""Integral-operator discretizations, operator families, and uniform gaps."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gammareg import (
    ForwardOperator,
    GridCompatibilityError,
    GridFunction,
    NoiseSchedule,
    NormTag,
    constant_kernel,
    from_callable,
    gaussian_kernel,
    grid_nodes,
    identity_operator,
    integral_apply,
    integral_matrix,
    make_constant_family,
    make_quadrature_family,
    membership,
    noise_direction,
    norm,
    norm_ball,
    norm_ball_nonneg,
    separable_kernel,
    standard_samples,
    trapezoid_weights,
    uniform_gap,
    whole_space,
)


# ------------------------------------------------------------- kernels


def test_constant_kernel_rows_are_kappa_times_weights():
    mat = integral_matrix(constant_kernel(3.0), 4)
    expected = 3.0 * np.tile(trapezoid_weights(4), (4, 1))
    assert np.allclose(mat, expected, atol=1e-15)


def test_constant_kernel_integrates_constants_exactly():
    # k(s,t) = 2: (Fx)(s) = 2 * integral of x; for x = 1 that is 2
    out = integral_apply(constant_kernel(2.0), GridFunction(np.ones(5)), 5)
    assert np.allclose(out.values, 2.0, atol=1e-15)


def test_separable_kernel_matrix_has_rank_one():
    mat = integral_matrix(separable_kernel(), 9)
    s = np.linalg.svd(mat, compute_uv=False)
    assert s[0] > 0.1
    assert s[1] < 1e-14


def test_separable_kernel_hand_value():
    # k(s,t) = s*t applied to x(t) = t: (Fx)(s) = s * integral t^2 dt.
    # Trapezoid at 3 nodes integrates t^2 to 3/8 (h^2/6 overshoot of 1/3).
    out = integral_apply(separable_kernel(), from_callable(lambda t: t, 3), 3)
    assert np.allclose(out.values, 0.375 * grid_nodes(3), atol=1e-15)


def test_gaussian_kernel_is_symmetric():
    k = gaussian_kernel(0.2).evaluator
    s = np.array([0.3])
    t = np.array([0.8])
    assert k(s, t)[0] == pytest.approx(k(t, s)[0], abs=0)


def test_gaussian_kernel_peaks_on_diagonal():
    k = gaussian_kernel(0.5).evaluator
    d = np.array([0.4])
    assert k(d, d)[0] == pytest.approx(1.0, abs=0)
    assert k(d, np.array([0.9]))[0] < 1.0


def test_gaussian_kernel_needs_positive_width():
    with pytest.raises(GridCompatibilityError):
        gaussian_kernel(0.0)


# ------------------------------------------------------------ operators


def test_identity_operator_applies_as_identity():
    op = identity_operator(9)
    g = from_callable(np.sin, 9)
    assert np.array_equal(op.apply(g).values, g.values)


def test_operator_matrix_shape_validated():
    with pytest.raises(GridCompatibilityError):
        ForwardOperator(np.eye(3), input_m=4, output_m=3)


def test_operator_matrix_is_read_only():
    op = identity_operator(3)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0


def test_apply_resamples_mismatched_input():
    op = identity_operator(9)
    coarse = from_callable(lambda t: t, 5)
    assert np.allclose(op.apply(coarse).values, grid_nodes(9), atol=1e-14)


# -------------------------------------------------------------- domains


def test_membership_whole_space():
    assert membership(whole_space(), GridFunction(np.full(5, 100.0)))


def test_membership_l2_ball():
    ball = norm_ball(0.5)
    assert membership(ball, GridFunction(np.full(5, 0.5)))
    assert not membership(ball, GridFunction(np.full(5, 0.6)))


def test_membership_nonnegative_ball():
    dom = norm_ball_nonneg(1.0)
    assert membership(dom, GridFunction(np.full(5, 0.1)))
    assert not membership(dom, GridFunction(np.array([0.1, -0.1, 0.1, 0.1, 0.1])))


def test_ball_needs_positive_radius():
    with pytest.raises(GridCompatibilityError):
        norm_ball(0.0)


# -------------------------------------------------------------- families


def test_quadrature_family_levels_and_reference_grid():
    family = make_quadrature_family(gaussian_kernel(0.2), (9, 17), 129, input_m=17)
    assert family.levels == (9, 17)
    assert family.reference.output_m == 129
    assert family.operator_at(9).output_m == 129
    with pytest.raises(GridCompatibilityError):
        family.operator_at(10)


def test_quadrature_family_gap_decays_with_level():
    family = make_quadrature_family(gaussian_kernel(0.2), (5, 9, 17, 33), 129, input_m=17)
    samples = standard_samples(17)
    gaps = [uniform_gap(family, n, samples) for n in family.levels]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # trapezoid quadrature of a smooth kernel is second order: each level
    # roughly doubles the node count, so gaps shrink about fourfold
    assert gaps[-1] < gaps[0] / 20.0


def test_reference_must_be_at_least_as_fine_as_levels():
    with pytest.raises(GridCompatibilityError):
        make_quadrature_family(gaussian_kernel(0.2), (9, 17), 15, input_m=9)


def test_constant_family_has_zero_gap():
    op = identity_operator(9)
    family = make_constant_family(op, (2, 4, 8))
    samples = standard_samples(9)
    for n in family.levels:
        assert uniform_gap(family, n, samples) == 0.0
        assert family.operator_at(n) is op


def test_family_levels_must_increase():
    with pytest.raises(GridCompatibilityError):
        make_constant_family(identity_operator(5), (4, 4, 8))


def test_shrinking_domains_radius_formula():
    family = make_quadrature_family(
        gaussian_kernel(0.2),
        (2, 4, 8),
        65,
        input_m=9,
        domain=norm_ball(1.0),
        shrinking_domains=True,
    )
    for n in family.levels:
        assert family.domain_at(n).radius == pytest.approx(1.0 - 1.0 / n, abs=1e-15)
    # level domains are strict subsets: a point near the reference boundary
    # is feasible for the limit problem but not for any level
    edge = standard_samples(9, rho=1.0)[0]  # norm 0.999
    assert membership(family.reference.domain, edge)
    assert not membership(family.domain_at(8), edge)


def test_shrinking_domains_need_a_ball():
    with pytest.raises(GridCompatibilityError):
        make_quadrature_family(
            gaussian_kernel(0.2), (2, 4), 65, input_m=9, shrinking_domains=True
        )


def test_uniform_gap_rejects_samples_outside_domain():
    family = make_quadrature_family(
        gaussian_kernel(0.2),
        (2, 4),
        65,
        input_m=9,
        domain=norm_ball(1.0),
        shrinking_domains=True,
    )
    outside = standard_samples(9, rho=1.0)[:1]  # norm 0.999 > 1 - 1/2
    with pytest.raises(GridCompatibilityError):
        uniform_gap(family, 2, outside)


def test_uniform_gap_needs_samples():
    family = make_constant_family(identity_operator(5), (2, 4))
    with pytest.raises(GridCompatibilityError):
        uniform_gap(family, 2, [])


# --------------------------------------------------------------- samples


def test_standard_samples_norms_follow_scales():
    samples = standard_samples(65, rho=2.0)
    assert len(samples) == 8
    scales = (0.999, 0.9, 0.75, 0.6, 0.5, 0.4, 0.3, 0.2)
    for g, scale in zip(samples, scales):
        assert norm(g) == pytest.approx(2.0 * scale, rel=1e-12)


def test_standard_samples_respect_sup_norm_tag():
    samples = standard_samples(33, rho=1.0, tag=NormTag.LINF)
    for g in samples:
        assert norm(g, NormTag.LINF) <= 1.0 + 1e-12


# ----------------------------------------------------------- noise shapes


def test_oscillatory_direction_has_unit_norm():
    d = noise_direction(NoiseSchedule("power"), 65, 4)
    assert norm(d) == pytest.approx(1.0, abs=1e-12)


def test_constant_direction_has_unit_norm():
    d = noise_direction(NoiseSchedule("power", direction="constant"), 65, 4)
    assert norm(d) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(d.values, d.values[0])


def test_seeded_direction_is_reproducible_per_level():
    sched = NoiseSchedule("seeded", seed=11)
    a = noise_direction(sched, 65, 4)
    b = noise_direction(sched, 65, 4)
    c = noise_direction(sched, 65, 8)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert norm(a) == pytest.approx(1.0, abs=1e-12)


def test_seeded_direction_depends_on_seed():
    a = noise_direction(NoiseSchedule("seeded", seed=1), 65, 4)
    b = noise_direction(NoiseSchedule("seeded", seed=2), 65, 4)
    assert not np.array_equal(a.values, b.values)


# ------------------------------------------------------------- properties


@given(st.integers(min_value=2, max_value=40), st.floats(min_value=0.1, max_value=5.0))
def test_uniform_gap_is_zero_for_constant_families(m, rho):
    family = make_constant_family(identity_operator(m), (2, 4))
    assert uniform_gap(family, 2, standard_samples(m, rho=rho)) == 0.0


@given(st.floats(min_value=0.05, max_value=2.0))
def test_gaussian_kernel_bounded_by_one(sigma):
    k = gaussian_kernel(sigma).evaluator
    s = np.linspace(0.0, 1.0, 7)
    vals = k(s[None, :], s[:, None])
    assert np.all(vals <= 1.0 + 1e-15)
    assert np.all(vals > 0.0)
