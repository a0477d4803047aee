import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import frozen
from djlong.errors import DomainError, PreconditionError
from djlong.params import ProfileParams
from djlong.singular_bvp import (BarrierConstants, End, RegularizationSchedule, barrier_constants,
                                 boundary_exponent, compute_lower_a, compute_upper_b, continuation_to_zero,
                                 default_grid, energy_identity_deviation, maximum_principle_oracle,
                                 random_initial_guess, regularized_primitive, regularized_rhs,
                                 secant_coefficient, singular_ode_residual, solve_regularized,
                                 solve_singular, verify_bounds)

BOTH = ProfileParams.from_c(-0.5, 1.0, 1.0)
AUTO = ProfileParams.from_c(-0.5, 1.0, 0.0)


def test_regularized_rhs_at_zero_is_eps_power():
    p = AUTO
    assert regularized_rhs(0.3, 0.0, 1.0, p) == pytest.approx(1.0)
    assert regularized_rhs(0.3, 0.0, 0.25, p) == pytest.approx(0.25 ** (-p.s))


def test_regularized_rhs_negative_t_is_clamped():
    p = BOTH
    assert regularized_rhs(0.7, -3.0, 0.1, p) == pytest.approx(regularized_rhs(0.7, 0.0, 0.1, p))


def test_regularized_rhs_includes_angular_term():
    p = BOTH
    phi, t, eps = 0.4, 0.5, 0.01
    expected = (t + eps) ** (-p.s) + math.sin(phi) * (t + eps) ** (-p.s_prime)
    assert regularized_rhs(phi, t, eps, p) == pytest.approx(expected, rel=1e-14)


def test_regularized_rhs_requires_positive_eps():
    with pytest.raises(DomainError):
        regularized_rhs(0.1, 0.1, 0.0, BOTH)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 1.5), st.floats(-1.0, 2.0).filter(lambda t: abs(t) > 1e-2), st.floats(1e-2, 1.0))
def test_primitive_derivative_matches_rhs(phi, t, eps):
    # Keep the stencil away from t = 0, where the primitive switches to its linear continuation.
    h = 1e-6
    fd = (regularized_primitive(phi, t + h, eps, BOTH) - regularized_primitive(phi, t - h, eps, BOTH)) / (2 * h)
    assert fd == pytest.approx(regularized_rhs(phi, t, eps, BOTH), rel=1e-5)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 1.5), st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(1e-3, 1.0))
def test_regularized_rhs_is_nonincreasing(phi, t1, t2, eps):
    lo, hi = sorted((t1, t2))
    assert regularized_rhs(phi, hi, eps, BOTH) <= regularized_rhs(phi, lo, eps, BOTH) + 1e-12


def test_lower_barrier_against_oracle():
    assert compute_lower_a(AUTO) == pytest.approx(frozen.LOWER_A_C1, abs=1e-9)
    assert compute_lower_a(BOTH) == pytest.approx(frozen.LOWER_A_C1, abs=1e-9)
    assert compute_lower_a(ProfileParams.from_c(-0.5, 0.0, 1.0)) == pytest.approx(frozen.LOWER_A_C2_ONLY, abs=1e-9)


def test_upper_barrier_against_oracle():
    assert compute_upper_b(AUTO, 0.25) == pytest.approx(frozen.UPPER_B_SIGMA_QUARTER, abs=1e-9)
    assert compute_upper_b(BOTH, 0.25) == pytest.approx(frozen.UPPER_B_SIGMA_QUARTER_BOTH, abs=1e-9)


def test_barrier_constants_round_trip():
    bc = barrier_constants(BOTH)
    assert 0 < bc.a_lower < bc.b_upper
    assert BarrierConstants.from_dict(bc.to_dict()) == bc


def test_schedule_parse_geometric_and_list():
    s = RegularizationSchedule.parse("1:1e-4:0.1")
    assert s.eps_values == pytest.approx((1.0, 0.1, 0.01, 1e-3, 1e-4))
    assert RegularizationSchedule.parse("0.5,0.1").eps_values == (0.5, 0.1)
    assert len(RegularizationSchedule.geometric().eps_values) == 9


@pytest.mark.parametrize("text", ["", "0.1,0.5", "2,1", "1,-1", "a:b:c", "1:1e-3:2"])
def test_schedule_rejects_bad_input(text):
    with pytest.raises(DomainError):
        RegularizationSchedule.parse(text)


def test_schedule_to_dict():
    d = RegularizationSchedule((1.0, 0.1)).to_dict()
    assert d["eps_values"] == [1.0, 0.1] and d["finish_at_zero"] is True


def test_nonautonomous_solution_within_barriers(singular_both):
    report = verify_bounds(singular_both, barrier_constants(BOTH))
    assert report.passed and report.lower_margin >= 0 and report.upper_margin >= 0


def test_scaled_solution_fails_upper_barrier(singular_both):
    bad = dataclasses.replace(singular_both, w=singular_both.w * 1e3)
    report = verify_bounds(bad, barrier_constants(BOTH))
    assert not report.passed and report.upper_violations


def test_zero_profile_fails_lower_barrier(singular_both):
    bad = dataclasses.replace(singular_both, w=np.zeros_like(singular_both.w))
    report = verify_bounds(bad, barrier_constants(BOTH))
    assert not report and report.lower_violations


def test_singular_solution_positive_inside_zero_at_ends(singular_both):
    w = singular_both.w
    assert np.all(w[1:-1] > 0)
    assert w[0] == 0 and w[-1] == 0


def test_singular_solution_residuals(singular_both):
    assert singular_ode_residual(singular_both) <= 1e-6
    assert energy_identity_deviation(singular_both) <= 1e-6


def test_continuation_history_converges(singular_both):
    hist = singular_both.info["history"]
    assert hist[-1]["sup_change"] <= 1e-7


def test_random_initializations_agree():
    grid = default_grid(2048)
    sols = [continuation_to_zero(BOTH, grid=grid, init=random_initial_guess(BOTH, grid, seed)) for seed in (1, 2)]
    assert np.max(np.abs(sols[0].w - sols[1].w)) <= 1e-6


def test_random_initial_guess_lies_between_barriers():
    grid = default_grid(512)
    bc = barrier_constants(BOTH)
    g = random_initial_guess(BOTH, grid, 7)
    s2 = np.clip(np.sin(2 * grid), 0, None)
    assert np.all(g >= bc.a_lower * s2 - 1e-14) and np.all(g <= bc.b_upper * s2 ** bc.sigma + 1e-14)
    assert np.array_equal(g, random_initial_guess(BOTH, grid, 7))


def test_solve_regularized_is_positive_and_rejects_bad_eps():
    grid = default_grid(512)
    w = solve_regularized(BOTH, 0.1, grid, np.sin(2 * grid))
    assert np.all(w[1:-1] > 0)
    with pytest.raises(DomainError):
        solve_regularized(BOTH, 0.0, grid, np.sin(2 * grid))


def test_energy_identity_detects_noise(singular_both):
    rng = np.random.default_rng(3)
    noisy = dataclasses.replace(singular_both, w=singular_both.w * (1 + 1e-2 * rng.standard_normal(singular_both.w.size)))
    assert energy_identity_deviation(noisy) >= 1e-3


def test_boundary_exponent_without_power_term():
    sol = solve_singular(ProfileParams.from_c(-1.8, 0.0, 1.0), n=4096)
    assert boundary_exponent(sol, End.LEFT) == pytest.approx(1.0, abs=0.05)


def test_beta_minus_one_with_only_angular_term_is_solvable():
    sol = solve_singular(ProfileParams.from_c(-1.0, 0.0, 1.0), n=2048)
    assert np.all(sol.w[1:-1] > 0)


def test_autonomous_range_rejects_angular_term_at_three_halves():
    with pytest.raises(DomainError):
        ProfileParams.from_c(-1.5, 1.0, 0.5).require_valid()


def test_maximum_principle_oracle_accepts_positive_profile():
    grid = default_grid(256)
    w = np.sin(2 * grid)
    assert maximum_principle_oracle(grid, w, np.zeros(grid.size - 2), -0.5)


def test_maximum_principle_oracle_flags_failed_precondition():
    grid = default_grid(256)
    with pytest.raises(PreconditionError):
        maximum_principle_oracle(grid, -np.sin(2 * grid), np.zeros(grid.size - 2), -0.5)
    with pytest.raises(PreconditionError):
        maximum_principle_oracle(grid, np.sin(2 * grid), -np.ones(grid.size - 2), -0.5)


def test_secant_coefficient_is_nonnegative():
    grid = default_grid(256)
    w = np.sin(2 * grid)
    c = secant_coefficient(grid, w, 0.5 * w, 0.01, BOTH)
    assert np.all(c >= 0) and np.all(np.isfinite(c))
