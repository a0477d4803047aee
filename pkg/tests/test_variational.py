import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from djlong.errors import DomainError
from djlong.grids import uniform_grid
from djlong.params import Domain, ProfileParams
from djlong.variational import (bilinear_form, coercivity_delta, functional_gradient, functional_state,
                                functional_value, identity_check, polish_regular, projection_identity,
                                solve_regular, solve_regular_all, spectral_split)

HALF = ProfileParams.from_c(0.5, 1.0, 1.0)
GRID = uniform_grid(256, math.pi)


def smooth_profile(grid, coeffs):
    return sum(c * np.sin((k + 1) * grid) for k, c in enumerate(coeffs))


@pytest.mark.parametrize("beta,K", [(0.5, 0), (1.5, 1), (2.5, 2), (3.0, 3), (-2.5, 2)])
def test_spectral_split_counts_nonpositive_modes(beta, K):
    assert spectral_split(beta, grid=GRID).K == K


def test_spectral_modes_are_orthonormal():
    dec = spectral_split(2.5, grid=GRID, extra_modes=2)
    E = np.array([e for _, e in dec.modes])
    gram = np.array([[np.trapezoid(a * b, GRID) for b in E] for a in E])
    assert np.max(np.abs(gram - np.eye(len(E)))) <= 1e-2


def test_bilinear_form_decouples_first_modes():
    e1, e2 = np.sin(GRID), np.sin(2 * GRID)
    assert abs(bilinear_form(e1, e2, 1.5, GRID)) <= 1e-8
    assert bilinear_form(e1, e1, 1.5, GRID) == pytest.approx((1 - 1.5 ** 2) * math.pi / 2, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_bilinear_form_is_symmetric(a, b):
    w, eta = smooth_profile(GRID, a), smooth_profile(GRID, b)
    assert bilinear_form(w, eta, 1.3, GRID) == pytest.approx(bilinear_form(eta, w, 1.3, GRID), abs=1e-9)


@pytest.mark.parametrize("beta", [0.5, 1.5, 3.0])
def test_coercivity_above_nonpositive_modes(beta):
    assert coercivity_delta(spectral_split(beta, grid=GRID), n_trials=60) > 0


def test_functional_vanishes_at_zero():
    assert functional_value(np.zeros_like(GRID), HALF, GRID) == 0.0
    assert np.all(functional_gradient(np.zeros_like(GRID), HALF, GRID) == 0.0)


def test_modified_functional_ignores_negative_part():
    w = -np.sin(GRID)
    st_mod = functional_state(w, HALF, GRID, modified=True)
    assert st_mod.nonlinear_part == pytest.approx(0.0, abs=1e-14)
    assert functional_value(np.sin(GRID), HALF, GRID, modified=True) == pytest.approx(
        functional_value(np.sin(GRID), HALF, GRID), rel=1e-12)


def test_functional_unbounded_below_along_rays():
    vals = [functional_value(rho * np.sin(GRID), HALF, GRID) for rho in (1.0, 10.0, 100.0)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < -1e6


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(0.2, 2.0), min_size=3, max_size=3), st.integers(0, 10_000))
def test_gradient_matches_finite_differences(coeffs, seed):
    w = np.abs(smooth_profile(GRID, coeffs)) + np.sin(GRID)
    eta = np.random.default_rng(seed).standard_normal(GRID.size)
    eta[0] = eta[-1] = 0.0
    h = 1e-6
    fd = (functional_value(w + h * eta, HALF, GRID) - functional_value(w - h * eta, HALF, GRID)) / (2 * h)
    an = float(np.dot(functional_gradient(w, HALF, GRID), eta[1:-1]))
    assert fd == pytest.approx(an, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("sigma", [0.0, 0.25, 0.5])
def test_algebraic_identity_holds_for_any_profile(sigma):
    w = smooth_profile(GRID, [1.0, 0.3, -0.2])
    assert identity_check(w, sigma, HALF, GRID) <= 1e-10


def test_positive_regular_profile(regular_half):
    w = regular_half.w
    assert np.all(w[1:-1] > 0)
    assert np.max(np.abs(w - w[::-1])) <= 1e-8
    mid = w.size // 2
    assert np.all(np.diff(w[:mid + 1]) > 0)
    assert regular_half.diagnostics.eq_residuals["discrete_ode"] <= 1e-8


@pytest.mark.parametrize("beta,c2", [(1.5, 1.0), (3.0, 1.0), (-2.5, 0.0)])
def test_outside_unit_range_profiles_change_sign(beta, c2):
    sol = solve_regular(ProfileParams.from_c(beta, 1.0, c2))
    assert np.min(sol.w) < 0
    lhs, rhs = projection_identity(sol)
    assert abs(lhs - rhs) <= 1e-6


def test_solution_is_smallest_found_critical_value(regular_linking):
    search = solve_regular_all(ProfileParams.from_c(1.5, 1.0, 1.0))
    assert search.values == sorted(search.values)
    assert regular_linking.info["functional_value"] == pytest.approx(search.values[0])


def test_polish_reproduces_solution(regular_half):
    again = polish_regular(HALF, regular_half.w)
    assert np.max(np.abs(again.w - regular_half.w)) <= 1e-9


def test_regular_solver_rejects_singular_range():
    with pytest.raises(DomainError):
        solve_regular(ProfileParams.from_c(-0.5, 1.0, 0.0))
    with pytest.raises(DomainError):
        solve_regular(HALF, method_hint="bogus")


def test_regular_solver_is_deterministic():
    p = ProfileParams.from_c(2.5, 1.0, 0.5)
    a, b = solve_regular(p, seed=4, n=512), solve_regular(p, seed=4, n=512)
    assert np.array_equal(a.w, b.w)


def test_full_and_quarter_domains_split_differently():
    assert spectral_split(1.5, Domain.QUARTER, uniform_grid(128, math.pi / 2)).K == 0
