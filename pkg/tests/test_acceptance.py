"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line with its measurements."""

import math
import time

import numpy as np

from djlong import desing, reference
from djlong.autonomous import AutonomousProfile, find_matching_amplitude, phi_of_w, solve_autonomous
from djlong.bundle import load_bundle
from djlong.cli import main
from djlong.fields import (ProfileField, QuadratureSpec, bump_test_fields, profile_to_semicircle,
                           semicircle_residual, strong_residual_quadrant, weak_residual)
from djlong.params import ProfileParams
from djlong.singular_bvp import (End, barrier_constants, boundary_exponent, continuation_to_zero, default_grid,
                                 energy_identity_deviation, random_initial_guess, solve_singular, verify_bounds)
from djlong.solution import ProfileSolution
from djlong.variational import (functional_gradient, functional_value, identity_check, projection_identity,
                                solve_regular, solve_regular_all)

AUTONOMOUS = ProfileParams.from_c(-0.5, 1.0, 0.0)
NONAUTONOMOUS = ProfileParams.from_c(-0.5, 1.0, 1.0)
REGULAR = ProfileParams.from_c(0.5, 1.0, 1.0)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.3e}"


def report(capsys, number, title, checks):
    """Print ``AC<n> PASS|FAIL title: label=value ...`` and fail the test unless every check holds."""
    ok = all(passed for _, _, passed in checks)
    detail = "; ".join(f"{label}={_fmt(value)}{'' if passed else ' (FAIL)'}" for label, value, passed in checks)
    line = f"AC{number} {'PASS' if ok else 'FAIL'} {title}: {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_ac01_autonomous_solver(capsys):
    t0 = time.perf_counter()
    sol = solve_autonomous(AUTONOMOUS, n=1024)
    match = find_matching_amplitude(AUTONOMOUS)
    angle_err = abs(phi_of_w(sol.info["B_s"], sol.info["B_s"], AUTONOMOUS) - math.pi / 4)
    _, rel = AutonomousProfile(match, AUTONOMOUS).ode_residual(sol.grid[1:-1])
    ode = float(np.max(rel))
    energy = energy_identity_deviation(sol)
    left, right = boundary_exponent(sol, End.LEFT), boundary_exponent(sol, End.RIGHT)
    elapsed = time.perf_counter() - t0
    report(capsys, 1, "autonomous solver at N=1024", [
        ("matching_angle_error", angle_err, angle_err <= 1e-10),
        ("ode_residual", ode, ode <= 1e-8),
        ("energy_identity", energy, energy <= 1e-8),
        ("exponent_left", left, abs(left - 0.5) <= 0.02),
        ("exponent_right", right, abs(right - 0.5) <= 0.02),
        ("seconds", elapsed, elapsed <= 5.0),
    ])


def test_ac02_matching_limit(capsys):
    limit = (1 + AUTONOMOUS.s) * math.pi / 4
    vals = [phi_of_w(float(B), float(B), AUTONOMOUS) for B in (10, 100, 1000)]
    gaps = [limit - v for v in vals]
    rel_gap = abs(vals[-1] - limit) / limit
    report(capsys, 2, "matching function approaches its limit", [
        ("phi_10", vals[0], True), ("phi_100", vals[1], True), ("phi_1000", vals[2], True),
        ("monotone", gaps[0] > gaps[1] > gaps[2] > 0, gaps[0] > gaps[1] > gaps[2] > 0),
        ("relative_gap_1000", rel_gap, rel_gap <= 0.02),
    ])


def test_ac03_autonomous_matches_continuation(capsys):
    bvp = continuation_to_zero(AUTONOMOUS)
    w_exact, _ = AutonomousProfile(find_matching_amplitude(AUTONOMOUS), AUTONOMOUS).evaluate(bvp.grid)
    diff = float(np.max(np.abs(w_exact[1:-1] - bvp.w[1:-1])))
    report(capsys, 3, "autonomous inversion vs continuation", [("sup_difference", diff, diff <= 1e-6)])


def test_ac04_nonautonomous_singular(capsys):
    t0 = time.perf_counter()
    sol = solve_singular(NONAUTONOMOUS)
    last_change = sol.info["history"][-1]["sup_change"]
    bounds = verify_bounds(sol, barrier_constants(NONAUTONOMOUS))
    grid = default_grid()
    runs = [continuation_to_zero(NONAUTONOMOUS, grid=grid, init=random_initial_guess(NONAUTONOMOUS, grid, seed))
            for seed in (11, 12)]
    spread = float(np.max(np.abs(runs[0].w - runs[1].w)))
    elapsed = time.perf_counter() - t0
    report(capsys, 4, "nonautonomous singular solve", [
        ("last_iterate_change", last_change, last_change <= 1e-7),
        ("barrier_violations", len(bounds.lower_violations) + len(bounds.upper_violations), bounds.passed),
        ("random_init_spread", spread, spread <= 1e-6),
        ("seconds", elapsed, elapsed <= 60.0),
    ])


def _random_profile(rng, grid, modes=6):
    coeffs = rng.standard_normal(modes) / np.arange(1, modes + 1) ** 2
    return sum(c * np.sin((k + 1) * grid) for k, c in enumerate(coeffs))


def test_ac05_regular_regime(capsys):
    sol = solve_regular(REGULAR)
    w, grid = sol.w, sol.grid
    mid = w.size // 2
    positive = bool(np.all(w[1:-1] > 0))
    evenness = float(np.max(np.abs(w - w[::-1])))
    increasing = bool(np.all(np.diff(w[:mid + 1]) > 0))
    rng = np.random.default_rng(2024)
    base = np.abs(_random_profile(rng, grid)) + np.sin(grid)
    worst_grad = 0.0
    for _ in range(20):
        eta = _random_profile(rng, grid)
        h = 1e-5
        fd = (functional_value(base + h * eta, REGULAR, grid) - functional_value(base - h * eta, REGULAR, grid)) / (2 * h)
        an = float(np.dot(functional_gradient(base, REGULAR, grid), eta[1:-1]))
        worst_grad = max(worst_grad, abs(fd - an) / abs(an))
    worst_id = max(identity_check(_random_profile(rng, grid), sigma, REGULAR, grid)
                   for sigma in (0.0, 0.25, 0.5) for _ in range(3))
    report(capsys, 5, "regular regime at beta=1/2", [
        ("positive", positive, positive),
        ("evenness", evenness, evenness <= 1e-8),
        ("increasing", increasing, increasing),
        ("gradient_relative_error", worst_grad, worst_grad <= 1e-6),
        ("identity_deviation", worst_id, worst_id <= 1e-10),
    ])


def test_ac06_sign_change_outside_unit_range(capsys):
    checks = []
    for beta, c2 in ((1.5, 1.0), (3.0, 1.0), (-2.5, 0.0)):
        params = ProfileParams.from_c(beta, 1.0, c2)
        search = solve_regular_all(params)
        mins, devs = [], []
        for w_int in search.solutions:
            w = np.concatenate([[0.0], w_int, [0.0]])
            lhs, rhs = projection_identity(ProfileSolution(params, math.pi, search.grid, w, np.zeros_like(w), "search"))
            mins.append(float(np.min(w)))
            devs.append(abs(lhs - rhs))
        found = len(search.solutions)
        checks += [(f"solutions_{beta:g}", found, found > 0),
                   (f"max_min_w_{beta:g}", max(mins, default=math.nan), found > 0 and max(mins) < 0),
                   (f"projection_{beta:g}", max(devs, default=math.nan), found > 0 and max(devs) <= 1e-6)]
    report(capsys, 6, "sign change for |beta| > 1", checks)


def test_ac07_field_consistency(capsys):
    profiles = {
        "autonomous": (solve_autonomous(AUTONOMOUS), "euler"),
        "singular_both": (solve_singular(NONAUTONOMOUS), None),
        "pseudo_beltrami": (solve_singular(ProfileParams.from_c(-0.5, 0.0, 1.0)), "beltrami"),
        "regular_both": (solve_regular(REGULAR), None),
        "regular_euler": (solve_regular(ProfileParams.from_c(0.5, 1.0, 0.0)), "euler"),
        "linking_1.5": (solve_regular(ProfileParams.from_c(1.5, 1.0, 1.0)), None),
        "linking_3": (solve_regular(ProfileParams.from_c(3.0, 1.0, 1.0)), None),
        "sublinear_-2.5": (solve_regular(ProfileParams.from_c(-2.5, 1.0, 0.0)), "euler"),
    }
    checks = []
    for name, (sol, special) in profiles.items():
        res = semicircle_residual(profile_to_semicircle(sol)).eq_residuals
        base = max(v for k, v in res.items() if k not in ("vorticity_transport", "Omega_transport"))
        checks.append((name, base, base <= 1e-6))
        if special == "euler":
            v = res.get("vorticity_transport", math.inf)
            checks.append((f"{name}_vorticity", v, v <= 1e-6))
        if special == "beltrami":
            v = res.get("Omega_transport", math.inf)
            checks.append((f"{name}_Omega", v, v <= 1e-6))
    report(capsys, 7, "semicircle residuals and first integrals", checks)


def test_ac08_weak_residual(capsys):
    quad = QuadratureSpec(512, 128)
    tests = bump_test_fields(0)
    sheet = max(weak_residual(reference.ClosedFormField(reference.ClosedFormKind.VORTEX_SHEET), tf, quad)
                for tf in tests)
    params = ProfileParams.from_c(-1.75, 1.0, 0.0)
    singular = max(weak_residual(ProfileField(solve_autonomous(params)), tf, quad) for tf in tests)
    report(capsys, 8, "weak residual over 10 bump fields", [
        ("vortex_sheet", sheet, sheet <= 1e-5),
        (f"singular_alpha_{params.alpha:g}", singular, -1 < params.alpha < -0.5 and singular <= 1e-5),
    ])


def test_ac09_desingularization(capsys):
    t0 = time.perf_counter()
    rep = desing.sheet_limit_report(desing.DEFAULT_SCHEDULE, 1.0, 1.0)
    devs = [r.sup_dev for r in rep.rows]
    decreasing = all(b < a for a, b in zip(devs, devs[1:]))
    c1_ok = all(r.c1_beta <= r.beta + 1 for r in rep.rows)
    last = rep.rows[-1]
    combo_err = abs(last.combo - desing.SHEET_LIMIT_COMBO) / desing.SHEET_LIMIT_COMBO
    peak = max(abs(-2.0 * float(desing.desingularized_field(p.beta, p)(1.0, math.pi / 2).p) - p.peak_pressure_combo())
               for p in rep.profiles)
    elapsed = time.perf_counter() - t0
    report(capsys, 9, "approach to the vortex sheet", [
        ("deviation_decreasing", decreasing, decreasing),
        ("deviation_at_0.05", last.sup_dev, last.sup_dev <= 0.05),
        ("c1_bound", c1_ok, c1_ok),
        ("combo_relative_error", combo_err, combo_err <= 0.05),
        ("peak_pressure_identity", peak, peak <= 1e-8),
        ("seconds", elapsed, elapsed <= 300.0),
    ])


def test_ac10_reference_suite(capsys):
    analytic = max(semicircle_residual(reference.irrotational_semicircle(a, C, -0.5 * C * C if a else 0.0)).max_residual()
                   for a, C in ((2.0, 1.0), (3.0, -0.5), (-1.0, 2.0), (1.0, 1.5), (0.0, 1.0)))
    analytic = max(analytic, semicircle_residual(reference.vortex_sheet_semicircle()).max_residual())
    poly = np.polynomial.Polynomial([1.0, -2.0, 0.5])
    fields = [reference.ClosedFormField(reference.ClosedFormKind.IRROTATIONAL, 2.0, 1.0, -0.5),
              reference.ClosedFormField(reference.ClosedFormKind.VORTEX_SHEET),
              reference.ClosedFormField(reference.ClosedFormKind.STATIC_EQUILIBRIUM, p_of_x2=poly,
                                        dp_of_x2=poly.deriv())]
    strong = max(strong_residual_quadrant(f) for f in fields)
    x = np.linspace(-10.0, 10.0, 2001)
    u = reference.burgers_profile(x)
    burgers = float(np.max(np.abs(u ** 3 + u + x)))
    clm, mu_clm = reference.selfsimilar_1d_residual(reference.CLM_PAIR, 0.0, 0.0)
    gclm, mu_gclm = reference.selfsimilar_1d_residual(reference.GCLM_HALF_PAIR, 0.5, 2.0)
    branches = max(abs(a - b) for a, b in (reference.alpha_peye_branches(n, float(n)) for n in range(2, 11)))
    delta = max(abs(reference.emden_rhs(reference.EmdenState(1.0, 0.0, n, l, a))[0])
                for n, l, a in ((2, 1.0, 0.3), (3, 2.0, 0.7), (5, 0.5, 1.2)))
    delta2 = max(abs(reference.emden_rhs(reference.EmdenState(w, 0.0, n, l, a))[2])
                 for n, l, a in ((2, 1.0, 0.3), (3, 2.0, 0.7)) for w in np.linspace(-2, 2, 9))
    report(capsys, 10, "closed-form reference solutions", [
        ("semicircle_analytic", analytic, analytic <= 1e-10),
        ("strong_fd", strong, strong <= 1e-8),
        ("burgers", burgers, burgers <= 1e-12),
        ("clm", clm, clm <= 1e-10), ("clm_mu", mu_clm, True),
        ("gclm_half", gclm, gclm <= 1e-10), ("gclm_mu", mu_gclm, True),
        ("alpha_peye_branches", branches, branches <= 1e-12),
        ("emden_delta_sonic", delta, delta == 0.0),
        ("emden_delta2_axis", delta2, delta2 == 0.0),
    ])


def test_ac11_determinism_and_round_trip(tmp_path, capsys):
    cases = {"autonomous": ["--beta", "-0.5"], "singular": ["--beta", "-0.5", "--c2", "1"],
             "regular": ["--beta", "0.5", "--c2", "1"]}
    checks = []
    for name, argv in cases.items():
        outs = [tmp_path / f"{name}_{k}" for k in (0, 1)]
        codes = [main(["solve", *argv, "--out", str(o)]) for o in outs]
        same = all(c == 0 for c in codes) and all(
            (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in ("bundle.json", "profile.csv"))
        rep = [c for c in load_bundle(outs[0] / "bundle.json").verify() if c.name == "diagnostics_reproduced"][0]
        checks += [(f"{name}_byte_identical", same, same), (f"{name}_reproduction", rep.value, rep.value <= 1e-12)]
    report(capsys, 11, "determinism and bundle round trip", checks)
