"""Command-line interface: ``djlong solve | verify | sweep | reference | export``.

Exit codes: 0 success, 1 verification or solver failure, 2 invalid input, 3 I/O or format error.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import desing, reference
from .autonomous import solve_autonomous
from .bundle import (BundleFormatError, Check, SolutionBundle, bundle_from_irrotational, bundle_from_solution,
                     dumps, load_bundle, write_bundle, write_csv, write_text)
from .errors import DomainError, NumericalError, PreconditionError, SheetPointError
from .fields import ProfileField, QuadratureSpec, bump_test_fields, semicircle_residual, streamline_export, \
    strong_residual_quadrant, weak_residual
from .params import ProfileParams, invalid_reason
from .singular_bvp import RegularizationSchedule, continuation_to_zero, default_grid, random_initial_guess
from .singular_bvp import DEFAULT_N as SINGULAR_N
from .variational import DEFAULT_N as REGULAR_N
from .variational import solve_regular

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3
AUTONOMOUS_N = 8192
FIELD_HEADER = ("r", "phi", "x1", "x2", "u1", "u2", "p", "rho", "omega", "Pi")
DESING_HEADER = ("beta", "sup_dev", "c1_beta", "c2_beta", "combo")
SWEEP_HEADER = ("beta", "status", "solver_tag", "max_residual", "verified", "message")
REFERENCE_KINDS = ("irrotational", "sheet", "static", "clm", "gclm-half", "burgers", "emden", "green")


class InputError(Exception):
    """Invalid command-line input (exit code 2)."""


# ---------------------------------------------------------------------------
# shared helpers


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return int(seed)
    text = os.environ.get("DJLONG_SEED")
    if text is None or text == "":
        return 0
    try:
        return int(text)
    except ValueError:
        raise InputError(f"DJLONG_SEED must be an integer, got {text!r}") from None


def build_params(beta: float, c1=None, c2=None, C1=None, C2=None) -> ProfileParams:
    """Parameters from ``c`` or ``C`` coefficients (not both); invalid combinations raise ``InputError``."""
    if (C1 is not None or C2 is not None) and (c1 is not None or c2 is not None):
        raise InputError("give either --c1/--c2 or --C1/--C2, not both")
    if C1 is not None or C2 is not None:
        params = ProfileParams.from_C(beta, 0.0 if C1 is None else C1, 0.0 if C2 is None else C2)
    else:
        params = ProfileParams.from_c(beta, 1.0 if c1 is None else c1, 0.0 if c2 is None else c2)
    reason = invalid_reason(params.beta, params.c1, params.c2)
    if reason is not None:
        raise InputError(f"invalid parameters (beta={params.beta:g}, c1={params.c1:g}, c2={params.c2:g}): {reason}")
    return params


def autonomous_supported(params: ProfileParams) -> bool:
    return params.c2 == 0 and -2 < params.beta < 0 and params.beta != -1


def solve_profile(params: ProfileParams, grid_n: int | None = None, schedule: RegularizationSchedule | None = None,
                  seed: int = 0, method: str = "auto", solver: str = "auto", init: str = "barrier"):
    """Dispatch by regime; returns ``(bundle kind, solution)``."""
    if params.regime.is_regular:
        if solver == "autonomous":
            raise InputError("the autonomous solver applies to the singular range only")
        return "regular", solve_regular(params, method, seed, REGULAR_N if grid_n is None else grid_n)
    use_autonomous = solver == "autonomous" or (solver == "auto" and autonomous_supported(params)
                                                and schedule is None and init == "barrier")
    if use_autonomous:
        if not autonomous_supported(params):
            raise InputError("the autonomous solver needs -2 < beta < 0, beta != -1 and c2 = 0")
        return "autonomous", solve_autonomous(params, AUTONOMOUS_N if grid_n is None else grid_n)
    grid = default_grid(SINGULAR_N if grid_n is None else grid_n)
    start = random_initial_guess(params, grid, seed) if init == "random" else None
    return "singular", continuation_to_zero(params, schedule, grid, start)


def profile_columns(bundle: SolutionBundle):
    return ("phi", "w", "dw"), (bundle.grid, bundle.w, bundle.dw)


def write_bundle_outputs(out: Path, bundle: SolutionBundle) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_bundle(out / "bundle.json", bundle)
    write_csv(out / "profile.csv", *profile_columns(bundle))


def polar_samples(r_min: float, r_max: float, n_r: int, n_phi: int):
    """Radii ``linspace(r_min, r_max, n_r)`` times ``n_phi`` cell-midpoint angles of ``(-pi, pi)``."""
    if not 0 < r_min <= r_max or n_r < 1 or n_phi < 1:
        raise InputError("need 0 < r-min <= r-max and positive sample counts")
    r = np.linspace(r_min, r_max, n_r)
    phi = -math.pi + (np.arange(n_phi) + 0.5) * (2 * math.pi / n_phi)
    R, P = np.meshgrid(r, phi, indexing="ij")
    return R.ravel(), P.ravel()


def field_columns(field_fn: Callable, r: np.ndarray, phi: np.ndarray):
    s = field_fn(r, phi)
    x1, x2 = r * np.cos(phi), r * np.sin(phi)
    return FIELD_HEADER, (r, phi, x1, x2, s.u_cart[..., 0], s.u_cart[..., 1], s.p, s.rho, s.omega, s.Pi)


def report_checks(checks: Sequence[Check], info: dict | None = None, stream=None) -> dict:
    stream = sys.stdout if stream is None else stream
    for c in checks:
        stream.write(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.3e} (tolerance {c.tolerance:.1e})\n")
    return {"passed": all(c.passed for c in checks),
            "checks": [{"name": c.name, "value": c.value, "tolerance": c.tolerance, "passed": c.passed} for c in checks],
            "info": info or {}}


def check(name: str, value: float, tol: float) -> Check:
    value = float(value)
    return Check(name, value, float(tol), bool(value <= tol))


def field_for_bundle(bundle: SolutionBundle):
    if bundle.kind == "irrotational":
        p = bundle.params
        return reference.ClosedFormField(reference.ClosedFormKind.IRROTATIONAL, p["alpha"], p["C"], p["b"])
    return ProfileField(bundle.solution())


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    params = build_params(args.beta, args.c1, args.c2, args.C1, args.C2)
    seed = resolve_seed(args.seed)
    schedule = RegularizationSchedule.parse(args.eps_schedule) if args.eps_schedule else None
    if schedule is not None and params.regime.is_regular:
        raise InputError("--eps-schedule applies to the singular continuation solver only")
    t0 = time.perf_counter()
    kind, sol = solve_profile(params, args.grid_n, schedule, seed, args.method, args.solver, args.init)
    wall = time.perf_counter() - t0 if args.timing else None
    bundle = bundle_from_solution(kind, sol, seed, wall)
    out = Path(args.out)
    write_bundle_outputs(out, bundle)
    print(f"{kind} profile ({sol.solver_tag}, {sol.grid.size} nodes, regime {params.regime.value}) "
          f"written to {out}; max residual {bundle.diagnostics.max_residual():.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    path = Path(args.bundle)
    bundle = load_bundle(path)
    checks = bundle.verify()
    rep = report_checks(checks, {"kind": bundle.kind, "bundle": str(path)})
    report_path = Path(args.report) if args.report else path.with_name(path.stem + ".verify.json")
    write_text(report_path, dumps(rep))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}")
        return EXIT_FAILED
    print("verification passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def parse_beta_list(text: str) -> list[float]:
    items = [t for t in (p.strip() for p in text.split(",")) if t]
    try:
        return [float(t) for t in items]
    except ValueError as exc:
        raise InputError(f"cannot parse beta list {text!r}: {exc}") from None


def parse_beta_range(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when it lies on the lattice."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise InputError(f"beta range must be start:stop:step, got {text!r}") from None
    if step == 0 or not all(math.isfinite(v) for v in (start, stop, step)) or (stop - start) * step < 0:
        raise InputError("the beta range step must be nonzero and point from start to stop")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def beta_dirname(beta: float) -> str:
    return f"beta={beta:.6f}"


def sweep_point(mode: str, beta: float, c1, c2, grid_n, seed: int, out: str) -> dict:
    """Solve, bundle and write one sweep point; failures are returned as a row, never raised."""
    row = {"beta": beta, "status": "ok", "solver_tag": "", "max_residual": math.nan, "verified": False, "message": ""}
    try:
        params = build_params(beta, c1, c2)
        if mode == "regular" and not params.regime.is_regular:
            raise InputError(f"beta={beta:g} is not in a regular regime")
        if mode == "singular" and not params.regime.is_singular:
            raise InputError(f"beta={beta:g} is not in the singular range")
        kind, sol = solve_profile(params, grid_n, seed=seed)
        bundle = bundle_from_solution(kind, sol, seed)
        write_bundle_outputs(Path(out) / beta_dirname(beta), bundle)
        row.update(solver_tag=sol.solver_tag, max_residual=bundle.diagnostics.max_residual(),
                   verified=all(c.passed for c in bundle.verify()))
        if not row["verified"]:
            row["status"] = "unverified"
    except (InputError, DomainError, PreconditionError, NumericalError, OSError) as exc:
        row.update(status="failed", message=str(exc).replace(",", ";").replace("\n", " "))
    return row


def _desing_sweep(betas, c1, c2, grid_n, seed, out: Path) -> int:
    rep = desing.sheet_limit_report(betas, 1.0 if c1 is None else c1, 1.0 if c2 is None else c2,
                                    REGULAR_N if grid_n is None else grid_n)
    for prof in rep.profiles:
        write_bundle_outputs(out / beta_dirname(prof.beta), bundle_from_solution("desing", prof.solution, seed))
    rows = rep.rows
    write_csv(out / "summary.csv", DESING_HEADER,
              [[r.beta for r in rows], [r.sup_dev for r in rows], [r.c1_beta for r in rows],
               [r.c2_beta for r in rows], [r.combo for r in rows]])
    for r in rows:
        print(f"beta={r.beta:g} sup_dev={r.sup_dev:.6f} combo={r.combo:.6f}")
    print(f"extrapolated combo {rep.extrapolated['combo']:.6f}, sheet value {desing.SHEET_LIMIT_COMBO:.6f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if (args.beta_list is None) == (args.beta_range is None):
        raise InputError("give exactly one of --beta-list and --beta-range")
    betas = parse_beta_list(args.beta_list) if args.beta_list is not None else parse_beta_range(args.beta_range)
    if not betas:
        raise InputError("the beta list is empty")
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.mode == "desing":
        return _desing_sweep(betas, args.c1, args.c2, args.grid_n, seed, out)
    tasks = [(args.mode, b, args.c1, args.c2, args.grid_n, seed, str(out)) for b in betas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(sweep_point, *zip(*tasks)))
    else:
        rows = [sweep_point(*t) for t in tasks]
    cols = [[row[h] if h != "verified" else str(row[h]).lower() for row in rows] for h in SWEEP_HEADER]
    cols[1:3] = [[str(v) for v in c] for c in cols[1:3]]
    cols[5] = [str(v) for v in cols[5]]
    write_csv(out / "summary.csv", SWEEP_HEADER, cols)
    failed = [row for row in rows if row["status"] != "ok"]
    for row in rows:
        print(f"beta={row['beta']:g} {row['status']} {row['message']}".rstrip())
    return EXIT_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# reference


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"cannot parse number list {text!r}") from None


def _ref_irrotational(args, out: Path):
    alpha, C = args.alpha, args.C
    b = args.b if args.b is not None else (-0.5 * C * C if alpha != 0 else 0.0)
    field = reference.ClosedFormField(reference.ClosedFormKind.IRROTATIONAL, alpha, C, b)
    prof = reference.irrotational_semicircle(alpha, C, b, args.grid_n or 1024)
    bundle = bundle_from_irrotational(alpha, C, b, prof.grid, prof.w, prof.dw)
    write_bundle_outputs(out, bundle)
    write_csv(out / "field.csv", *field_columns(field, *polar_samples(args.r_min, args.r_max, args.n_r, args.n_phi)))
    checks = [check("semicircle_residual", semicircle_residual(prof).max_residual(), 1e-10),
              check("strong_residual", strong_residual_quadrant(field), 1e-8)]
    checks += bundle.verify()
    return checks, {"alpha": alpha, "C": C, "b": b}


def _ref_sheet(args, out: Path):
    field = reference.ClosedFormField(reference.ClosedFormKind.VORTEX_SHEET)
    r, phi = polar_samples(args.r_min, args.r_max, args.n_r, args.n_phi)
    header, cols = field_columns(field, r, phi)
    write_csv(out / "field.csv", header, cols)
    p_dev = float(np.max(np.abs(cols[6] + 1.0 / (8.0 * r * r))))
    weak = max(weak_residual(field, tf, QuadratureSpec(args.quad_n, args.quad_n // 4))
               for tf in bump_test_fields(resolve_seed(args.seed)))
    checks = [check("pressure_closed_form", p_dev, 1e-14),
              check("semicircle_residual", semicircle_residual(reference.vortex_sheet_semicircle()).max_residual(), 1e-10),
              check("strong_residual", strong_residual_quadrant(field), 1e-8),
              check("weak_residual", weak, 1e-5)]
    return checks, {}


def _ref_static(args, out: Path):
    coeffs = _parse_floats(args.p_coeffs)
    if not coeffs:
        raise InputError("--p-coeffs needs at least one coefficient")
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    field = reference.ClosedFormField(reference.ClosedFormKind.STATIC_EQUILIBRIUM,
                                      p_of_x2=lambda x: poly(np.asarray(x, dtype=float)),
                                      dp_of_x2=lambda x: dpoly(np.asarray(x, dtype=float)))
    write_csv(out / "field.csv", *field_columns(field, *polar_samples(args.r_min, args.r_max, args.n_r, args.n_phi)))
    return [check("strong_residual", strong_residual_quadrant(field), 1e-8)], {"p_coeffs": coeffs}


def _ref_selfsimilar(pair, a, alpha, profile_fn, args, out: Path):
    x = np.linspace(-10.0, 10.0, args.n_x)
    omega, u = profile_fn(x)
    write_csv(out / "profile.csv", ("x", "omega", "u"), (x, omega, u))
    res, mu = reference.selfsimilar_1d_residual(pair, a, alpha)
    return [check("selfsimilar_residual", res, 1e-10)], {
        "a": a, "alpha": alpha, "fitted_mu": mu, "hilbert_consistency": reference.hilbert_consistency(pair)}


def _ref_burgers(args, out: Path):
    x = np.linspace(-10.0, 10.0, args.n_x)
    u = reference.burgers_profile(x)
    write_csv(out / "profile.csv", ("x", "u"), (x, u))
    return [check("cubic_residual", float(np.max(np.abs(u ** 3 + u + x))), 1e-12)], {}


def _ref_emden(args, out: Path):
    n, l = args.n, args.l
    state = reference.EmdenState(args.w0, args.sigma0, n, l, args.alpha)
    traj = reference.emden_integrate(state, (0.0, args.s_end))
    write_csv(out / "trajectory.csv", ("s", "w", "sigma"), (traj.s, traj.w, traj.sigma))
    d_sonic = reference.emden_rhs(reference.EmdenState(1.0, 0.0, n, l, args.alpha))[0]
    d2_axis = max(abs(reference.emden_rhs(reference.EmdenState(w, 0.0, n, l, args.alpha))[2])
                  for w in np.linspace(-2.0, 2.0, 9))
    branches = reference.alpha_peye_branches(n, float(n))
    checks = [check("delta_at_(1,0)", abs(d_sonic), 0.0),
              check("delta2_at_sigma_0", d2_axis, 0.0),
              check("alpha_peye_branch_agreement", abs(branches[0] - branches[1]), 1e-12)]
    return checks, {"status": traj.status.value, "steps": int(traj.s.size), "alpha_peye": reference.alpha_peye(n, l)}


def _ref_green(args, out: Path):
    pp = args.phi_prime
    if not 0 <= pp <= math.pi:
        raise InputError("--phi-prime must lie in [0, pi]")
    phi = np.linspace(0.0, math.pi, args.n_x)
    G = reference.green_function(phi, pp)
    write_csv(out / "profile.csv", ("phi", "G"), (phi, G))
    expected = np.where(phi <= pp, phi * (math.pi - pp), pp * (math.pi - phi)) / math.pi
    sym = float(np.max(np.abs(G - reference.green_function(pp, phi))))
    return [check("green_closed_form", float(np.max(np.abs(G - expected))), 1e-14),
            check("green_symmetry", sym, 1e-14)], {"phi_prime": pp}


def cmd_reference(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = args.kind
    if kind == "irrotational":
        checks, info = _ref_irrotational(args, out)
    elif kind == "sheet":
        checks, info = _ref_sheet(args, out)
    elif kind == "static":
        checks, info = _ref_static(args, out)
    elif kind == "clm":
        checks, info = _ref_selfsimilar(reference.CLM_PAIR, 0.0, 0.0, reference.clm_profile, args, out)
    elif kind == "gclm-half":
        checks, info = _ref_selfsimilar(reference.GCLM_HALF_PAIR, 0.5, 2.0, reference.gclm_profile_half, args, out)
    elif kind == "burgers":
        checks, info = _ref_burgers(args, out)
    elif kind == "emden":
        checks, info = _ref_emden(args, out)
    else:
        checks, info = _ref_green(args, out)
    rep = report_checks(checks, {"kind": kind, **info})
    write_text(out / "report.json", dumps(rep))
    return EXIT_OK if rep["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# export


def _auto_levels(field_fn, window, count: int = 9) -> list[float]:
    x1 = np.linspace(window[0], window[1], 65)
    x2 = np.linspace(window[2], window[3], 65)
    X1, X2 = np.meshgrid(x1, x2)
    r, phi = np.hypot(X1, X2).ravel(), np.arctan2(X2, X1).ravel()
    keep = r > 1e-12
    with np.errstate(all="ignore"):
        try:
            psi = field_fn(r[keep], phi[keep]).psi
        except SheetPointError:
            ok = np.abs(np.abs(phi[keep]) - math.pi / 2) > 1e-9
            psi = field_fn(r[keep][ok], phi[keep][ok]).psi
    psi = psi[np.isfinite(psi)]
    return [float(v) for v in np.quantile(psi, np.linspace(0.1, 0.9, count))]


def cmd_export(args) -> int:
    bundle = load_bundle(args.bundle)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    what = {w.strip() for w in args.what.split(",") if w.strip()}
    unknown = what - {"bundle", "profile", "field", "streamlines"}
    if unknown or not what:
        raise InputError(f"unknown export target(s): {', '.join(sorted(unknown)) or '(none)'}")
    if "bundle" in what:
        write_bundle(out / "bundle.json", bundle)
    if "profile" in what:
        write_csv(out / "profile.csv", *profile_columns(bundle))
    field_fn = field_for_bundle(bundle) if what & {"field", "streamlines"} else None
    if "field" in what:
        write_csv(out / "field.csv", *field_columns(field_fn, *polar_samples(args.r_min, args.r_max, args.n_r, args.n_phi)))
    if "streamlines" in what:
        window = tuple(_parse_floats(args.window))
        if len(window) != 4 or window[0] >= window[1] or window[2] >= window[3]:
            raise InputError("--window must be x1min,x1max,x2min,x2max with min < max")
        levels = _auto_levels(field_fn, window) if args.levels == "auto" else _parse_floats(args.levels)
        lines = streamline_export(field_fn, levels, window, args.n)
        ids, xs, ys = [], [], []
        for k, line in enumerate(lines):
            ids += [str(k)] * len(line.points)
            xs += list(line.points[:, 0])
            ys += list(line.points[:, 1])
        write_csv(out / "streamlines.csv", ("curve_id", "x1", "x2"), (ids, xs, ys))
    print(f"exported {', '.join(sorted(what))} to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_coefficients(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c1", type=float, default=None, help="normalized Bernoulli coefficient (default 1)")
    p.add_argument("--c2", type=float, default=None, help="normalized density coefficient (default 0)")
    p.add_argument("--C1", type=float, default=None, help="physical Bernoulli coefficient (mapped to c1)")
    p.add_argument("--C2", type=float, default=None, help="physical density coefficient (mapped to c2)")


def _add_sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-min", type=float, default=0.5)
    p.add_argument("--r-max", type=float, default=2.0)
    p.add_argument("--n-r", type=int, default=16)
    p.add_argument("--n-phi", type=int, default=64)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="djlong",
        description="Solve, verify, sweep and export angular profiles of homogeneous steady stratified flows.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve for one profile and write bundle.json and profile.csv")
    p.add_argument("--beta", type=float, required=True)
    _add_coefficients(p)
    p.add_argument("--grid-n", type=int, default=None, help="grid intervals (default depends on the solver)")
    p.add_argument("--eps-schedule", default=None, help="start:stop:ratio or a comma list of eps values")
    p.add_argument("--seed", type=int, default=None, help="seed (fallback: DJLONG_SEED, then 0)")
    p.add_argument("--method", choices=("auto", "newton", "shooting"), default="auto")
    p.add_argument("--solver", choices=("auto", "autonomous", "continuation"), default="auto")
    p.add_argument("--init", choices=("barrier", "random"), default="barrier",
                   help="continuation start: lower barrier or a seeded guess between the barriers")
    p.add_argument("--timing", action="store_true", help="record the wall time in the bundle")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="recompute and check the diagnostics of a bundle")
    p.add_argument("bundle")
    p.add_argument("--report", default=None, help="report path (default <bundle>.verify.json)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="solve over a list of beta values")
    p.add_argument("--beta-list", default=None)
    p.add_argument("--beta-range", default=None, help="start:stop:step")
    p.add_argument("--mode", choices=("regular", "singular", "desing"), required=True)
    _add_coefficients(p)
    p.add_argument("--grid-n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="sweep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reference", help="sample and verify a closed-form solution")
    p.add_argument("--kind", required=True, help=f"one of {', '.join(REFERENCE_KINDS)}")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--p-coeffs", default="0,0,0.5", help="coefficients of p(x2), lowest degree first")
    p.add_argument("--phi-prime", type=float, default=math.pi / 2)
    p.add_argument("--n", type=int, default=3, help="Emden dimension")
    p.add_argument("--l", type=float, default=2.0)
    p.add_argument("--w0", type=float, default=0.2)
    p.add_argument("--sigma0", type=float, default=0.1)
    p.add_argument("--s-end", type=float, default=1.0)
    p.add_argument("--n-x", type=int, default=401)
    p.add_argument("--grid-n", type=int, default=None)
    p.add_argument("--quad-n", type=int, default=512, help="radial nodes of the weak-residual quadrature")
    p.add_argument("--seed", type=int, default=None)
    _add_sampling(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("export", help="export tables and streamlines from a bundle")
    p.add_argument("bundle")
    p.add_argument("--what", default="field,streamlines", help="comma list of bundle, profile, field, streamlines")
    p.add_argument("--levels", default="auto", help="comma list of stream-function levels, or auto")
    p.add_argument("--window", default="-1,1,-1,1")
    p.add_argument("--n", type=int, default=256, help="contouring grid size")
    _add_sampling(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_export)
    return parser


def _reference_defaults(args) -> None:
    if args.kind not in REFERENCE_KINDS:
        raise InputError(f"unknown reference kind {args.kind!r}; choose from {', '.join(REFERENCE_KINDS)}")
    if args.alpha is None:
        args.alpha = {"irrotational": 2.0, "emden": 0.5}.get(args.kind, 0.0)


_NEGATIVE_VALUE = re.compile(r"^-\.?\d")


def attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Join ``--flag -1.9:-0.1:0.2`` into ``--flag=-1.9:-0.1:0.2`` so negative lists parse as values."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "reference":
            _reference_defaults(args)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BundleFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
