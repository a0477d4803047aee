"""Solution bundles: deterministic JSON persistence, CSV tables and recomputed diagnostics.

A bundle stores a profile with everything needed to verify it again. Its diagnostics are
computed from the stored grid values only, so loading a bundle and re-running the
verification reproduces them exactly.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .errors import DjlongError, DomainError
from .fields import SemicircleProfile, profile_to_semicircle, semicircle_residual
from .grids import derivative
from .params import ProfileParams, RegimeTag
from .singular_bvp import BarrierConstants, barrier_constants, singular_report
from .solution import ProfileSolution, ResidualReport
from .variational import regular_report

SCHEMA_VERSION = "1"
REPRODUCTION_TOL = 1e-12

KINDS = ("regular", "singular", "autonomous", "desing", "irrotational")

DEFAULT_TOLERANCES = {
    "semicircle": 1e-6,
    "discrete_ode": 1e-8,
    "ode": 1e-6,
    "energy_identity": 1e-6,
    "projection_identity": 1e-6,
    "boundary": 1e-12,
    "barrier_violations": 0.0,
}

SEMICIRCLE_KEYS = ("momentum_phi", "momentum_r", "divergence", "density_transport", "first_integral_Pi",
                   "first_integral_rho", "vorticity_transport", "Omega_transport")


class BundleFormatError(DjlongError):
    """A bundle file is unreadable or does not follow the schema."""


# ---------------------------------------------------------------------------
# number formatting


def format_float(x: float) -> str:
    """Shortest decimal that round-trips (at most 17 significant digits); ``inf``/``nan`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return repr(x)


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars and arrays, enums and dataclass dicts to JSON types.

    Non-finite floats become the strings ``"Infinity"``, ``"-Infinity"`` and ``"NaN"``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else format_float(x)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def parse_float(v: Any) -> float:
    if isinstance(v, str):
        table = {"Infinity": math.inf, "-Infinity": -math.inf, "NaN": math.nan}
        if v not in table:
            raise BundleFormatError(f"not a number: {v!r}")
        return table[v]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise BundleFormatError(f"not a number: {v!r}")
    return float(v)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, one-space indent, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_text(path: Path | str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def csv_text(header: Iterable[str], columns: Iterable[Iterable[float]]) -> str:
    """CSV with a header row, shortest round-trip floats and LF line endings."""
    cols = [list(c) for c in columns]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*cols):
        buf.write(",".join(v if isinstance(v, str) else format_float(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path: Path | str, header: Iterable[str], columns: Iterable[Iterable[float]]) -> None:
    write_text(path, csv_text(header, columns))


# ---------------------------------------------------------------------------
# diagnostics


def irrotational_profile_semicircle(grid, w, dw, alpha: float, C: float, b: float) -> SemicircleProfile:
    """Semicircle factors of an irrotational profile from grid values (derivatives by finite differences)."""
    grid = np.asarray(grid, dtype=float)
    w = np.asarray(w, dtype=float)
    a = (1.0 - alpha) * w
    f = -np.asarray(dw, dtype=float)
    zero = np.zeros_like(grid)
    omega = (1.0 - alpha) * a - derivative(grid, f)
    Pi = np.full_like(grid, b + 0.5 * C * C)
    mask = np.ones(grid.size, dtype=bool)
    return SemicircleProfile(grid, w, -f, a, f, np.full_like(grid, b), zero, Pi, omega, zero, mask, alpha=alpha)


def compute_diagnostics(kind: str, sol: ProfileSolution | None = None, barrier: BarrierConstants | None = None,
                        closed_form: dict | None = None, grid=None, w=None, dw=None) -> ResidualReport:
    """Every diagnostic of a bundle, recomputed from its grid values."""
    if kind == "irrotational":
        prof = irrotational_profile_semicircle(grid, w, dw, closed_form["alpha"], closed_form["C"], closed_form["b"])
        rep = semicircle_residual(prof)
        return ResidualReport(rep.eq_residuals, {"w_left": abs(float(w[0]))}, rep.excluded_node_fraction)
    if kind in ("regular", "desing"):
        rep = regular_report(sol)
    elif kind in ("singular", "autonomous"):
        rep = singular_report(sol, barrier)
    else:
        raise DomainError(f"unknown bundle kind {kind!r}")
    return rep.merged(semicircle_residual(profile_to_semicircle(sol)))


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool


def checks_for(report: ResidualReport, tolerances: dict[str, float]) -> list[Check]:
    """Pass/fail of every diagnostic against the recorded tolerances."""
    out = []

    def add(name, value, tol):
        out.append(Check(name, float(value), float(tol), bool(value <= tol)))

    for key, val in sorted(report.eq_residuals.items()):
        if key in SEMICIRCLE_KEYS:
            add(f"semicircle.{key}", val, tolerances["semicircle"])
        elif key in tolerances:
            add(key, val, tolerances[key])
    for key, val in sorted(report.boundary_violations.items()):
        add(f"boundary.{key}", val, tolerances["boundary"])
    for key in ("energy_identity", "projection_identity", "barrier_violations"):
        if key in report.extra:
            add(key, report.extra[key], tolerances[key])
    return out


def reproduction_check(recorded: ResidualReport, recomputed: ResidualReport, tol: float = REPRODUCTION_TOL) -> Check:
    """Largest relative difference between recorded and recomputed diagnostics."""
    a, b = recorded.to_dict(), recomputed.to_dict()
    worst = 0.0
    for section in ("eq_residuals", "boundary_violations", "extra"):
        ka, kb = a[section], b[section]
        if set(ka) != set(kb):
            worst = math.inf
            continue
        for k in ka:
            x, y = float(ka[k]), float(kb[k])
            if math.isnan(x) and math.isnan(y):
                continue
            if x == y:
                continue
            worst = max(worst, abs(x - y) / max(1.0, abs(x)))
    return Check("diagnostics_reproduced", worst, tol, bool(worst <= tol))


# ---------------------------------------------------------------------------
# bundle


@dataclass(frozen=True, eq=False)
class SolutionBundle:
    kind: str
    params: dict
    domain_length: float
    grid: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    diagnostics: ResidualReport
    barrier: dict | None
    provenance: dict
    solver: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "params": self.params,
            "domain_length": self.domain_length,
            "grid": self.grid,
            "w": self.w,
            "dw": self.dw,
            "diagnostics": self.diagnostics.to_dict(),
            "barrier": self.barrier,
            "provenance": self.provenance,
            "solver": self.solver,
        }

    def profile_params(self) -> ProfileParams:
        return ProfileParams.from_dict(self.params)

    def solution(self) -> ProfileSolution:
        if self.kind == "irrotational":
            raise DomainError("an irrotational bundle holds a closed-form profile, not a solver output")
        return ProfileSolution(self.profile_params(), self.domain_length, self.grid, self.w, self.dw,
                               self.provenance.get("solver_tag", ""), 0.0, self.diagnostics, {})

    def barrier_constants(self) -> BarrierConstants | None:
        return None if self.barrier is None else BarrierConstants.from_dict(self.barrier)

    def recompute(self) -> ResidualReport:
        if self.kind == "irrotational":
            return compute_diagnostics(self.kind, closed_form=self.params, grid=self.grid, w=self.w, dw=self.dw)
        return compute_diagnostics(self.kind, self.solution(), self.barrier_constants())

    def verify(self) -> list[Check]:
        """Recompute diagnostics, check them against the recorded tolerances and the recorded values."""
        rep = self.recompute()
        tols = {**DEFAULT_TOLERANCES, **self.provenance.get("tolerances", {})}
        return checks_for(rep, tols) + [reproduction_check(self.diagnostics, rep)]


def provenance(solver_tag: str, seed: int, schedule: dict | None = None, wall_time: float | None = None,
               tolerances: dict | None = None) -> dict:
    return {"solver_tag": solver_tag, "tolerances": dict(tolerances or DEFAULT_TOLERANCES), "seed": int(seed),
            "schedule": schedule, "wall_time": wall_time}


def bundle_from_solution(kind: str, sol: ProfileSolution, seed: int = 0, wall_time: float | None = None) -> SolutionBundle:
    """Bundle a solver output; diagnostics are recomputed from the grid values."""
    if kind not in KINDS:
        raise DomainError(f"unknown bundle kind {kind!r}")
    bc = None
    if kind in ("singular", "autonomous"):
        bc = BarrierConstants.from_dict(sol.info["barrier"]) if "barrier" in sol.info else barrier_constants(sol.params)
    rep = compute_diagnostics(kind, sol, bc)
    prov = provenance(sol.solver_tag, seed, sol.info.get("schedule"), wall_time)
    return SolutionBundle(kind, sol.params.to_dict(), float(sol.domain_length), sol.grid, sol.w, sol.dw, rep,
                          None if bc is None else bc.to_dict(), prov, solver=to_jsonable(sol.info))


def bundle_from_irrotational(alpha: float, C: float, b: float, grid, w, dw, seed: int = 0) -> SolutionBundle:
    cf = {"alpha": float(alpha), "C": float(C), "b": float(b)}
    grid, w, dw = (np.asarray(v, dtype=float) for v in (grid, w, dw))
    rep = compute_diagnostics("irrotational", closed_form=cf, grid=grid, w=w, dw=dw)
    return SolutionBundle("irrotational", cf, math.pi, grid, w, dw, rep, None,
                          provenance("closed-form-irrotational", seed))


def write_bundle(path: Path | str, bundle: SolutionBundle) -> None:
    write_text(path, dumps(bundle.to_dict()))


def _array(data: dict, key: str) -> np.ndarray:
    vals = data.get(key)
    if not isinstance(vals, list):
        raise BundleFormatError(f"field {key!r} must be a list of numbers")
    return np.array([parse_float(v) for v in vals], dtype=float)


def bundle_from_dict(data: Any) -> SolutionBundle:
    if not isinstance(data, dict):
        raise BundleFormatError("bundle must be a JSON object")
    try:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise BundleFormatError(f"unsupported schema version {data.get('schema_version')!r}")
        kind = data["kind"]
        if kind not in KINDS:
            raise BundleFormatError(f"unknown bundle kind {kind!r}")
        params = dict(data["params"])
        grid, w, dw = _array(data, "grid"), _array(data, "w"), _array(data, "dw")
        if not grid.size == w.size == dw.size or grid.size < 8:
            raise BundleFormatError("grid, w and dw must have the same length (at least 8)")
        diag = ResidualReport.from_dict({
            sec: ({k: parse_float(v) for k, v in data["diagnostics"][sec].items()}
                  if sec != "excluded_node_fraction" else parse_float(data["diagnostics"][sec]))
            for sec in ("eq_residuals", "boundary_violations", "excluded_node_fraction", "extra")})
        prov = dict(data["provenance"])
        return SolutionBundle(kind, params, parse_float(data["domain_length"]), grid, w, dw, diag,
                              data.get("barrier"), prov, dict(data.get("solver") or {}), data["schema_version"])
    except BundleFormatError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise BundleFormatError(f"malformed bundle: {exc}") from exc


def load_bundle(path: Path | str) -> SolutionBundle:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BundleFormatError(f"cannot read bundle {path}: {exc}") from exc
    return bundle_from_dict(data)
