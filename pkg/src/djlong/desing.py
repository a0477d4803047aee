"""Normalized family of positive regular profiles approaching the vortex sheet as ``beta -> 0``.

The positive even solution of the regular problem for ``0 < beta < 1`` is divided by its
peak value ``M = w(pi/2)``. The normalized profile solves

    -w'' = beta^2 w + (c1b / beta) w^(1+2/beta) + (c2b / beta) sin(phi) w^(1+3/beta)

on ``(0, pi/2)`` with ``w(0) = 0``, ``w(pi/2) = 1``, ``w'(pi/2) = 0``, where
``c1b = beta c1 M^(2/beta)`` and ``c2b = beta c2 M^(3/beta)``. As ``beta -> 0`` the profile
tends to ``2 phi / pi``, the stream function of the vortex sheet, and the combination
``c1b/(beta+1) + c2b/(beta+3/2) (1 - f_beta(0))`` tends to ``4/pi^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .fields import ProfileField
from .grids import cumulative_trapezoid_from_right, trapezoid
from .params import ProfileParams, RegimeTag
from .solution import ProfileSolution
from .variational import DEFAULT_N, polish_regular, solve_regular

SHEET_LIMIT_COMBO = 4.0 / math.pi ** 2
SHEET_VELOCITY_SCALE = 4.0 / math.pi
DEFAULT_SCHEDULE = (0.5, 0.3, 0.2, 0.1, 0.05)


@dataclass(frozen=True, eq=False)
class NormalizedProfile:
    """Normalized profile on the nodes ``grid`` of ``[0, pi/2]`` and the constants of its equation.

    ``solution`` holds the normalized profile on the full interval ``[0, pi]`` with the
    equation coefficients ``(c1b / beta, c2b / beta)``, ready for field evaluation.
    """

    beta: float
    grid: np.ndarray
    w_tilde: np.ndarray
    dw_tilde: np.ndarray
    c1_beta: float
    c2_beta: float
    M: float
    f_beta: np.ndarray
    solution: ProfileSolution
    source: ProfileSolution

    @property
    def f_beta_at_0(self) -> float:
        return float(self.f_beta[0])

    @property
    def combo(self) -> float:
        """``c1b/(beta+1) + c2b/(beta+3/2) (1 - f_beta(0))``, which equals ``w'(0)^2 - beta^2``."""
        b = self.beta
        return self.c1_beta / (b + 1.0) + self.c2_beta / (b + 1.5) * (1.0 - self.f_beta_at_0)

    @property
    def sheet_deviation(self) -> float:
        return float(np.max(np.abs(self.w_tilde - 2.0 * self.grid / math.pi)))

    def peak_pressure_combo(self) -> float:
        """``beta^2 + c1b/(beta+1) + c2b/(beta+3/2)``."""
        b = self.beta
        return b * b + self.c1_beta / (b + 1.0) + self.c2_beta / (b + 1.5)


def _check_family_params(beta: float, c1: float, c2: float) -> None:
    if not 0.0 < beta < 1.0:
        raise DomainError("the normalized family needs 0 < beta < 1")
    if c1 < 0 or c2 < 0 or (c1 == 0 and c2 == 0):
        raise PreconditionError("the normalized family needs c1, c2 >= 0, not both zero")


def normalize(sol: ProfileSolution) -> NormalizedProfile:
    """Normalize a positive even regular solution on ``[0, pi]`` by its value at ``pi/2``."""
    p = sol.params
    beta = p.beta
    n = sol.grid.size - 1
    if n % 2:
        raise PreconditionError("the grid must contain pi/2 as a node")
    mid = n // 2
    M = float(sol.w[mid])
    if not M > 0:
        raise PreconditionError("the profile is not positive at pi/2")
    c1b = beta * p.c1 * M ** (2.0 / beta) if p.c1 else 0.0
    c2b = beta * p.c2 * M ** (3.0 / beta) if p.c2 else 0.0
    w_full = sol.w / M
    dw_full = sol.dw / M
    grid = sol.grid[: mid + 1]
    wq = w_full[: mid + 1]
    e = 2.0 + 3.0 / beta
    f_beta = cumulative_trapezoid_from_right(np.cos(grid) * wq ** e, grid)
    normalized = ProfileParams.from_c(beta, c1b / beta, c2b / beta)
    nsol = ProfileSolution(normalized, sol.domain_length, sol.grid, w_full, dw_full, sol.solver_tag,
                           sol.eps_final, sol.diagnostics, dict(sol.info, peak=M))
    return NormalizedProfile(beta, grid, wq, dw_full[: mid + 1], c1b, c2b, M, f_beta, nsol, sol)


def _warm_guess(prev: NormalizedProfile, beta: float, c1: float, c2: float) -> np.ndarray:
    """Previous normalized profile scaled by the peak that keeps ``c1b`` (or ``c2b``) unchanged."""
    if c1:
        M = (prev.c1_beta / (beta * c1)) ** (beta / 2.0)
    else:
        M = (prev.c2_beta / (beta * c2)) ** (beta / 3.0)
    return M * prev.solution.w


def solve_normalized_family(beta: float, c1: float = 1.0, c2: float = 1.0, n: int = DEFAULT_N,
                            warm_start: NormalizedProfile | None = None) -> NormalizedProfile:
    """Normalized profile at ``beta``; ``warm_start`` continues from a neighbouring member."""
    _check_family_params(beta, c1, c2)
    params = ProfileParams.from_c(beta, c1, c2).require_valid()
    if params.regime is not RegimeTag.REGULAR_SUPERLINEAR:
        raise DomainError("the normalized family lives in the superlinear regular regime")
    if warm_start is None:
        sol = solve_regular(params, n=n)
    else:
        sol = polish_regular(params, _warm_guess(warm_start, beta, c1, c2), n)
    return normalize(sol)


def energy_identity_terms(profile: NormalizedProfile) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the first integral ``|w'|^2 = beta^2(1-w^2) + ...`` on the quarter nodes."""
    b = profile.beta
    w = profile.w_tilde
    lhs = profile.dw_tilde ** 2
    rhs = (b * b * (1.0 - w * w)
           + profile.c1_beta / (b + 1.0) * (1.0 - w ** (2.0 + 2.0 / b))
           + profile.c2_beta / (b + 1.5) * (1.0 - np.sin(profile.grid) * w ** (2.0 + 3.0 / b) - profile.f_beta))
    return lhs, rhs


def first_integral_deviation(profile: NormalizedProfile, phi=None):
    """Deviation ``|LHS - RHS|`` of the first integral at the quarter node nearest ``phi``.

    With ``phi=None`` the deviation at every node is returned.
    """
    lhs, rhs = energy_identity_terms(profile)
    dev = np.abs(lhs - rhs)
    if phi is None:
        return dev
    phi_arr = np.asarray(phi, dtype=float)
    idx = np.abs(profile.grid[:, None] - np.atleast_1d(phi_arr)[None, :]).argmin(axis=0)
    out = dev[idx]
    return float(out[0]) if phi_arr.ndim == 0 else out


def trace_identity(profile: NormalizedProfile) -> tuple[float, float]:
    """``w'(0)`` and ``beta^2 int w + (c1b/beta) int w^(1+2/beta) + (c2b/beta) int sin w^(1+3/beta)``."""
    b = profile.beta
    x, w = profile.grid, profile.w_tilde
    rhs = (b * b * trapezoid(w, x) + profile.c1_beta / b * trapezoid(w ** (1.0 + 2.0 / b), x)
           + profile.c2_beta / b * trapezoid(np.sin(x) * w ** (1.0 + 3.0 / b), x))
    return float(profile.dw_tilde[0]), float(rhs)


@dataclass(frozen=True)
class FamilyChecks:
    """Node-wise inequalities satisfied by every member of the family."""

    f_beta_decreasing: bool
    tail_lower_bound: bool
    derivative_decreasing: bool
    c1_bound: bool
    c2_bound: bool


ENDPOINT_SERIES_S2 = math.pi / 2


def family_checks(profile: NormalizedProfile, tol: float = 1e-10) -> FamilyChecks:
    """Monotonicity of ``f_beta`` and ``w'``, the lower bound of ``1 - sin w^e - f_beta``, and the constant bounds.

    The constant bounds use ``integral_0^1 (1 - s^2)^(-1/2) ds = pi/2``.
    """
    b = profile.beta
    w, fb, dw = profile.w_tilde, profile.f_beta, profile.dw_tilde
    e = 2.0 + 3.0 / b
    we = w ** e
    tail_lhs = 1.0 - np.sin(profile.grid) * we - fb
    tail_rhs = (1.0 - fb[0]) * (1.0 - we)
    c2_lim = ENDPOINT_SERIES_S2 / math.sqrt(1.0 - fb[0])
    return FamilyChecks(
        f_beta_decreasing=bool(np.all(np.diff(fb) <= tol)),
        tail_lower_bound=bool(np.all(tail_lhs >= tail_rhs - tol)),
        derivative_decreasing=bool(np.all(np.diff(dw) <= tol * max(1.0, abs(dw[0])))),
        c1_bound=bool(profile.c1_beta <= b + 1.0 + tol),
        c2_bound=bool(0.5 * math.pi * math.sqrt(profile.c2_beta / (b + 1.5)) <= c2_lim + tol),
    )


@dataclass(frozen=True)
class SheetLimitRow:
    beta: float
    sup_dev: float
    c1_beta: float
    c2_beta: float
    combo: float
    f_beta_at_0: float
    M: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class SheetLimitReport:
    """Rows per ``beta`` in schedule order, Richardson limits and the monotonicity flag."""

    rows: list[SheetLimitRow]
    extrapolated: dict[str, float]
    deviation_monotone: bool
    profiles: list[NormalizedProfile] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "extrapolated": dict(self.extrapolated),
                "deviation_monotone": self.deviation_monotone}


def richardson_limit(betas, values) -> float:
    """Value at ``beta = 0`` of the quadratic through the last three points."""
    b = np.asarray(betas, dtype=float)[-3:]
    v = np.asarray(values, dtype=float)[-3:]
    if b.size < 3:
        return float(v[-1])
    coef = np.polyfit(b, v, 2)
    return float(np.polyval(coef, 0.0))


def _check_schedule(schedule) -> list[float]:
    sched = [float(v) for v in schedule]
    if not sched:
        raise DomainError("empty beta schedule")
    if any(not 0.0 < v < 1.0 for v in sched):
        raise DomainError("schedule values must lie in (0, 1)")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise DomainError("schedule must be strictly decreasing")
    return sched


def sheet_limit_report(beta_schedule=DEFAULT_SCHEDULE, c1: float = 1.0, c2: float = 1.0,
                       n: int = DEFAULT_N) -> SheetLimitReport:
    """Walk the schedule with warm starts and tabulate the approach to the vortex sheet.

    A deviation that fails to decrease strictly along the schedule raises a
    ``RuntimeWarning`` and clears ``deviation_monotone``; it is not an error.
    """
    sched = _check_schedule(beta_schedule)
    profiles: list[NormalizedProfile] = []
    prev = None
    for beta in sched:
        prev = solve_normalized_family(beta, c1, c2, n=n, warm_start=prev)
        profiles.append(prev)
    rows = [SheetLimitRow(p.beta, p.sheet_deviation, p.c1_beta, p.c2_beta, p.combo, p.f_beta_at_0, p.M)
            for p in profiles]
    devs = [r.sup_dev for r in rows]
    monotone = all(b < a for a, b in zip(devs, devs[1:]))
    if not monotone:
        warnings.warn("sheet deviation is not strictly decreasing along the schedule", RuntimeWarning, stacklevel=2)
    extrap = {
        "sup_dev": richardson_limit(sched, devs),
        "combo": richardson_limit(sched, [r.combo for r in rows]),
        "c1_beta": richardson_limit(sched, [r.c1_beta for r in rows]),
        "c2_beta": richardson_limit(sched, [r.c2_beta for r in rows]),
    }
    return SheetLimitReport(rows, extrap, monotone, profiles)


def desingularized_field(beta: float, profile: NormalizedProfile) -> ProfileField:
    """Field evaluator of the homogeneous solution built from the normalized profile.

    Its velocity satisfies ``-r^alpha u = beta w e_phi + w' e_r`` and its pressure
    ``-2 r^(2 alpha) p = |w'|^2 + beta^2 w^2 + c1b/(beta+1) w^(2+2/beta) + c2b/(beta+3/2) sin w^(2+3/beta)``.
    Dividing the velocity by ``SHEET_VELOCITY_SCALE`` and the pressure and density by its
    square gives fields that approach the vortex sheet as ``beta -> 0``.
    """
    if not math.isclose(beta, profile.beta, rel_tol=0.0, abs_tol=1e-14):
        raise PreconditionError("beta does not match the profile")
    return ProfileField(profile.solution)
