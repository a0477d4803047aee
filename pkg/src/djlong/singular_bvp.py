"""Positive solutions of the singular problem on ``(0, pi/2)`` by regularisation.

For ``-2 < beta < 0`` the profile solves ``-w'' - beta^2 w = c1 w^(-s) + c2 sin(phi) w^(-s')``
with ``w(0) = w(pi/2) = 0`` and ``w > 0``. The singular right-hand side is replaced by

    g_eps(phi, t) = c1 (t_+ + eps)^(-s) + c2 sin(phi) (t_+ + eps)^(-s'),

whose functional ``0.5 B(w, w) - integral G_eps`` is strictly convex because ``g_eps`` is
nonincreasing in ``t`` and ``4 - beta^2 > 0``. Each regularised problem is solved by
Newton's method with an Armijo line search on the discrete functional, warm started
along a decreasing ``eps`` schedule, and finished with an ``eps = 0`` solve that keeps
the iterate positive.

The module also provides the explicit barrier constants ``a sin(2 phi) <= w <= b sin(2 phi)^sigma``
and the verifiers built on them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import params as params_mod
from .equation import ode_residual, nonlinearity
from .errors import DomainError, MaximumPrincipleViolation, NonConvergence, PreconditionError
from .grids import cumulative_trapezoid_from_right, derivative, graded_grid
from .operators import ThreePointOperator
from .params import ProfileParams
from .solution import ProfileSolution, ResidualReport

DEFAULT_N = 16384
NEWTON_MAXIT = 200
DESCENT_MAXIT = 2000
STEP_TOL = 1e-12
ARMIJO_C = 1e-4
MIN_DAMPING = 1e-10
BISECTION_TOL = 1e-10
ADMISSIBLE_SIN2PHI = 1e-2
CAUCHY_TOL = 1e-7


# ---------------------------------------------------------------------------
# regularised nonlinearity


def _require_singular(params: ProfileParams) -> None:
    params.require_valid()
    if not params.regime.is_singular:
        raise DomainError(f"regime {params.regime.value} is not singular (-2 < beta < 0)")


def regularized_rhs(phi, t, eps: float, params: ProfileParams) -> np.ndarray:
    """``g_eps(phi, t) = c1 (t_+ + eps)^(-s) + c2 sin(phi) (t_+ + eps)^(-s')``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    return _g(np.asarray(phi, dtype=float), np.asarray(t, dtype=float), eps, params)


def _g(phi, t, eps, params):
    x = np.maximum(t, 0.0) + eps
    with np.errstate(divide="ignore", over="ignore"):
        out = np.zeros(np.broadcast(phi, t).shape)
        if params.c1:
            out = out + params.c1 * x ** (-params.s)
        if params.c2:
            out = out + params.c2 * np.sin(phi) * x ** (-params.s_prime)
    return out


def _dg(phi, t, eps, params):
    x = np.maximum(t, 0.0) + eps
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.zeros(np.broadcast(phi, t).shape)
        if params.c1:
            out = out - params.s * params.c1 * x ** (-params.s - 1.0)
        if params.c2:
            out = out - params.s_prime * params.c2 * np.sin(phi) * x ** (-params.s_prime - 1.0)
    return np.where(t > 0, out, 0.0)


def _power_primitive(x, e):
    """Antiderivative of ``x^(-e)``: ``x^(1-e)/(1-e)``, or ``log x`` at ``e = 1``."""
    if e == 1.0:
        return np.log(x)
    return x ** (1.0 - e) / (1.0 - e)


def regularized_primitive(phi, t, eps: float, params: ProfileParams) -> np.ndarray:
    """A primitive of ``g_eps`` in ``t``, up to an additive constant per angle.

    For ``t >= 0`` it is ``P(t + eps)`` with ``P`` the power antiderivative; for ``t < 0`` it
    continues linearly with slope ``g_eps(phi, 0)``. Dropping the constant ``P(eps)``
    avoids the cancellation of two huge numbers for small ``eps``; constants do not
    change minimisers or line-search comparisons.
    """
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(t, dtype=float)
    x = np.maximum(t, 0.0) + eps
    neg = np.minimum(t, 0.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.zeros(np.broadcast(phi, t).shape)
        if params.c1:
            out = out + params.c1 * _power_primitive(x, params.s)
        if params.c2:
            out = out + params.c2 * np.sin(phi) * _power_primitive(x, params.s_prime)
    if eps > 0:
        out = out + neg * _g(phi, np.zeros_like(t), eps, params)
    else:
        out = np.where(t > 0, out, -np.inf)
    return out


# ---------------------------------------------------------------------------
# schedule and barrier constants


@dataclass(frozen=True)
class RegularizationSchedule:
    """Decreasing regularisation parameters, finished by an ``eps = 0`` solve when ``finish_at_zero``."""

    eps_values: tuple[float, ...]
    tolerance: float = STEP_TOL
    finish_at_zero: bool = True

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_values)
        if not eps:
            raise DomainError("the schedule needs at least one eps value")
        if any(not (e > 0 and math.isfinite(e)) for e in eps):
            raise DomainError("eps values must be positive and finite")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("eps values must be strictly decreasing")
        if eps[0] > 1.0:
            raise DomainError("the first eps value must not exceed 1")
        object.__setattr__(self, "eps_values", eps)

    @classmethod
    def geometric(cls, start: float = 1.0, stop: float = 1e-8, ratio: float = 0.1, **kw) -> "RegularizationSchedule":
        if not 0 < ratio < 1 or not 0 < stop <= start:
            raise DomainError("need 0 < ratio < 1 and 0 < stop <= start")
        n = int(math.floor(math.log(stop / start) / math.log(ratio) + 1e-9)) + 1
        return cls(tuple(start * ratio ** k for k in range(n)), **kw)

    @classmethod
    def parse(cls, text: str) -> "RegularizationSchedule":
        """Parse ``start:stop:ratio`` or a comma-separated list of values."""
        text = text.strip()
        try:
            if ":" in text:
                start, stop, ratio = (float(p) for p in text.split(":"))
                return cls.geometric(start, stop, ratio)
            return cls(tuple(float(p) for p in text.split(",")))
        except ValueError as exc:
            raise DomainError(f"cannot parse eps schedule {text!r}: {exc}") from None

    def to_dict(self) -> dict:
        return {"eps_values": list(self.eps_values), "tolerance": self.tolerance,
                "finish_at_zero": self.finish_at_zero}


@dataclass(frozen=True)
class BarrierConstants:
    """Constants of the pointwise bounds ``a sin(2 phi) <= w <= b sin(2 phi)^sigma``."""

    a_lower: float
    b_upper: float
    sigma: float

    def to_dict(self) -> dict:
        return {"a_lower": self.a_lower, "b_upper": self.b_upper, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, data: dict) -> "BarrierConstants":
        return cls(float(data["a_lower"]), float(data["b_upper"]), float(data["sigma"]))


def _bisect_increasing(f, lo: float, hi: float, tol: float = BISECTION_TOL) -> float:
    """Root of an increasing function with ``f(lo) < 0 <= f(hi)``, to absolute width ``tol``."""
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return hi


def compute_lower_a(params: ProfileParams) -> float:
    """Largest ``a > 0`` for which ``a sin(2 phi)`` is a sub-solution uniformly in ``eps``.

    With ``lam = 4 - beta^2`` the constraints are ``c1 >= a^(s+1) lam`` and
    ``c1 >= a lam (a+1)^s`` when ``c1 > 0``; otherwise ``c2 >= 2 a^(s'+1) lam`` and
    ``c2 >= 2 a lam (a+1)^(s')``. Both left sides increase in ``a``, so the admissible
    set is an interval ``(0, a*]`` and ``a*`` is found by bisection.
    """
    _require_singular(params)
    lam = 4.0 - params.beta ** 2
    if params.c1 > 0:
        coef, e, factor = params.c1, params.s, 1.0
    else:
        coef, e, factor = params.c2, params.s_prime, 2.0

    def excess(a: float) -> float:
        return max(factor * a ** (e + 1.0) * lam - coef, factor * a * lam * (a + 1.0) ** e - coef)

    hi = 1.0
    while excess(hi) <= 0:
        hi *= 2.0
    return _largest_feasible(excess, hi)


def _largest_feasible(excess, hi: float) -> float:
    """Bisection for the right end of ``{a : excess(a) <= 0}`` below ``hi``."""
    lo = 0.0
    while hi - lo > BISECTION_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if excess(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def _check_sigma(params: ProfileParams, sigma: float) -> None:
    lo, hi = params_mod.sigma_range(params.beta)
    if not lo < sigma <= hi or sigma == 1.0:
        raise DomainError(f"sigma = {sigma:g} is outside ({lo:g}, {hi:g}] minus {{1}}")
    s_top = params.s_prime if params.c2 > 0 else params.s
    if not (2.0 - sigma >= sigma * s_top - 1e-14 and sigma * params.s_prime >= sigma * params.s):
        raise PreconditionError("exponent ordering 2 - sigma >= sigma s' >= sigma s fails")


def compute_upper_b(params: ProfileParams, sigma: float | None = None) -> float:
    """Smallest ``b`` with ``b min(4 sigma (1-sigma), 4 sigma - beta^2) >= c1 b^(-s) + c2 b^(-s')``."""
    _require_singular(params)
    if sigma is None:
        sigma = params_mod.default_sigma(params.beta)
    _check_sigma(params, sigma)
    m = min(4.0 * sigma * (1.0 - sigma), 4.0 * sigma - params.beta ** 2)
    if not m > 0:
        raise DomainError("the upper barrier coefficient is not positive")

    def excess(b: float) -> float:
        return b * m - params.c1 * b ** (-params.s) - params.c2 * b ** (-params.s_prime)

    lo, hi = 1.0, 1.0
    while excess(lo) >= 0:
        lo *= 0.5
    while excess(hi) < 0:
        hi *= 2.0
    return float(_bisect_increasing(excess, lo, hi))


def barrier_constants(params: ProfileParams, sigma: float | None = None) -> BarrierConstants:
    if sigma is None:
        sigma = params_mod.default_sigma(params.beta)
    return BarrierConstants(compute_lower_a(params), compute_upper_b(params, sigma), float(sigma))


# ---------------------------------------------------------------------------
# discrete minimisation


@dataclass
class _Functional:
    op: ThreePointOperator
    params: ProfileParams
    eps: float

    @property
    def phi(self) -> np.ndarray:
        return self.op.interior

    def value(self, w: np.ndarray) -> float:
        m = self.op.weights
        G = regularized_primitive(self.phi, w, self.eps, self.params)
        return float(0.5 * self.op.energy(w) - 0.5 * self.params.beta ** 2 * np.dot(m, w * w) - np.dot(m, G))

    def residual(self, w: np.ndarray) -> np.ndarray:
        return self.op.apply(w) - self.params.beta ** 2 * w - _g(self.phi, w, self.eps, self.params)

    def newton_direction(self, w: np.ndarray, R: np.ndarray) -> np.ndarray:
        shift = -self.params.beta ** 2 - _dg(self.phi, w, self.eps, self.params)
        return self.op.solve(shift, -R)

    def preconditioned(self, R: np.ndarray) -> np.ndarray:
        return self.op.solve(np.zeros_like(R), R)


def _feasible(w: np.ndarray, eps: float) -> bool:
    return eps > 0 or bool(np.all(w > 0))


def _line_search(F: _Functional, w, I0, R0, d, slope):
    """Armijo backtracking on the functional, accepting a decrease of the preconditioned residual
    when the functional change is below rounding."""
    merit0 = np.linalg.norm(F.preconditioned(R0))
    lam = 1.0
    while lam >= MIN_DAMPING:
        wn = w + lam * d
        if _feasible(wn, F.eps):
            In = F.value(wn)
            if np.isfinite(In):
                if In <= I0 + ARMIJO_C * lam * slope:
                    return lam, wn, In
                Rn = F.residual(wn)
                if abs(In - I0) <= 1e-13 * max(1.0, abs(I0)) and np.linalg.norm(F.preconditioned(Rn)) < merit0:
                    return lam, wn, In
        lam *= 0.5
    return 0.0, w, I0


def _minimize(F: _Functional, w0: np.ndarray, tol: float) -> tuple[np.ndarray, dict]:
    """Damped Newton on the discrete functional with a preconditioned descent fallback."""
    w = np.array(w0, dtype=float)
    if not _feasible(w, F.eps):
        raise DomainError("the eps = 0 solve needs a positive initial iterate")
    I = F.value(w)
    newton_steps = descent_steps = 0
    method = "newton"
    for _ in range(NEWTON_MAXIT):
        R = F.residual(w)
        d = F.newton_direction(w, R)
        slope = float(np.dot(F.op.weights * R, d))
        if not np.all(np.isfinite(d)) or slope >= 0:
            break
        lam, w_new, I_new = _line_search(F, w, I, R, d, slope)
        if lam == 0.0:
            break
        newton_steps += 1
        step = lam * float(np.max(np.abs(d)))
        w, I = w_new, I_new
        if step <= tol * max(1.0, float(np.max(np.abs(w)))):
            return w, {"method": method, "newton_steps": newton_steps, "descent_steps": 0}
    method = "descent"
    for _ in range(DESCENT_MAXIT):
        R = F.residual(w)
        d = -F.preconditioned(R)
        slope = float(np.dot(F.op.weights * R, d))
        if slope >= 0:
            break
        lam, w_new, I_new = _line_search(F, w, I, R, d, slope)
        if lam == 0.0:
            break
        descent_steps += 1
        step = lam * float(np.max(np.abs(d)))
        w, I = w_new, I_new
        if step <= tol * max(1.0, float(np.max(np.abs(w)))):
            return w, {"method": method, "newton_steps": newton_steps, "descent_steps": descent_steps}
    R = F.residual(w)
    raise NonConvergence(f"Newton and descent stalled at eps = {F.eps:g}", float(np.max(np.abs(R))))


def _interior_init(grid: np.ndarray, init) -> np.ndarray:
    init = np.asarray(init, dtype=float)
    if init.shape == grid.shape:
        return init[1:-1].copy()
    if init.shape == (grid.size - 2,):
        return init.copy()
    raise DomainError("init must have one value per grid node or per interior node")


def _check_positive(grid: np.ndarray, w: np.ndarray, eps: float) -> None:
    if np.any(w <= 0):
        bad = int(np.argmin(w))
        raise MaximumPrincipleViolation(
            f"nonpositive iterate at phi = {grid[bad + 1]:.6g} (eps = {eps:g})", float(w[bad]))


def solve_regularized(params: ProfileParams, eps: float, grid: np.ndarray, init, tol: float = STEP_TOL) -> np.ndarray:
    """Minimise the regularised functional on ``grid`` over ``[0, pi/2]``; returns values at every node."""
    _require_singular(params)
    if not 0 < eps <= 1:
        raise DomainError("eps must lie in (0, 1]")
    w, _ = _solve_step(params, eps, grid, init, tol)
    return w


def _solve_step(params, eps, grid, init, tol):
    grid = np.asarray(grid, dtype=float)
    op = ThreePointOperator(grid)
    w, stats = _minimize(_Functional(op, params, eps), _interior_init(grid, init), tol)
    _check_positive(grid, w, eps)
    return np.concatenate([[0.0], w, [0.0]]), stats


def default_grid(n: int = DEFAULT_N) -> np.ndarray:
    return graded_grid(n, math.pi / 2)


def continuation_to_zero(params: ProfileParams, schedule: RegularizationSchedule | None = None,
                         grid: np.ndarray | None = None, init=None, sigma: float | None = None,
                         cauchy_tol: float = CAUCHY_TOL) -> ProfileSolution:
    """Warm-started chain of regularised solves ending at ``eps = 0``.

    ``init`` defaults to the lower barrier ``a sin(2 phi)``. The continuation history
    records the sup-norm change between successive iterates; the chain fails with
    :class:`NonConvergence` when the final change exceeds ``cauchy_tol``.
    """
    _require_singular(params)
    schedule = schedule or RegularizationSchedule.geometric()
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if not (grid[0] == 0.0 and math.isclose(grid[-1], math.pi / 2)):
        raise DomainError("the singular problem is posed on [0, pi/2]")
    bc = barrier_constants(params, sigma)
    w = bc.a_lower * np.sin(2.0 * grid) if init is None else np.asarray(init, dtype=float)
    history = []
    eps_list = list(schedule.eps_values) + ([0.0] if schedule.finish_at_zero else [])
    prev = None
    for eps in eps_list:
        w, stats = _solve_step(params, eps, grid, w, schedule.tolerance)
        change = None if prev is None else float(np.max(np.abs(w - prev)))
        history.append({"eps": eps, "sup_change": change, **stats})
        prev = w
    last = history[-1]["sup_change"]
    if last is not None and last > cauchy_tol:
        raise NonConvergence(f"continuation not Cauchy: last sup-norm change {last:.3e}", last)
    dw = derivative(grid, w)
    sol = ProfileSolution(params, math.pi / 2, grid, w, dw, "singular-continuation", eps_list[-1],
                          info={"history": history, "barrier": bc.to_dict(), "schedule": schedule.to_dict()})
    return sol.with_diagnostics(singular_report(sol, bc))


def random_initial_guess(params: ProfileParams, grid: np.ndarray, seed: int, sigma: float | None = None) -> np.ndarray:
    """Seeded start strictly between the barriers: ``lower + theta (upper - lower)`` with smooth ``theta``."""
    bc = barrier_constants(params, sigma)
    rng = np.random.default_rng(seed)
    s2 = np.sin(2.0 * np.asarray(grid, dtype=float))
    lower = bc.a_lower * s2
    upper = bc.b_upper * np.abs(s2) ** bc.sigma
    coef = rng.uniform(-1.0, 1.0, size=4) / np.arange(1, 5)
    wave = sum(c * np.sin(2 * (k + 1) * np.asarray(grid)) for k, c in enumerate(coef))
    theta = 0.5 + 0.4 * np.tanh(wave)
    return lower + theta * (upper - lower)


def solve_singular(params: ProfileParams, n: int = DEFAULT_N, schedule: RegularizationSchedule | None = None,
                   init=None) -> ProfileSolution:
    return continuation_to_zero(params, schedule, default_grid(n), init)


# ---------------------------------------------------------------------------
# verifiers


@dataclass(frozen=True)
class BoundsReport:
    """Result of the node-wise barrier check; violation lists hold node indices."""

    passed: bool
    lower_violations: list[int] = field(default_factory=list)
    upper_violations: list[int] = field(default_factory=list)
    lower_margin: float = 0.0
    upper_margin: float = 0.0

    def __bool__(self) -> bool:
        return self.passed


def verify_bounds(sol: ProfileSolution, bc: BarrierConstants, rtol: float = 1e-12) -> BoundsReport:
    """Check ``a sin(2 phi) <= w <= b sin(2 phi)^sigma`` at every node of a quarter-plane profile."""
    if not sol.is_quarter:
        raise DomainError("barrier bounds apply to profiles on (0, pi/2)")
    s2 = np.clip(np.sin(2.0 * sol.grid), 0.0, None)
    lower = bc.a_lower * s2
    upper = bc.b_upper * s2 ** bc.sigma
    slack = rtol * max(1.0, float(np.max(np.abs(sol.w))))
    interior = np.arange(1, sol.grid.size - 1)
    lo_bad = [int(i) for i in interior if sol.w[i] < lower[i] - slack]
    up_bad = [int(i) for i in range(sol.grid.size) if sol.w[i] > upper[i] + slack]
    # The lower bound is vacuous at the ends where both sides vanish; require strict
    # positivity of w on the interior instead of a tolerance there.
    lo_bad += [int(i) for i in interior if sol.w[i] <= 0 and int(i) not in lo_bad]
    lo_margin = float(np.min(sol.w[interior] - lower[interior]))
    up_margin = float(np.min(upper[interior] - sol.w[interior]))
    return BoundsReport(not lo_bad and not up_bad, sorted(lo_bad), up_bad, lo_margin, up_margin)


def discrete_operator_action(grid: np.ndarray, w: np.ndarray, beta: float) -> np.ndarray:
    """``-L_beta w = -w'' - beta^2 w`` at interior nodes with the three-point scheme."""
    op = ThreePointOperator(np.asarray(grid, dtype=float))
    wi = np.asarray(w, dtype=float)
    boundary = np.zeros(wi.size - 2)
    # Three-point action for nonzero boundary values.
    hl, hr, m = op._hl, op._hr, op.weights
    boundary[0] = -wi[0] / (hl[0] * m[0])
    boundary[-1] = -wi[-1] / (hr[-1] * m[-1])
    return op.apply(wi[1:-1]) + boundary - beta ** 2 * wi[1:-1]


def maximum_principle_oracle(grid, w, c, beta: float, tol: float = 1e-9) -> bool:
    """Discrete maximum principle: if ``-L_beta w + c w >= 0`` with ``c >= 0``, then ``w >= min(w(ends))``.

    ``c`` holds one value per interior node (or per node, in which case the ends are
    ignored). The precondition is checked up to ``tol`` relative to the size of the
    terms; a violation raises :class:`PreconditionError`.
    """
    if not -2.0 < beta < 0.0:
        raise PreconditionError("the oracle is stated for -2 < beta < 0")
    grid = np.asarray(grid, dtype=float)
    w = np.asarray(w, dtype=float)
    c = np.asarray(c, dtype=float)
    if c.shape == grid.shape:
        c = c[1:-1]
    if np.any(c < 0) or not np.all(np.isfinite(c)):
        raise PreconditionError("the coefficient c must be finite and nonnegative")
    Lw = discrete_operator_action(grid, w, beta)
    lhs = Lw + c * w[1:-1]
    scale = 1.0 + np.abs(Lw) + np.abs(c * w[1:-1])
    if np.any(lhs < -tol * scale):
        raise PreconditionError("-L_beta w + c w >= 0 does not hold on the interior")
    floor = min(w[0], w[-1])
    return bool(np.all(w >= floor - tol * max(1.0, float(np.max(np.abs(w))))))


def secant_coefficient(grid, w, v, eps: float, params: ProfileParams) -> np.ndarray:
    """``c = -(g_eps(w) - g_eps(v)) / (w - v) >= 0`` at interior nodes (derivative where ``w = v``)."""
    grid = np.asarray(grid, dtype=float)
    phi = grid[1:-1]
    wi, vi = np.asarray(w, float)[1:-1], np.asarray(v, float)[1:-1]
    gw = _g(phi, wi, eps, params) if eps > 0 else nonlinearity(phi, wi, params)
    gv = _g(phi, vi, eps, params) if eps > 0 else nonlinearity(phi, vi, params)
    diff = wi - vi
    with np.errstate(divide="ignore", invalid="ignore"):
        c = -(gw - gv) / diff
    tangent = -_dg(phi, wi, eps if eps > 0 else 0.0, params)
    small = np.abs(diff) <= 1e-14 * np.maximum(1.0, np.abs(wi))
    return np.maximum(np.where(small, tangent, c), 0.0)


def admissible_mask(grid: np.ndarray, threshold: float = ADMISSIBLE_SIN2PHI) -> np.ndarray:
    """Nodes with ``sin(2 phi) >= threshold``, where the singular profile is smooth."""
    return np.sin(2.0 * np.asarray(grid, dtype=float)) >= threshold


def energy_identity_terms(sol: ProfileSolution, mask: np.ndarray | None = None):
    """Terms of the first integral, evaluated at the nodes selected by ``mask``.

    Multiplying the equation by ``w'`` gives the invariant

        |w'|^2 + beta^2 w^2 + 2 c1/(1-s) w^(1-s) + 2 c2/(1-s') sin(phi) w^(1-s')
            + 2 c2/(1-s') integral_phi^{phi_ref} cos w^(1-s') = const,

    with ``phi_ref`` the admissible node closest to ``pi/4``. Returns ``(phi, terms)``.
    """
    p = sol.params
    x = sol.grid
    mask = admissible_mask(x) if mask is None else mask
    xs, w, dw = x[mask], sol.w[mask], sol.dw[mask]
    terms = [dw * dw, p.beta ** 2 * w * w]
    if p.c1:
        terms.append(2.0 * p.c1 / (1.0 - p.s) * w ** (1.0 - p.s))
    if p.c2:
        k = 2.0 * p.c2 / (1.0 - p.s_prime)
        terms.append(k * np.sin(xs) * w ** (1.0 - p.s_prime))
        integrand = np.cos(xs) * w ** (1.0 - p.s_prime)
        from_right = cumulative_trapezoid_from_right(integrand, xs)
        ref = int(np.argmin(np.abs(xs - math.pi / 4)))
        terms.append(k * (from_right - from_right[ref]))
    return xs, terms


def energy_identity_deviation(sol: ProfileSolution, mask: np.ndarray | None = None) -> float:
    """Sup over admissible nodes of ``|E(phi) - E(phi_ref)| / sum |terms(phi)|`` for the first integral ``E``."""
    if not sol.params.regime.is_singular:
        raise DomainError("the first integral is stated for the singular range")
    xs, terms = energy_identity_terms(sol, mask)
    E = sum(terms)
    ref = int(np.argmin(np.abs(xs - math.pi / 4)))
    scale = sum(np.abs(t) for t in terms)
    return float(np.max(np.abs(E - E[ref]) / scale))


class End(str, enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"


def boundary_exponent(sol: ProfileSolution, end: End | str = End.LEFT, n_fit: int = 10) -> float:
    """Least-squares slope of ``log w`` against ``log(distance to the end)`` over the ``n_fit`` nearest nodes."""
    end = End(end)
    x, w = sol.grid, sol.w
    if x.size < n_fit + 1:
        raise DomainError("not enough nodes for the fit")
    if end is End.LEFT:
        d, v = x[1:n_fit + 1] - x[0], w[1:n_fit + 1]
    else:
        d, v = x[-1] - x[-n_fit - 1:-1], w[-n_fit - 1:-1]
    if np.any(v <= 0):
        raise DomainError("the fit window contains nonpositive values of w")
    return float(np.polyfit(np.log(d), np.log(v), 1)[0])


def singular_ode_residual(sol: ProfileSolution, mask: np.ndarray | None = None) -> float:
    """Sup of the relative residual of the singular equation on admissible nodes, with ``w''`` from ``dw``."""
    mask = admissible_mask(sol.grid) if mask is None else mask
    d2w = derivative(sol.grid, sol.dw)
    return float(np.max(ode_residual(sol.grid[mask], sol.w[mask], d2w[mask], sol.params)))


def singular_report(sol: ProfileSolution, bc: BarrierConstants | None = None) -> ResidualReport:
    """Diagnostics of a quarter-plane singular profile computed from its grid values only."""
    mask = admissible_mask(sol.grid)
    report = ResidualReport(
        {"ode": singular_ode_residual(sol, mask)},
        {"w_left": abs(float(sol.w[0])), "w_right": abs(float(sol.w[-1]))},
        float(1.0 - np.count_nonzero(mask) / mask.size),
        {"energy_identity": energy_identity_deviation(sol, mask)},
    )
    if bc is not None:
        br = verify_bounds(sol, bc)
        report = report.merged(ResidualReport(extra={
            "barrier_lower_margin": br.lower_margin, "barrier_upper_margin": br.upper_margin,
            "barrier_violations": float(len(br.lower_violations) + len(br.upper_violations))}))
    return report
