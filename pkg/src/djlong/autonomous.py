"""Exact solver for the autonomous singular problem by integral inversion.

For ``c2 = 0`` and ``-2 < beta < 0`` the positive profile on ``(0, pi/2)`` is
symmetric about ``pi/4`` and its increasing quarter obeys the first integral

    |w'|^2 + beta^2 w^2 + (2 c1/(1-s)) w^(1-s) = beta^2 B^2 + (2 c1/(1-s)) B^(1-s),

with ``B`` the maximum. With ``c1 = 1`` the angle at which the quarter reaches
height ``w`` is

    phi_s(w; B) = integral_0^w d eta / sqrt(beta^2 (B^2 - eta^2) + 2/(1-s) (B^(1-s) - eta^(1-s))),

and the amplitude ``B_s`` is fixed by ``phi_s(B_s; B_s) = target``. A general
``c1 > 0`` follows from the scaling ``w = c1^(-beta/2) wbar``.

The square-root zero of the denominator at ``eta = B`` is removed by the
substitution ``eta = B cos(psi)``; the remaining smooth integral over
``psi in [arccos(w/B), pi/2]`` is evaluated with a vectorised tanh-sinh rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import BracketError, DomainError, NumericalError
from .grids import graded_grid
from .params import ProfileParams, RegimeTag
from .solution import ProfileSolution

QUADRATURE_LEVEL = 7
MAX_QUADRATURE_LEVEL = 12
QUADRATURE_TOL = 1e-12
MATCH_TOL = 1e-10
BRACKET_START = (1e-6, 1.0)
BRACKET_CAP = 1e12
EXPANSION_BUDGET = 200
INVERSION_MAXIT = 100

# Eighth-order central-difference weights for a first derivative.
_CENTRAL8 = np.array([4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0])


@lru_cache(maxsize=None)
def _tanh_sinh(level: int, tmax: float = 3.2) -> tuple[np.ndarray, np.ndarray]:
    h = 4.0 * 2.0 ** (-level)
    t = np.arange(-tmax, tmax + 0.5 * h, h)
    u = 0.5 * np.pi * np.sinh(t)
    x = np.tanh(u)
    wts = h * 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    x.setflags(write=False)
    wts.setflags(write=False)
    return x, wts


def _check_params(params: ProfileParams) -> None:
    if not -2.0 < params.beta < 0.0 or params.beta == -1.0:
        raise DomainError(f"the autonomous problem needs -2 < beta < 0 with beta != -1, got {params.beta:g}")
    if params.c2 != 0.0:
        raise DomainError("the autonomous problem needs c2 = 0")


def _energy(psi: np.ndarray, B: float, beta: float, s: float) -> np.ndarray:
    """Denominator squared of the matching integrand in the variable ``psi``."""
    B = np.float64(B)
    with np.errstate(over="ignore", divide="ignore"):
        log_cos = np.log1p(-2.0 * np.sin(0.5 * psi) ** 2)
        return (beta * B * np.sin(psi)) ** 2 + (2.0 / (1.0 - s)) * B ** (1.0 - s) * (-np.expm1((1.0 - s) * log_cos))


def _phi_from_psi(psi_lo: np.ndarray, B: float, beta: float, s: float, level: int) -> np.ndarray:
    x, wts = _tanh_sinh(level)
    lo = np.atleast_1d(np.asarray(psi_lo, dtype=float))
    half = 0.5 * (0.5 * np.pi - lo)
    nodes = (0.5 * np.pi + lo)[:, None] * 0.5 + half[:, None] * x[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = B * np.sin(nodes) / np.sqrt(_energy(nodes, B, beta, s))
    f = np.where(np.isfinite(f), f, 0.0)
    return half * (f @ wts)


def _probe_angles() -> np.ndarray:
    return np.linspace(0.0, 0.5 * np.pi, 9)[:-1]


def required_level(B: float, params: ProfileParams, psi_lo=None) -> tuple[int, float]:
    """Smallest tanh-sinh level whose values agree with the next level to ``QUADRATURE_TOL``.

    Returns ``(level, estimate)``; raises :class:`NumericalError` if no level up to
    ``MAX_QUADRATURE_LEVEL`` is accurate enough.
    """
    probe = _probe_angles() if psi_lo is None else np.atleast_1d(psi_lo)
    prev = _phi_from_psi(probe, B, params.beta, params.s, QUADRATURE_LEVEL)
    est = math.inf
    for level in range(QUADRATURE_LEVEL, MAX_QUADRATURE_LEVEL):
        nxt = _phi_from_psi(probe, B, params.beta, params.s, level + 1)
        est = float(np.max(np.abs(nxt - prev)))
        if est <= QUADRATURE_TOL * max(1.0, float(np.max(np.abs(nxt)))):
            return level, est
        prev = nxt
    raise NumericalError(f"tanh-sinh quadrature did not converge (estimate {est:.3e})", est)


def phi_of_w(w, B: float, params: ProfileParams):
    """Angle ``phi_s(w; B)`` of the normalised (``c1 = 1``) autonomous quarter profile.

    Vectorised over ``w``. The tanh-sinh level is raised until two successive
    levels agree to ``QUADRATURE_TOL``; failure raises :class:`NumericalError`.
    """
    _check_params(params)
    if not B > 0:
        raise DomainError("B must be positive")
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr < 0) or np.any(w_arr > B * (1 + 1e-15)):
        raise DomainError("phi_of_w needs 0 <= w <= B")
    psi_lo = np.arccos(np.clip(np.atleast_1d(w_arr) / B, 0.0, 1.0))
    level, _ = required_level(B, params, psi_lo)
    val = _phi_from_psi(psi_lo, B, params.beta, params.s, level)
    return val.reshape(w_arr.shape) if w_arr.ndim else float(val[0])


def limit_angle(params: ProfileParams) -> float:
    """Supremum ``(1+s) pi/4`` of ``phi_s(B; B)`` over ``B > 0``."""
    return (1.0 + params.s) * math.pi / 4.0


@dataclass(frozen=True)
class AmplitudeMatch:
    """Matched amplitude of the normalised problem.

    ``B_s`` solves ``phi_s(B_s; B_s) = target_angle`` for ``c1 = 1``; the physical
    maximum of the profile is ``scale * B_s`` with ``scale = c1^(-beta/2)``.
    """

    B_s: float
    target_angle: float
    bracketing_interval: tuple[float, float]
    iterations: int
    residual: float
    scale: float = 1.0

    @property
    def amplitude(self) -> float:
        return self.scale * self.B_s


def find_matching_amplitude(params: ProfileParams, target_angle: float = math.pi / 4) -> AmplitudeMatch:
    """Solve ``phi_s(B; B) = target_angle`` by bisection on an expanded bracket."""
    _check_params(params)
    if params.regime is not RegimeTag.SINGULAR_AUTONOMOUS:
        raise DomainError(f"regime {params.regime.value} is not SingularAutonomous")
    limit = limit_angle(params)
    if not target_angle > 0:
        raise DomainError("target angle must be positive")
    if target_angle >= limit:
        raise BracketError(
            f"target {target_angle:.6g} is not below the limit angle (1+s)pi/4 = {limit:.6g}", target_angle - limit)

    def h(B: float) -> float:
        return phi_of_w(B, B, params) - target_angle

    lo, hi = BRACKET_START
    h_lo, h_hi = h(lo), h(hi)
    budget = EXPANSION_BUDGET
    while h_hi < 0:
        lo, h_lo = hi, h_hi
        hi *= 2.0
        budget -= 1
        if hi > BRACKET_CAP or budget <= 0:
            raise BracketError(f"no sign change of phi_s(B;B) - target below B = {BRACKET_CAP:g}", h_hi)
        h_hi = h(hi)
    while h_lo > 0:
        hi, h_hi = lo, h_lo
        lo *= 0.5
        budget -= 1
        if lo < 1e-300 or budget <= 0:
            raise BracketError("no sign change of phi_s(B;B) - target near B = 0", h_lo)
        h_lo = h(lo)
    bracket = (lo, hi)
    it = 0
    mid, h_mid = lo, h_lo
    while it < 400:
        it += 1
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
        if h_mid == 0 or (hi - lo) <= 4 * np.finfo(float).eps * mid:
            break
        if h_mid < 0:
            lo = mid
        else:
            hi = mid
    if abs(h_mid) > MATCH_TOL:
        raise NumericalError(f"amplitude matching stalled at |h| = {abs(h_mid):.3e}", abs(h_mid))
    scale = params.c1 ** (-params.beta / 2.0)
    return AmplitudeMatch(float(mid), float(target_angle), bracket, it, float(abs(h_mid)), float(scale))


def _invert_psi(target: np.ndarray, B: float, params: ProfileParams, quarter_angle: float,
                level: int = QUADRATURE_LEVEL) -> np.ndarray:
    """Find ``psi`` with ``phi(psi) = target`` by safeguarded Newton; ``w = B cos(psi)``."""
    beta, s = params.beta, params.s
    lo = np.zeros_like(target)
    hi = np.full_like(target, 0.5 * np.pi)
    psi = 0.5 * np.pi * (1.0 - target / quarter_angle)
    psi = np.clip(psi, 0.0, 0.5 * np.pi)
    for _ in range(INVERSION_MAXIT):
        F = _phi_from_psi(psi, B, beta, s, level) - target
        lo = np.where(F > 0, psi, lo)
        hi = np.where(F <= 0, psi, hi)
        pc = np.maximum(psi, 1e-150)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = -B * np.sin(pc) / np.sqrt(_energy(pc, B, beta, s))
            step = psi - F / slope
        ok = np.isfinite(step) & (step >= lo) & (step <= hi)
        new = np.where(F == 0, psi, np.where(ok, step, 0.5 * (lo + hi)))
        change = np.abs(new - psi)
        psi = new
        if change.size == 0 or change.max() <= 1e-15:
            return psi
    bad = int(np.argmax(change))
    raise NumericalError(f"inversion failed at node {bad} (phi = {target[bad]:.17g})", float(change[bad]))


@dataclass(frozen=True, eq=False)
class QuarterProfile:
    """Increasing quarter of the profile on ``[0, target_angle]``."""

    grid: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    target_angle: float
    params: ProfileParams


class AutonomousProfile:
    """Exact evaluator of the autonomous profile obtained from an :class:`AmplitudeMatch`.

    The increasing quarter on ``[0, q]`` (``q = target_angle``) is reflected evenly about
    ``q`` into a positive lobe on ``[0, 2q]``; successive lobes alternate in sign.
    """

    def __init__(self, match: AmplitudeMatch, params: ProfileParams):
        _check_params(params)
        self.match = match
        self.params = params
        self._level, _ = required_level(match.B_s, params)
        self._top = float(_phi_from_psi(np.zeros(1), match.B_s, params.beta, params.s, self._level)[0])

    @property
    def quarter_angle(self) -> float:
        return self.match.target_angle

    def _fold(self, phi):
        q = self.quarter_angle
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        lobe = np.floor(phi / (2 * q))
        local = phi - 2 * q * lobe
        lobe = np.where(local < 0, lobe - 1, lobe)
        local = np.clip(phi - 2 * q * lobe, 0.0, 2 * q)
        folded = np.minimum(local, 2 * q - local)
        sign = np.where(lobe % 2 == 0, 1.0, -1.0)
        slope_sign = np.where(local <= q, 1.0, -1.0)
        return np.clip(folded, 0.0, q), sign, slope_sign

    def _psi(self, folded: np.ndarray) -> np.ndarray:
        # Stretch angles so the grid top maps exactly onto the angle reached by B_s;
        # the matching defect (below 1e-10) then shifts angles instead of
        # leaving a square-root kink in w' at the top.
        top = self._top
        return _invert_psi(folded * (top / self.quarter_angle), self.match.B_s, self.params, top, self._level)

    def evaluate(self, phi) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(w, dw)`` at the angles ``phi``."""
        folded, sign, slope_sign = self._fold(phi)
        psi = self._psi(folded)
        B = self.match.B_s
        scale = self.match.scale
        w = scale * B * np.cos(psi)
        with np.errstate(invalid="ignore"):
            dwbar = np.sqrt(np.maximum(_energy(psi, B, self.params.beta, self.params.s), 0.0))
        # w'(phi) scales as c1^(-beta/2) like w because the angle is unchanged.
        return sign * w, sign * slope_sign * scale * dwbar

    def first_integral_constant(self) -> float:
        beta, s, c1 = self.params.beta, self.params.s, self.params.c1
        A = self.match.amplitude
        return beta * beta * A * A + 2.0 * c1 / (1.0 - s) * A ** (1.0 - s)

    def ode_residual(self, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Pointwise residual of ``-w'' - beta^2 w - c1 w^(-s)`` at interior angles of a positive lobe.

        ``w''`` is an eighth-order central difference of the exact derivative
        evaluated by re-inversion at ``phi +- k d`` with ``d`` one percent of the
        distance to the nearer zero, taken on the half of the lobe next to that zero. Returns ``(absolute, relative)`` residuals, the
        relative one divided by ``1 + |w''| + beta^2 |w| + c1 w^(-s)``.
        """
        phi = np.asarray(phi, dtype=float)
        q = self.quarter_angle
        dist = np.minimum(phi, 2 * q - phi)
        if np.any(dist <= 0) or np.any(phi >= 2 * q):
            raise DomainError("ode_residual needs angles strictly inside the first lobe")
        # The lobe is symmetric about q and the equation is autonomous, so the residual at phi
        # equals the one at 2q - phi. Working from the nearer zero keeps the small stencil
        # steps resolvable in floating point next to the far end.
        phi = np.where(phi > q, 2 * q - phi, phi)
        d = 0.01 * dist
        wpp = np.zeros_like(phi)
        for k, c in enumerate(_CENTRAL8, start=1):
            wpp += c * (self.evaluate(phi + k * d)[1] - self.evaluate(phi - k * d)[1])
        wpp /= d
        w = self.evaluate(phi)[0]
        beta, s, c1 = self.params.beta, self.params.s, self.params.c1
        nonlin = c1 * w ** (-s)
        res = -wpp - beta * beta * w - nonlin
        return np.abs(res), np.abs(res) / (1.0 + np.abs(wpp) + beta * beta * np.abs(w) + np.abs(nonlin))


def invert_profile(match: AmplitudeMatch, params: ProfileParams, n_nodes: int) -> QuarterProfile:
    """Sample the increasing quarter at ``n_nodes`` equally spaced angles in ``[0, target_angle]``."""
    if n_nodes < 2:
        raise DomainError("need at least two nodes")
    prof = AutonomousProfile(match, params)
    grid = np.linspace(0.0, match.target_angle, int(n_nodes))
    w, dw = prof.evaluate(grid)
    w[0] = 0.0
    return QuarterProfile(grid, w, dw, match.target_angle, params)


def assemble_reflections(quarter: QuarterProfile, m: int) -> ProfileSolution:
    """Build the sign-changing profile on ``(0, pi)`` with ``m`` lobes from a quarter of width ``pi/(2m)``.

    Each lobe is the quarter followed by its mirror image; successive lobes are
    odd reflections of each other, so ``w`` vanishes at ``k pi/m``.
    """
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    m = int(m)
    params = quarter.params
    if m == 1 and params.beta <= -1:
        raise DomainError("m = 1 needs -1 < beta < 0: the angle pi/2 is beyond the limit angle")
    q = math.pi / (2 * m)
    if not math.isclose(quarter.target_angle, q, rel_tol=0, abs_tol=1e-12):
        raise DomainError(f"quarter width {quarter.target_angle:.6g} does not match pi/(2m) = {q:.6g}")
    g, w, dw = quarter.grid, quarter.w, quarter.dw
    lobe_x = np.concatenate([g, 2 * q - g[-2::-1]])
    lobe_w = np.concatenate([w, w[-2::-1]])
    lobe_dw = np.concatenate([dw, -dw[-2::-1]])
    xs, ws, dws = [lobe_x], [lobe_w], [lobe_dw]
    for j in range(1, m):
        sign = -1.0 if j % 2 else 1.0
        xs.append(lobe_x[1:] + 2 * q * j)
        ws.append(sign * lobe_w[1:])
        dws.append(sign * lobe_dw[1:])
    grid = np.concatenate(xs)
    grid[-1] = math.pi
    wv = np.concatenate(ws)
    dwv = np.concatenate(dws)
    # One-sided derivatives at each interior zero: the end of lobe j against the start of lobe j+1.
    jump = 0.0
    for j in range(1, m):
        left = (-1.0 if (j - 1) % 2 else 1.0) * lobe_dw[-1]
        right = (-1.0 if j % 2 else 1.0) * lobe_dw[0]
        jump = max(jump, abs(left - right))
    jump = max(jump, abs(quarter.dw[-1]))
    return ProfileSolution(params, math.pi, grid, wv, dwv, f"autonomous-reflect-m{m}",
                           info={"lobes": m, "max_derivative_jump": float(jump)})


def endpoint_series(s: float, n_terms: int) -> float:
    """Partial sum ``1 + sum_{n=1}^{n_terms} (2n-1)!!/((2n)!! (s n + 1))``."""
    if not s > 0:
        raise DomainError("s must be positive")
    if n_terms <= 0:
        return 1.0
    n = np.arange(1, int(n_terms) + 1, dtype=float)
    ratios = np.cumprod((2 * n - 1) / (2 * n))
    return float(1.0 + np.sum(ratios / (s * n + 1)))


def endpoint_integral(s: float) -> float:
    """``integral_0^1 dt / sqrt(1 - t^s)`` by adaptive quadrature with algebraic endpoint weight."""
    if not s > 0:
        raise DomainError("s must be positive")
    with np.errstate(invalid="ignore", divide="ignore"):
        def smooth(t):
            if t >= 1.0:
                return 1.0 / math.sqrt(s)
            return math.sqrt((1.0 - t) / -math.expm1(s * math.log(t))) if t > 0 else 1.0

        val, _ = quad(smooth, 0.0, 1.0, weight="alg", wvar=(0.0, -0.5), epsabs=1e-14, epsrel=1e-14, limit=200)
    return float(val)


def solve_autonomous(params: ProfileParams, n: int = 8192, m: int = 2) -> ProfileSolution:
    """Exact autonomous profile on ``(0, pi/2)`` sampled on a graded grid with ``n`` intervals.

    ``m = 2`` gives the positive profile of the quarter-plane problem. Other ``m``
    return the sign-changing ``m``-lobe profile on ``(0, pi)`` sampled on a
    uniform grid of ``n`` intervals per lobe.
    """
    params.require_valid()
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    if m == 1 and params.beta <= -1:
        raise DomainError("m = 1 needs -1 < beta < 0: the angle pi/2 is beyond the limit angle")
    match = find_matching_amplitude(params, math.pi / (2 * m))
    prof = AutonomousProfile(match, params)
    if m == 2:
        grid = graded_grid(n, math.pi / 2)
        w, dw = prof.evaluate(grid)
        w[0] = w[-1] = 0.0
        return ProfileSolution(params, math.pi / 2, grid, w, dw, "autonomous-inversion", 0.0,
                               info={"B_s": match.B_s, "amplitude": match.amplitude,
                                     "match_residual": match.residual, "match_iterations": match.iterations})
    quarter = invert_profile(match, params, n // 2 + 1)
    return assemble_reflections(quarter, m).with_info(B_s=match.B_s, amplitude=match.amplitude)
