"""Closed-form stationary fields, the Green function of the profile operator, and explicit
self-similar profiles of one-dimensional models together with their residual checks."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import least_squares

from .errors import DomainError, SheetPointError
from .fields import FieldSample, SemicircleProfile, make_sample, SINGULAR_EXCLUSION

GCLM_HALF_B = math.sqrt(3.0 / 8.0)
SONIC_THRESHOLD = 1e-8
HILBERT_HALF_WIDTH = 1e3
HILBERT_STEP = 0.05


def _polar(r, phi):
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(r <= 0):
        raise DomainError("fields are evaluated at r > 0")
    return np.broadcast_arrays(r, phi)


# ---------------------------------------------------------------------------
# stationary closed forms


class ClosedFormKind(str, enum.Enum):
    IRROTATIONAL = "Irrotational"
    VORTEX_SHEET = "VortexSheet"
    STATIC_EQUILIBRIUM = "StaticEquilibrium"


def check_irrotational(alpha: float, C: float, b: float) -> None:
    """A nonzero velocity needs an integer exponent; Bernoulli requires ``alpha (C^2 + 2b) = 0``."""
    if C != 0 and float(alpha) != round(float(alpha)):
        raise DomainError("a nonzero irrotational velocity needs an integer exponent alpha")
    if not math.isclose(alpha * (C * C + 2.0 * b), 0.0, abs_tol=1e-14):
        raise DomainError("the irrotational pressure must satisfy alpha (C^2 + 2b) = 0")


def _irrotational_profile(alpha: float, C: float, phi):
    """``w`` with ``psi = r^(1-alpha) w``: ``C sin((1-alpha) phi) / (alpha-1)``, or ``-C phi`` at ``alpha = 1``."""
    if alpha == 1:
        return -C * phi
    return C * np.sin((1.0 - alpha) * phi) / (alpha - 1.0)


def irrotational_field(alpha: float, C: float, b: float, r, phi) -> FieldSample:
    """``u = C r^-alpha (sin((alpha-1) phi) e_phi + cos((alpha-1) phi) e_r)``, ``p = b r^(-2 alpha)``, ``rho = 0``."""
    check_irrotational(alpha, C, b)
    r, phi = _polar(r, phi)
    ra = r ** (-alpha)
    u_phi = C * ra * np.sin((alpha - 1.0) * phi)
    u_r = C * ra * np.cos((alpha - 1.0) * phi)
    c, s = np.cos(phi), np.sin(phi)
    u1 = u_r * c - u_phi * s
    u2 = u_r * s + u_phi * c
    zero = np.zeros_like(r)
    psi = r ** (1.0 - alpha) * _irrotational_profile(alpha, C, phi)
    return make_sample(r, phi, u1, u2, b * r ** (-2.0 * alpha), zero, zero, psi)


def _sheet_sign(phi) -> np.ndarray:
    c = np.cos(phi)
    on_sheet = np.isclose(np.abs(np.asarray(phi)), math.pi / 2, rtol=0.0, atol=1e-15)
    if np.any(on_sheet):
        raise SheetPointError("the vortex sheet velocity is undefined on x1 = 0")
    return np.where(c > 0, -1.0, 1.0)


def green_function(phi, phi_prime):
    """``G = (phi + phi')/2 - phi phi'/pi - |phi - phi'|/2`` on ``[0, pi]^2``."""
    a = np.asarray(phi, dtype=float)
    b = np.asarray(phi_prime, dtype=float)
    if np.any((a < 0) | (a > math.pi) | (b < 0) | (b > math.pi)):
        raise DomainError("Green function arguments must lie in [0, pi]")
    out = 0.5 * (a + b) - a * b / math.pi - 0.5 * np.abs(a - b)
    return float(out) if out.ndim == 0 else out


def vortex_sheet_stream(phi) -> np.ndarray:
    """``psi_sh = G(|phi|, pi/2)``, continued oddly to the lower half-plane."""
    phi = np.asarray(phi, dtype=float)
    return np.sign(phi) * green_function(np.abs(phi), math.pi / 2)


def vortex_sheet_field(r, phi) -> FieldSample:
    """``u = -e_r/(2r)`` for ``x1 > 0`` and ``+e_r/(2r)`` for ``x1 < 0``; ``p = -1/(8 r^2)``; ``rho = 0``."""
    r, phi = _polar(r, phi)
    ur = _sheet_sign(phi) / (2.0 * r)
    zero = np.zeros_like(r)
    return make_sample(r, phi, ur * np.cos(phi), ur * np.sin(phi), -1.0 / (8.0 * r * r), zero, zero,
                       vortex_sheet_stream(phi))


def _derivative(fun: Callable, x: np.ndarray) -> np.ndarray:
    h = 1e-3 * (1.0 + np.abs(x))
    return (-fun(x + 2 * h) + 8 * fun(x + h) - 8 * fun(x - h) + fun(x - 2 * h)) / (12 * h)


def static_equilibrium_field(p_of_x2: Callable, r, phi, dp_of_x2: Callable | None = None) -> FieldSample:
    """``u = 0``, ``p = p(x2)``, ``rho = -p'(x2)``.

    ``p'`` is ``dp_of_x2`` when given, otherwise a fourth-order central difference.
    """
    r, phi = _polar(r, phi)
    x2 = r * np.sin(phi)
    p = np.asarray(p_of_x2(x2), dtype=float) * np.ones_like(r)
    dp = dp_of_x2(x2) if dp_of_x2 is not None else _derivative(p_of_x2, x2)
    zero = np.zeros_like(r)
    return make_sample(r, phi, zero, zero, p, -np.asarray(dp, dtype=float) * np.ones_like(r), zero, zero)


@dataclass(frozen=True)
class ClosedFormField:
    """A closed-form solution as a field evaluator ``field(r, phi) -> FieldSample``."""

    kind: ClosedFormKind
    alpha: float = 1.0
    C: float = 0.0
    b: float = 0.0
    p_of_x2: Callable | None = None
    dp_of_x2: Callable | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ClosedFormKind(self.kind))
        if self.kind is ClosedFormKind.IRROTATIONAL:
            check_irrotational(self.alpha, self.C, self.b)
        if self.kind is ClosedFormKind.STATIC_EQUILIBRIUM and self.p_of_x2 is None:
            raise DomainError("a static equilibrium needs its pressure p(x2)")

    @property
    def excluded_angles(self) -> tuple[float, ...]:
        return (math.pi / 2, -math.pi / 2) if self.kind is ClosedFormKind.VORTEX_SHEET else ()

    def __call__(self, r, phi) -> FieldSample:
        if self.kind is ClosedFormKind.IRROTATIONAL:
            return irrotational_field(self.alpha, self.C, self.b, r, phi)
        if self.kind is ClosedFormKind.VORTEX_SHEET:
            return vortex_sheet_field(r, phi)
        return static_equilibrium_field(self.p_of_x2, r, phi, self.dp_of_x2)


def irrotational_semicircle(alpha: float, C: float, b: float, n: int = 1024) -> SemicircleProfile:
    """Angular factors of the irrotational field on ``n + 1`` uniform nodes of ``[0, pi]``."""
    check_irrotational(alpha, C, b)
    x = np.linspace(0.0, math.pi, int(n) + 1)
    w = _irrotational_profile(alpha, C, x)
    a = C * np.sin((alpha - 1.0) * x)
    f = C * np.cos((alpha - 1.0) * x)
    zero = np.zeros_like(x)
    Pi = np.full_like(x, b + 0.5 * C * C)
    mask = np.ones(x.size, dtype=bool)
    exact = {"a": C * (alpha - 1.0) * np.cos((alpha - 1.0) * x), "Pi": zero, "rho": zero, "omega": zero, "Omega": zero}
    return SemicircleProfile(x, w, -f, a, f, np.full_like(x, b), zero, Pi, zero, zero, mask,
                             alpha=float(alpha), exact_derivatives=exact)


def vortex_sheet_semicircle(n: int = 1024) -> SemicircleProfile:
    """Angular factors of the vortex sheet on ``[0, pi]``; nodes near the sheet are not admissible."""
    x = np.linspace(0.0, math.pi, int(n) + 1)
    w = green_function(x, math.pi / 2)
    f = np.where(x < math.pi / 2, -0.5, 0.5)
    zero = np.zeros_like(x)
    mask = np.abs(x - math.pi / 2) >= SINGULAR_EXCLUSION
    exact = {"a": zero, "Pi": zero, "rho": zero, "omega": zero, "Omega": zero}
    return SemicircleProfile(x, w, -f, zero, f, np.full_like(x, -0.125), zero, zero, zero, zero, mask,
                             alpha=1.0, exact_derivatives=exact)


# ---------------------------------------------------------------------------
# one-dimensional self-similar profiles


def burgers_profile(x):
    """Real root of ``u^3 + u + x = 0`` by Cardano's formula."""
    x = np.asarray(x, dtype=float)
    disc = np.sqrt(0.25 * x * x + 1.0 / 27.0)
    u = np.cbrt(-0.5 * x + disc) + np.cbrt(-0.5 * x - disc)
    # One Newton step removes the cancellation error of the radicals.
    u = u - (u ** 3 + u + x) / (3.0 * u * u + 1.0)
    return float(u) if u.ndim == 0 else u


@dataclass(frozen=True)
class SelfSimilarPair:
    """Closed forms of ``omega``, ``omega_x``, ``u`` and ``u_x`` for a 1D self-similar profile."""

    omega: Callable
    omega_x: Callable
    u: Callable
    u_x: Callable


def clm_profile(x):
    """``(omega, u) = (x/(1+x^2), -arctan x)``."""
    x = np.asarray(x, dtype=float)
    return x / (1.0 + x * x), -np.arctan(x)


def gclm_profile_half(x):
    """``(omega, u) = (-2bx/(x^2+b^2)^2, x/(x^2+b^2))`` with ``b = sqrt(3/8)``."""
    x = np.asarray(x, dtype=float)
    b = GCLM_HALF_B
    q = x * x + b * b
    return -2.0 * b * x / q ** 2, x / q


CLM_PAIR = SelfSimilarPair(
    omega=lambda x: clm_profile(x)[0],
    omega_x=lambda x: (1.0 - x * x) / (1.0 + x * x) ** 2,
    u=lambda x: clm_profile(x)[1],
    u_x=lambda x: -1.0 / (1.0 + x * x),
)


def _gclm_omega_x(x):
    b = GCLM_HALF_B
    q = x * x + b * b
    return -2.0 * b * (b * b - 3.0 * x * x) / q ** 3


GCLM_HALF_PAIR = SelfSimilarPair(
    omega=lambda x: gclm_profile_half(x)[0],
    omega_x=_gclm_omega_x,
    u=lambda x: gclm_profile_half(x)[1],
    u_x=lambda x: (GCLM_HALF_B ** 2 - x * x) / (x * x + GCLM_HALF_B ** 2) ** 2,
)

ZERO_PAIR = SelfSimilarPair(*(lambda x: np.zeros_like(np.asarray(x, dtype=float)),) * 4)


def _selfsimilar_terms(pair: SelfSimilarPair, a: float, alpha: float, x: np.ndarray):
    om, omx, u, ux = pair.omega(x), pair.omega_x(x), pair.u(x), pair.u_x(x)
    return om + x * omx / (alpha + 1.0) + a * u * omx, om * ux


def fit_amplitude(pair: SelfSimilarPair, a: float, alpha: float, x=None) -> float:
    """Least-squares ``mu`` in ``omega + x omega_x/(alpha+1) + a u omega_x = mu omega u_x``."""
    if alpha == -1:
        raise DomainError("alpha = -1 is excluded")
    x = np.linspace(-20.0, 20.0, 4001) if x is None else np.asarray(x, dtype=float)
    lhs, rhs = _selfsimilar_terms(pair, a, alpha, x)
    if not np.any(rhs):
        return 0.0
    fit = least_squares(lambda m: lhs - m[0] * rhs, x0=[0.0], method="lm")
    return float(fit.x[0])


def selfsimilar_1d_residual(pair: SelfSimilarPair, a: float, alpha: float, mu: float | None = None,
                            x=None) -> tuple[float, float]:
    """``(sup |omega + x omega_x/(alpha+1) + a u omega_x - mu omega u_x|, mu)`` on a sample grid.

    With ``mu=None`` the amplitude is fitted by least squares first.
    """
    if alpha == -1:
        raise DomainError("alpha = -1 is excluded")
    x = np.linspace(-20.0, 20.0, 4001) if x is None else np.asarray(x, dtype=float)
    if mu is None:
        mu = fit_amplitude(pair, a, alpha, x)
    lhs, rhs = _selfsimilar_terms(pair, a, alpha, x)
    return float(np.max(np.abs(lhs - mu * rhs))), float(mu)


def hilbert_transform(f: Callable, x_eval, half_width: float = HILBERT_HALF_WIDTH,
                      h: float = HILBERT_STEP) -> np.ndarray:
    """``(1/pi) PV integral f(y)/(x-y) dy`` on ``|y| <= half_width`` by the alternating-point trapezoid rule.

    ``x_eval`` must lie on the grid ``h Z``; the rule sums over nodes at odd offsets with
    weight ``2h``, which skips the singular node.
    """
    x_eval = np.atleast_1d(np.asarray(x_eval, dtype=float))
    m = int(round(half_width / h))
    y = h * np.arange(-m, m + 1)
    fy = f(y)
    idx = np.rint(x_eval / h).astype(int) + m
    out = np.empty(x_eval.size)
    j = np.arange(y.size)
    for k, i in enumerate(idx):
        odd = (j - i) % 2 == 1
        out[k] = 2.0 * h / math.pi * np.sum(fy[odd] / (y[i] - y[odd]))
    return out


def hilbert_consistency(pair: SelfSimilarPair, x_eval=None) -> float:
    """Sup of ``|H omega - u_x|`` at sample points, for the relation ``u_x = H omega``."""
    x_eval = HILBERT_STEP * np.arange(-100, 101) if x_eval is None else np.asarray(x_eval, dtype=float)
    return float(np.max(np.abs(hilbert_transform(pair.omega, x_eval) - pair.u_x(np.asarray(x_eval)))))


# ---------------------------------------------------------------------------
# Emden system for spherically symmetric compressible flow


@dataclass(frozen=True)
class EmdenState:
    w: float
    sigma: float
    n: int
    l: float
    alpha: float


def _check_emden(n: int, l: float) -> None:
    if n < 2:
        raise DomainError("the Emden system needs n >= 2")
    if not l > 0:
        raise DomainError("the Emden system needs l > 0")


def emden_rhs(state: EmdenState) -> tuple[float, float, float, float]:
    """``(Delta, Delta1, Delta2, w_e)`` at the state."""
    _check_emden(state.n, state.l)
    w, s, n, l, a = state.w, state.sigma, state.n, state.l, state.alpha
    we = l * a / n
    delta = (w - 1.0) ** 2 - s * s
    delta1 = w * (w - 1.0) * (w - a - 1.0) - n * (w - we) * s * s
    delta2 = (s / l) * ((l + n - 1.0) * w * w - (l + n + (l - 1.0) * (a + 1.0)) * w + l * (a + 1.0) + l * s * s)
    return delta, delta1, delta2, we


class EmdenStatus(str, enum.Enum):
    COMPLETED = "Completed"
    SONIC_CROSSING = "SonicCrossing"
    FAILED = "Failed"


@dataclass(frozen=True, eq=False)
class EmdenTrajectory:
    s: np.ndarray
    w: np.ndarray
    sigma: np.ndarray
    status: EmdenStatus
    message: str = ""


@dataclass(frozen=True)
class StepControl:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    sonic_threshold: float = SONIC_THRESHOLD


def emden_integrate(state0: EmdenState, s_span: tuple[float, float],
                    step_control: StepControl = StepControl()) -> EmdenTrajectory:
    """Integrate ``dw/ds = -Delta1/Delta``, ``dsigma/ds = -Delta2/Delta`` with adaptive Runge-Kutta.

    Integration stops with status ``SonicCrossing`` when ``|Delta|`` falls to the threshold.
    """
    d0 = emden_rhs(state0)[0]
    if abs(d0) <= step_control.sonic_threshold:
        raise DomainError("the initial state lies on the sonic line Delta = 0")
    n, l, a = state0.n, state0.l, state0.alpha

    def rhs(_s, y):
        d, d1, d2, _ = emden_rhs(EmdenState(y[0], y[1], n, l, a))
        return [-d1 / d, -d2 / d]

    def sonic(_s, y):
        return abs(emden_rhs(EmdenState(y[0], y[1], n, l, a))[0]) - step_control.sonic_threshold

    sonic.terminal = True
    sol = solve_ivp(rhs, s_span, [state0.w, state0.sigma], method="DOP853", rtol=step_control.rtol,
                    atol=step_control.atol, max_step=step_control.max_step, events=sonic)
    if sol.status == 1:
        status = EmdenStatus.SONIC_CROSSING
    elif sol.status == 0:
        status = EmdenStatus.COMPLETED
    else:
        status = EmdenStatus.FAILED
    return EmdenTrajectory(sol.t, sol.y[0], sol.y[1], status, sol.message)


def alpha_peye_branches(n: int, l: float) -> tuple[float, float]:
    """Both displayed formulas evaluated at ``(n, l)``, irrespective of which one applies."""
    _check_emden(n, l)
    return (n + l) / (l + math.sqrt(n)) - 1.0, (n - 1.0) / (1.0 + math.sqrt(l)) ** 2


def alpha_peye(n: int, l: float) -> float:
    """Accumulation exponent: ``(n+l)/(l+sqrt n) - 1`` for ``l < n``, ``(n-1)/(1+sqrt l)^2`` for ``l > n``.

    At ``l = n`` both branches equal ``(sqrt n - 1)/(sqrt n + 1)``, which is returned.
    """
    _check_emden(n, l)
    if l < n:
        return (n + l) / (l + math.sqrt(n)) - 1.0
    if l > n:
        return (n - 1.0) / (1.0 + math.sqrt(l)) ** 2
    rn = math.sqrt(n)
    return (rn - 1.0) / (rn + 1.0)
