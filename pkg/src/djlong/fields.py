"""Physical fields of a homogeneous stationary flow built from an angular profile.

A profile ``w`` on ``(0, pi)`` gives the stream function ``psi = r^(1-alpha) w(phi)`` and

    u = r^(-alpha) (a e_phi + f e_r),  a = (1-alpha) w,  f = -w',
    Pi = r^(-2 alpha) C1 |w|^(2+2/beta),   rho = r^(-2 alpha-1) C2 w|w|^(1+3/beta),
    p = Pi - |u|^2/2 - x2 rho,   omega = r^(-alpha-1) (beta^2 w + w'').

Profiles of the singular problem live on ``(0, pi/2)``. They are continued to ``(0, pi)``
oddly about ``pi/2`` (reflection in the vertical axis), and the density then takes the
even form ``C2 |w|^(2+3/beta)``, so that ``u1`` is odd while ``u2``, ``p`` and ``rho`` are
even in ``x1``. Every field is continued to the lower half-plane with ``u1``, ``p``, ``Pi``
even and ``u2``, ``rho``, ``omega``, ``psi`` odd in ``x2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .equation import relative_sum
from .errors import DomainError
from .grids import derivative
from .params import ProfileParams
from .solution import ProfileSolution, ResidualReport

SINGULAR_EXCLUSION = 1e-2
REGULAR_EXCLUSION = 0.05
OMEGA_SIN_FLOOR = 1e-3
CONSTANCY_TOL = 1e-8
STRONG_FD_STEP = 1e-3


# ---------------------------------------------------------------------------
# profile on the semicircle


def _power(a: np.ndarray, e: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.power(a, e)
    return np.where(a == 0, 0.0 if e > 0 else np.inf, out)


def _bernoulli(w: np.ndarray, params: ProfileParams) -> np.ndarray:
    if params.C1 == 0:
        return np.zeros_like(w)
    return params.C1 * _power(np.abs(w), 2.0 + 2.0 / params.beta)


def _density(w: np.ndarray, params: ProfileParams, odd_extension: bool) -> np.ndarray:
    if params.C2 == 0:
        return np.zeros_like(w)
    aw = np.abs(w)
    if odd_extension:
        return params.C2 * _power(aw, 2.0 + 3.0 / params.beta)
    return params.C2 * w * _power(aw, 1.0 + 3.0 / params.beta)


def _vorticity_from_equation(phi: np.ndarray, w: np.ndarray, params: ProfileParams, odd_extension: bool) -> np.ndarray:
    """``beta^2 w + w'' = -(c1 w|w|^(2/beta) + c2 sin(phi) S(w) |w|^(1+3/beta))``, ``S = sign`` for odd continuations."""
    with np.errstate(invalid="ignore"):
        return _vorticity_terms(phi, w, params, odd_extension)


def _vorticity_terms(phi, w, params, odd_extension):
    aw = np.abs(w)
    out = np.zeros_like(w)
    if params.c1:
        out = out - params.c1 * np.sign(w) * _power(aw, 1.0 + 2.0 / params.beta)
    if params.c2:
        sgn = np.sign(w) if odd_extension else 1.0
        out = out - params.c2 * np.sin(phi) * sgn * _power(aw, 1.0 + 3.0 / params.beta)
    return out


@dataclass(frozen=True, eq=False)
class SemicircleProfile:
    """Angular factors of the fields on ``[0, pi]`` with the mask of nodes used by the residuals.

    Closed-form profiles may supply ``exact_derivatives`` (keys ``a``, ``Pi``, ``rho``,
    ``omega``, ``Omega``), which the residuals then use instead of finite differences.

    ``omega`` is ``beta^2 w + w''`` by finite differences of the nodal data; ``omega_eq`` is
    the same quantity read off the profile equation, which is what the transport checks
    differentiate (a third derivative of gridded data would be dominated by stencil error).
    """

    grid: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    a: np.ndarray
    f: np.ndarray
    p: np.ndarray
    rho: np.ndarray
    Pi: np.ndarray
    omega: np.ndarray
    Omega: np.ndarray
    admissible: np.ndarray
    odd_extension: bool = False
    omega_eq: np.ndarray | None = None
    Omega_eq: np.ndarray | None = None
    alpha: float | None = None
    exact_derivatives: dict[str, np.ndarray] | None = None


def extend_to_semicircle(sol: ProfileSolution) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    """``(grid, w, dw, odd)`` on ``[0, pi]``; quarter profiles are continued oddly about ``pi/2``."""
    if not sol.is_quarter:
        return sol.grid, sol.w, sol.dw, False
    x, w, dw = sol.grid, sol.w, sol.dw
    grid = np.concatenate([x, math.pi - x[-2::-1]])
    return grid, np.concatenate([w, -w[-2::-1]]), np.concatenate([dw, dw[-2::-1]]), True


def _finite_slopes(grid: np.ndarray, w: np.ndarray, dw: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(dw)
    if not np.any(bad):
        return dw
    return np.where(bad, derivative(grid, w), dw)


def _interior_zeros(grid: np.ndarray, w: np.ndarray, odd: bool) -> tuple[float, ...]:
    """Sign changes of ``w`` strictly inside ``(0, pi)``, located by linear interpolation."""
    if odd:
        return (math.pi / 2,)
    inner = w[1:-1]
    s = np.sign(inner)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    out = [grid[i + 1] - inner[i] * (grid[i + 2] - grid[i + 1]) / (inner[i + 1] - inner[i]) for i in idx]
    return tuple(float(v) for v in out) + tuple(float(v) for v in grid[1:-1][inner == 0])


def _zero_distance(grid: np.ndarray, w: np.ndarray, odd: bool) -> np.ndarray:
    zeros = [0.0, math.pi, *_interior_zeros(grid, w, odd)]
    return np.min(np.abs(grid[:, None] - np.array(zeros)[None, :]), axis=1)


def profile_to_semicircle(sol: ProfileSolution, params: ProfileParams | None = None) -> SemicircleProfile:
    """Angular factors ``a, f, p, rho, Pi, omega, Omega`` on ``[0, pi]`` (unit radius)."""
    params = params or sol.params
    grid, w, dw, odd = extend_to_semicircle(sol)
    alpha = params.alpha
    a = (1.0 - alpha) * w
    f = -_finite_slopes(grid, w, dw)
    Pi = _bernoulli(w, params)
    rho = _density(w, params, odd)
    sn = np.sin(grid)
    with np.errstate(invalid="ignore", over="ignore"):
        p = Pi - 0.5 * (a * a + f * f) - sn * rho
    omega = (1.0 - alpha) * a - derivative(grid, f)
    omega_eq = _vorticity_from_equation(grid, w, params, odd)
    with np.errstate(divide="ignore", invalid="ignore"):
        Omega = np.where(np.abs(sn) >= OMEGA_SIN_FLOOR, omega / sn, np.nan)
        Omega_eq = np.where(np.abs(sn) >= OMEGA_SIN_FLOOR, omega_eq / sn, np.nan)
    dist = _zero_distance(grid, w, odd)
    admissible = dist >= (SINGULAR_EXCLUSION if odd else REGULAR_EXCLUSION)
    return SemicircleProfile(grid, w, dw, a, f, p, rho, Pi, omega, Omega, admissible, odd, omega_eq, Omega_eq, alpha)


def semicircle_residual(profile: SemicircleProfile, params: ProfileParams | None = None) -> ResidualReport:
    """Relative residuals of the semicircle system and its first integrals on admissible nodes.

    The homogeneity exponent is taken from ``params`` when given, else from the profile.

    Each residual is ``|sum of terms| / (1 + sum |terms|)`` pointwise, maximised over the
    admissible nodes. Derivatives are fourth-order finite differences on the profile grid.
    """
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        return _semicircle_residual(profile, params)


def _semicircle_residual(profile: SemicircleProfile, params: ProfileParams | None) -> ResidualReport:
    x = profile.grid
    alpha = params.alpha if params is not None else profile.alpha
    if alpha is None:
        raise DomainError("the homogeneity exponent is unknown: pass params")
    sn = np.sin(x)
    a, f, Pi, rho, om = profile.a, profile.f, profile.Pi, profile.rho, profile.omega
    exact = profile.exact_derivatives or {}
    d = lambda v: derivative(x, v)  # noqa: E731
    Pip = exact["Pi"] if "Pi" in exact else d(Pi)
    rhop = exact["rho"] if "rho" in exact else d(rho)
    ap = exact["a"] if "a" in exact else d(a)
    mask = profile.admissible

    def sup(r):
        vals = r[mask]
        vals = vals[np.isfinite(vals)]
        return float(np.max(vals)) if vals.size else 0.0

    res = {
        "momentum_phi": sup(relative_sum(a * om, 2 * alpha * Pi, -(2 * alpha + 1) * sn * rho)),
        "momentum_r": sup(relative_sum(f * om, Pip, -sn * rhop)),
        "divergence": sup(relative_sum((1 - alpha) * f, ap)),
        "density_transport": sup(relative_sum(a * rhop, -(2 * alpha + 1) * f * rho)),
        "first_integral_Pi": sup(relative_sum(a * Pip, -2 * alpha * f * Pi)),
        "first_integral_rho": sup(relative_sum(a * rhop, -(2 * alpha + 1) * f * rho)),
    }
    if np.max(np.abs(rho)) <= CONSTANCY_TOL:
        om_t = om if profile.omega_eq is None else profile.omega_eq
        omp = exact["omega"] if "omega" in exact else d(om_t)
        res["vorticity_transport"] = sup(relative_sum(a * omp, -(alpha + 1) * f * om))
    if np.max(np.abs(Pi - np.mean(Pi))) <= CONSTANCY_TOL:
        Om_t = profile.Omega if profile.Omega_eq is None else profile.Omega_eq
        Om = profile.Omega
        Omp = np.full_like(Om, np.nan)
        defined = np.isfinite(Om)
        # Differentiate Omega only on the contiguous part where it is defined.
        idx = np.nonzero(defined)[0]
        if "Omega" in exact:
            Omp = exact["Omega"]
        elif idx.size >= 5:
            lo, hi = idx[0], idx[-1] + 1
            Omp[lo:hi] = derivative(x[lo:hi], Om_t[lo:hi])
        res["Omega_transport"] = sup(relative_sum(a * Omp, -(alpha + 2) * f * Om))
    boundary = {"a_ends": float(max(abs(a[0]), abs(a[-1])))}
    if np.isfinite(rho[0]) and np.isfinite(rho[-1]):
        # the density blows up at the ends when its power of w is negative; no condition applies then
        boundary["rho_ends"] = float(max(abs(rho[0]), abs(rho[-1])))
    return ResidualReport(res, boundary, float(1.0 - np.count_nonzero(mask) / mask.size))


# ---------------------------------------------------------------------------
# pointwise fields


@dataclass(frozen=True, eq=False)
class FieldSample:
    """Fields at points ``(r, phi)``; every attribute broadcasts to the shape of the inputs.

    ``u_phi`` and ``u_r`` are the polar components of the velocity and ``u_cart`` its
    Cartesian components stacked on the last axis.
    """

    r: np.ndarray
    phi: np.ndarray
    u_phi: np.ndarray
    u_r: np.ndarray
    u_cart: np.ndarray
    p: np.ndarray
    rho: np.ndarray
    omega: np.ndarray
    Pi: np.ndarray
    psi: np.ndarray


class FieldFunction(Protocol):
    def __call__(self, r, phi) -> FieldSample: ...


def polar_to_cartesian(phi, u_phi, u_r) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([u_r * c - u_phi * s, u_r * s + u_phi * c], axis=-1)


def make_sample(r, phi, u1, u2, p, rho, omega, psi) -> FieldSample:
    """Assemble a :class:`FieldSample` from Cartesian velocity, computing ``Pi`` and the polar components."""
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    u_r = u1 * c + u2 * s
    u_phi = -u1 * s + u2 * c
    Pi = p + 0.5 * (u1 * u1 + u2 * u2) + r * s * rho
    return FieldSample(r, phi, u_phi, u_r, np.stack([u1, u2], axis=-1), p, rho, omega, Pi, psi)


class Symmetry(str, enum.Enum):
    X2_ONLY = "X2Only"
    X1_AND_X2 = "X1AndX2"


def wrap_angle(phi) -> np.ndarray:
    """Map angles to ``(-pi, pi]``."""
    phi = np.asarray(phi, dtype=float)
    out = np.mod(phi + math.pi, 2 * math.pi) - math.pi
    return np.where(out == -math.pi, math.pi, out)


class ProfileField:
    """Vectorised field evaluator for a computed profile.

    ``w`` is interpolated by the cubic Hermite spline through the nodal values and
    derivatives; ``omega`` follows from the profile equation.
    """

    def __init__(self, sol: ProfileSolution, params: ProfileParams | None = None,
                 symmetry: Symmetry | str | None = None):
        self.params = params or sol.params
        self.sol = sol
        if symmetry is None:
            symmetry = Symmetry.X1_AND_X2 if sol.is_quarter else Symmetry.X2_ONLY
        self.symmetry = Symmetry(symmetry)
        if self.symmetry is Symmetry.X1_AND_X2 and not sol.is_quarter:
            raise DomainError("the x1 reflection applies to quarter-plane profiles only")
        if self.symmetry is Symmetry.X2_ONLY and sol.is_quarter:
            raise DomainError("a quarter-plane profile needs the x1 reflection to fill the half-plane")
        grid, w, dw, odd = extend_to_semicircle(sol)
        self.odd = odd
        self._spline = CubicHermiteSpline(grid, w, _finite_slopes(grid, w, dw))
        self._dspline = self._spline.derivative()
        self.excluded_angles = (0.0, math.pi) + _interior_zeros(grid, w, odd)
        self.exclusion_radius = SINGULAR_EXCLUSION if odd else REGULAR_EXCLUSION

    def profile(self, phi) -> tuple[np.ndarray, np.ndarray]:
        phi = np.clip(np.asarray(phi, dtype=float), 0.0, math.pi)
        return self._spline(phi), self._dspline(phi)

    def __call__(self, r, phi) -> FieldSample:
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise DomainError("fields are evaluated at r > 0")
        phi = wrap_angle(phi)
        r, phi = np.broadcast_arrays(r, phi)
        lower = phi < 0
        ph = np.abs(phi)
        p = self.params
        alpha = p.alpha
        w, dw = self.profile(ph)
        a = (1.0 - alpha) * w
        f = -dw
        ra = r ** (-alpha)
        c, s = np.cos(ph), np.sin(ph)
        u1 = ra * (f * c - a * s)
        u2 = ra * (f * s + a * c)
        Pi_hat = _bernoulli(w, p)
        rho_hat = _density(w, p, self.odd)
        pres = r ** (-2 * alpha) * (Pi_hat - 0.5 * (a * a + f * f) - s * rho_hat)
        rho = r ** (-2 * alpha - 1) * rho_hat
        omega = r ** (-alpha - 1) * _vorticity_from_equation(ph, w, p, self.odd)
        psi = r ** (1 - alpha) * w
        flip = np.where(lower, -1.0, 1.0)
        return make_sample(r, phi, u1, flip * u2, pres, flip * rho, flip * omega, flip * psi)


def evaluate_field(sol: ProfileSolution, params: ProfileParams, r, phi_global,
                   symmetry: Symmetry | str | None = None) -> FieldSample:
    """Fields at ``(r, phi_global)`` after reduction to the fundamental domain of ``sol``."""
    return ProfileField(sol, params, symmetry)(r, phi_global)


def homogeneity_exponents(alpha: float) -> dict[str, float]:
    """Exponents ``e`` with ``F(lambda x) = lambda^e F(x)`` for each field."""
    return {"u": -alpha, "p": -2 * alpha, "Pi": -2 * alpha, "rho": -2 * alpha - 1,
            "omega": -alpha - 1, "psi": 1 - alpha}


# ---------------------------------------------------------------------------
# strong and weak residuals


def _fd(fun: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    """Fourth-order central difference of ``fun`` at 0 with step ``h``."""
    return (-fun(2 * h) + 8 * fun(h) - 8 * fun(-h) + fun(-2 * h)) / (12 * h)


def strong_residual_quadrant(field_fn: FieldFunction | ProfileSolution, params: ProfileParams | None = None,
                             r_range: tuple[float, float] = (0.5, 2.0), n_r: int = 16, n_phi: int = 512) -> float:
    """Sup of the relative momentum residual ``omega u_perp + grad Pi - x2 grad rho`` inside the first quadrant.

    The angular samples are ``n_phi`` cell midpoints of ``(0, pi/2)``. Samples closer than
    the field's ``exclusion_radius`` (default ``1e-2``) to the axes or to an angle listed in
    its ``excluded_angles`` (zeros of the profile, where it is not smooth) are dropped.
    Gradients are fourth-order central differences in ``r`` and ``phi``.
    """
    if isinstance(field_fn, ProfileSolution):
        field_fn = ProfileField(field_fn, params)
    r = np.linspace(r_range[0], r_range[1], int(n_r))
    phi = (np.arange(int(n_phi)) + 0.5) * (math.pi / 2) / int(n_phi)
    radius = getattr(field_fn, "exclusion_radius", SINGULAR_EXCLUSION)
    avoid = np.array([0.0, math.pi / 2, *getattr(field_fn, "excluded_angles", ())])
    phi = phi[np.min(np.abs(phi[:, None] - avoid[None, :]), axis=1) >= radius]
    R, P = np.meshgrid(r, phi, indexing="ij")
    base = field_fn(R, P)
    hr = STRONG_FD_STEP * R
    # Shrink the angular step near the excluded angles, where the fields vary on the scale
    # of the distance to them.
    dist = np.min(np.abs(P[..., None] - avoid), axis=-1)
    hp = STRONG_FD_STEP * np.minimum(1.0, 10.0 * dist)

    shifted_r = {k: field_fn(R + k * hr, P) for k in (-2, -1, 1, 2)}
    shifted_p = {k: field_fn(R, P + k * hp) for k in (-2, -1, 1, 2)}

    def central(samples, name, h):
        return _fd(lambda k: getattr(samples[round(k)], name), 1.0) / h

    c, s = np.cos(P), np.sin(P)
    out = 0.0
    grads = {}
    for name in ("Pi", "rho"):
        fr, fp = central(shifted_r, name, hr), central(shifted_p, name, hp) / R
        grads[name] = (fr * c - fp * s, fr * s + fp * c)
    u1, u2 = base.u_cart[..., 0], base.u_cart[..., 1]
    x2 = R * s
    for i, uperp in enumerate((-u2, u1)):
        res = relative_sum(base.omega * uperp, grads["Pi"][i], -x2 * grads["rho"][i])
        out = max(out, float(np.max(res)))
    return out


@dataclass(frozen=True)
class BumpTestField:
    """Compactly supported test field ``chi(r) Theta(phi) (A1 cos(k1 phi + t1), A2 cos(k2 phi + t2))``.

    ``chi = ((r - r0)(r1 - r))^3`` scaled to unit maximum. ``Theta = 1`` unless a sector
    ``(phi0, phi1)`` is given, in which case it is the analogous cubic bump in ``phi``.
    """

    r0: float
    r1: float
    amplitudes: tuple[float, float]
    wavenumbers: tuple[int, int]
    phases: tuple[float, float]
    sector: tuple[float, float] | None = None

    def _radial(self, r):
        L = 0.5 * (self.r1 - self.r0)
        u = (r - self.r0) * (self.r1 - r)
        inside = (r > self.r0) & (r < self.r1)
        chi = np.where(inside, u ** 3, 0.0) / L ** 6
        dchi = np.where(inside, 3 * u ** 2 * (self.r1 + self.r0 - 2 * r), 0.0) / L ** 6
        return chi, dchi

    def _angular(self, phi):
        if self.sector is None:
            return np.ones_like(phi), np.zeros_like(phi)
        a, b = self.sector
        L = 0.5 * (b - a)
        u = (phi - a) * (b - phi)
        inside = (phi > a) & (phi < b)
        return np.where(inside, u ** 3, 0.0) / L ** 6, np.where(inside, 3 * u ** 2 * (a + b - 2 * phi), 0.0) / L ** 6

    def evaluate(self, r, phi):
        """Return ``(Phi, dPhi/dx1, dPhi/dx2)``, each of shape ``r.shape + (2,)``."""
        chi, dchi = self._radial(r)
        th, dth = self._angular(phi)
        vals, dr, dp = [], [], []
        for A, k, t in zip(self.amplitudes, self.wavenumbers, self.phases):
            cos_, sin_ = np.cos(k * phi + t), np.sin(k * phi + t)
            ang = A * th * cos_
            dang = A * (dth * cos_ - th * k * sin_)
            vals.append(chi * ang)
            dr.append(dchi * ang)
            dp.append(chi * dang)
        c, s = np.cos(phi), np.sin(phi)
        V = np.stack(vals, axis=-1)
        Dr = np.stack(dr, axis=-1)
        Dp = np.stack(dp, axis=-1)
        rr = r[..., None]
        dx1 = c[..., None] * Dr - s[..., None] / rr * Dp
        dx2 = s[..., None] * Dr + c[..., None] / rr * Dp
        return V, dx1, dx2

    def angular_breaks(self) -> list[float]:
        return [] if self.sector is None else list(self.sector)


def bump_test_fields(seed: int, n: int = 10) -> list[BumpTestField]:
    """Seeded family: most fields cross both axes, every fifth lives in a sector inside a quadrant."""
    rng = np.random.default_rng(seed)
    out = []
    for j in range(int(n)):
        r0 = float(rng.uniform(0.3, 0.8))
        r1 = r0 + float(rng.uniform(0.6, 1.5))
        A = tuple(float(v) for v in rng.standard_normal(2))
        k = tuple(int(v) for v in rng.integers(0, 4, size=2))
        th = tuple(float(v) for v in rng.uniform(0.0, 2 * math.pi, size=2))
        sector = None
        if j % 5 == 4:
            q = int(rng.integers(0, 4))
            lo = -math.pi + q * math.pi / 2
            a = lo + float(rng.uniform(0.1, 0.5))
            sector = (a, a + float(rng.uniform(0.4, 0.9)))
        out.append(BumpTestField(r0, r1, A, k, th, sector))
    return out


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre rule: ``n_r`` radial nodes and ``n_phi`` nodes per angular panel.

    Angular panels are the four quadrants, further split at any breakpoints of the test
    field. Inside a panel the nodes are pulled toward its ends by the sigmoidal map
    ``t^q / (t^q + (1-t)^q)`` of order ``clustering``; this restores fast convergence for
    fields whose profiles have power-law behaviour at the axes (``clustering = 1`` gives
    plain Gauss-Legendre).
    """

    n_r: int = 512
    n_phi: int = 128
    clustering: int = 3


def _gauss(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, wts = np.polynomial.legendre.leggauss(int(n))
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * wts


def _clustered(a: float, b: float, n: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    t, wt = _gauss(0.0, 1.0, n)
    if q == 1:
        return a + (b - a) * t, (b - a) * wt
    tq, sq = t ** q, (1.0 - t) ** q
    den = tq + sq
    tau = tq / den
    dtau = q * (t ** (q - 1) * sq + tq * (1.0 - t) ** (q - 1)) / den ** 2
    return a + (b - a) * tau, (b - a) * wt * dtau


def weak_residual(field_fn: FieldFunction, test_field: BumpTestField,
                  quadrature_spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``|integral (u . grad Phi) . u + p div Phi - rho Phi_2 dx|`` over the support annulus."""
    rq, rw = _gauss(test_field.r0, test_field.r1, quadrature_spec.n_r)
    breaks = sorted({-math.pi, -math.pi / 2, 0.0, math.pi / 2, math.pi, *test_field.angular_breaks()})
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        pq, pw = _clustered(a, b, quadrature_spec.n_phi, quadrature_spec.clustering)
        R, P = np.meshgrid(rq, pq, indexing="ij")
        fs = field_fn(R, P)
        V, D1, D2 = test_field.evaluate(R, P)
        u1, u2 = fs.u_cart[..., 0], fs.u_cart[..., 1]
        conv = u1[..., None] * D1 + u2[..., None] * D2
        integrand = (conv[..., 0] * u1 + conv[..., 1] * u2 + fs.p * (D1[..., 0] + D2[..., 1]) - fs.rho * V[..., 1]) * R
        total += float(rw @ integrand @ pw)
    return abs(total)


# ---------------------------------------------------------------------------
# streamlines


@dataclass(frozen=True, eq=False)
class Polyline:
    level: float
    points: np.ndarray


def streamline_export(field_fn: FieldFunction | ProfileSolution, levels, window=(-1.0, 1.0, -1.0, 1.0),
                      n: int = 256, params: ProfileParams | None = None) -> list[Polyline]:
    """Contours of ``psi`` on an ``n x n`` Cartesian grid over ``window = (x1min, x1max, x2min, x2max)``.

    Curves are returned level by level in the given order and, within a level, in the
    marching order of the contouring library, which is deterministic.
    """
    import contourpy

    levels = [float(v) for v in levels]
    if not levels:
        return []
    if isinstance(field_fn, ProfileSolution):
        field_fn = ProfileField(field_fn, params)
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, int(n))
    ys = np.linspace(y0, y1, int(n))
    X, Y = np.meshgrid(xs, ys)
    Rr = np.hypot(X, Y)
    ok = Rr > 1e-12
    psi = np.full(X.shape, np.nan)
    fs = field_fn(Rr[ok], np.arctan2(Y[ok], X[ok]))
    psi[ok] = fs.psi
    z = np.ma.masked_invalid(psi)
    gen = contourpy.contour_generator(xs, ys, z, line_type=contourpy.LineType.Separate)
    out = []
    for lev in levels:
        for seg in gen.lines(lev):
            out.append(Polyline(lev, np.asarray(seg, dtype=float)))
    return out
