"""Functional machinery and solvers for the regular regimes ``beta`` outside ``[-2, 0]``.

On ``(0, pi)`` the profile equation ``-w'' - beta^2 w = g(phi, w)`` is the Euler-Lagrange
equation of

    I[w] = 0.5 B(w, w) - integral G(phi, w),   B(w, eta) = integral (w' eta' - beta^2 w eta).

Everything here is discrete: ``B``, ``I`` and its gradient are built from one operator
(see :mod:`djlong.operators`) and one diagonal quadrature, so the gradient is the exact
derivative of the discrete functional. Critical points are found by damped Newton
iterations with deflation, seeded by multiples of the eigenmodes; for ``0 < beta < 1``
and ``c2 = 0`` a shooting solution provides the starting guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .equation import nonlinearity, nonlinearity_derivative, primitive
from .errors import DomainError, NonConvergence
from .grids import uniform_grid
from .operators import Operator, ReflectedFourthOrderOperator, operator_for
from .params import Domain, ProfileParams, RegimeTag, eigenvalue
from .solution import ProfileSolution, ResidualReport

DEFAULT_N = 2048
NEWTON_MAXIT = 60
STEP_TOL = 1e-12
RESIDUAL_TOL = 1e-8
SEED_AMPLITUDES = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
N_RANDOM_SEEDS = 6
SAME_SOLUTION_TOL = 1e-6


# ---------------------------------------------------------------------------
# discrete functional


def _interior(values, grid) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.shape == np.shape(grid):
        return v[1:-1]
    if v.shape == (np.size(grid) - 2,):
        return v
    raise DomainError("values must be given at every node or at every interior node")


def _operator(grid) -> Operator:
    return operator_for(np.asarray(grid, dtype=float))


def bilinear_form(w, eta, beta: float, grid) -> float:
    """Discrete ``B(w, eta) = integral (w' eta' - beta^2 w eta)``; symmetric in its arguments."""
    op = _operator(grid)
    wi, ei = _interior(w, grid), _interior(eta, grid)
    m = op.weights
    return float(np.dot(m * op.apply(wi), ei) - beta ** 2 * np.dot(m * wi, ei))


def _require_regular(params: ProfileParams) -> None:
    params.require_valid()
    if not params.regime.is_regular:
        raise DomainError(f"regime {params.regime.value} is not regular (beta outside [-2, 0])")


@dataclass(frozen=True, eq=False)
class FunctionalState:
    """Value, gradient and the two parts of the discrete functional at ``w``."""

    grid: np.ndarray
    w: np.ndarray
    I_value: float
    gradient: np.ndarray
    B_quadratic: float
    nonlinear_part: float


def functional_state(w, params: ProfileParams, grid, modified: bool = False) -> FunctionalState:
    _require_regular(params)
    grid = np.asarray(grid, dtype=float)
    op = _operator(grid)
    wi = _interior(w, grid)
    phi = op.interior
    m = op.weights
    Kw = op.apply(wi)
    Bq = float(np.dot(m * Kw, wi) - params.beta ** 2 * np.dot(m, wi * wi))
    nl = float(np.dot(m, primitive(phi, wi, params, modified)))
    grad = m * (Kw - params.beta ** 2 * wi - nonlinearity(phi, wi, params, modified))
    return FunctionalState(grid, wi, 0.5 * Bq - nl, grad, Bq, nl)


def functional_value(w, params: ProfileParams, grid, modified: bool = False) -> float:
    """Discrete ``I[w]`` (or the positive-part functional when ``modified``)."""
    return functional_state(w, params, grid, modified).I_value


def functional_gradient(w, params: ProfileParams, grid, modified: bool = False) -> np.ndarray:
    """Covector ``eta -> <I'[w], eta>`` at interior nodes: ``<I'[w], eta> = sum(gradient * eta)``."""
    return functional_state(w, params, grid, modified).gradient


def identity_check(w, sigma: float, params: ProfileParams, grid) -> float:
    """``|LHS - RHS|`` of the algebraic identity for ``I[w] - sigma <I'[w], w>``.

    The right side is ``(1/2 - sigma) B(w, w) + c1 (sigma - beta/(2 beta+2)) integral |w|^(2+2/beta)
    + c2 (sigma - beta/(2 beta+3)) integral sin(phi) w|w|^(1+3/beta)``, each term computed
    with the same quadrature as the left side.
    """
    st = functional_state(w, params, grid)
    op = _operator(grid)
    phi, m, wi = op.interior, op.weights, st.w
    lhs = st.I_value - sigma * float(np.dot(st.gradient, wi))
    beta = params.beta
    aw = np.abs(wi)
    rhs = (0.5 - sigma) * st.B_quadratic
    if params.c1:
        rhs += params.c1 * (sigma - beta / (2 * beta + 2)) * float(np.dot(m, aw ** (2 + 2 / beta)))
    if params.c2:
        rhs += params.c2 * (sigma - beta / (2 * beta + 3)) * float(np.dot(m, np.sin(phi) * wi * aw ** (1 + 3 / beta)))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# spectral splitting


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of ``-d^2/dphi^2 - beta^2`` with Dirichlet data, split at the last nonpositive one.

    ``modes[k-1] = (mu_k, e_k)`` with ``e_k`` sampled at every node and normalised in the
    discrete ``L^2`` inner product; ``K`` is the number of modes with ``mu_k <= 0``.
    """

    beta: float
    domain: Domain
    grid: np.ndarray
    K: int
    modes: list[tuple[float, np.ndarray]]
    discrete_eigenvalues: list[float] = field(default_factory=list)

    @property
    def Y(self) -> np.ndarray:
        """Rows: interior values of the modes spanning the nonpositive subspace."""
        return np.array([e[1:-1] for _, e in self.modes[:self.K]]).reshape(self.K, -1)

    def project_out_Y(self, z: np.ndarray) -> np.ndarray:
        op = _operator(self.grid)
        zi = _interior(z, self.grid).copy()
        for _, e in self.modes[:self.K]:
            ei = e[1:-1]
            zi -= np.dot(op.weights * zi, ei) * ei
        return zi


def count_nonpositive(beta: float, domain: Domain) -> int:
    k = 0
    while eigenvalue(k + 1, beta, domain) <= 0:
        k += 1
    return k


def spectral_split(beta: float, domain: Domain | str = Domain.FULL_SEMICIRCLE, grid=None,
                   extra_modes: int = 2) -> SpectralDecomposition:
    """Sample ``e_1 .. e_{K+extra_modes}`` on ``grid`` and record ``K``."""
    domain = Domain(domain)
    L = domain.length
    grid = uniform_grid(DEFAULT_N, L) if grid is None else np.asarray(grid, dtype=float)
    if not math.isclose(grid[-1], L) or grid[0] != 0.0:
        raise DomainError(f"grid must span [0, {L:g}]")
    K = count_nonpositive(beta, domain)
    op = _operator(grid)
    m = op.weights
    freq = 1 if domain is Domain.FULL_SEMICIRCLE else 2
    modes, lams = [], []
    basis = []
    for k in range(1, K + int(extra_modes) + 1):
        e = np.sin(freq * k * grid)
        e[0] = e[-1] = 0.0
        ei = e[1:-1]
        for b in basis:
            ei = ei - np.dot(m * ei, b) * b
        ei = ei / math.sqrt(float(np.dot(m * ei, ei)))
        basis.append(ei)
        full = np.concatenate([[0.0], ei, [0.0]])
        modes.append((eigenvalue(k, beta, domain), full))
        lams.append(float(np.dot(m * op.apply(ei), ei)) - beta ** 2)
    return SpectralDecomposition(float(beta), domain, grid, K, modes, lams)


def coercivity_delta(decomp: SpectralDecomposition, n_trials: int = 200, seed: int = 0) -> float:
    """Smallest observed ``B(z, z) / integral |z'|^2`` over random ``z`` orthogonal to ``Y``.

    Trial functions mix random nodal noise, smoothed noise and single modes above ``K``.
    """
    rng = np.random.default_rng(seed)
    grid = decomp.grid
    op = _operator(grid)
    n = grid.size - 2
    best = math.inf
    extra = [e[1:-1] for _, e in decomp.modes[decomp.K:]]
    for trial in range(int(n_trials)):
        kind = trial % 3
        if kind == 0:
            z = rng.standard_normal(n)
        elif kind == 1:
            z = np.convolve(rng.standard_normal(n), np.ones(64) / 64, mode="same")
        else:
            coef = rng.standard_normal(len(extra)) if extra else np.zeros(0)
            z = sum((c * e for c, e in zip(coef, extra)), np.zeros(n))
            if not extra:
                z = rng.standard_normal(n)
        z = decomp.project_out_Y(z)
        energy = op.energy(z)
        if energy <= 0:
            continue
        best = min(best, bilinear_form(z, z, decomp.beta, grid) / energy)
    return float(best)


# ---------------------------------------------------------------------------
# Newton with deflation


@dataclass
class _System:
    op: ReflectedFourthOrderOperator
    params: ProfileParams
    modified: bool

    @property
    def phi(self):
        return self.op.interior

    def residual(self, w):
        p = self.params
        return self.op.apply(w) - p.beta ** 2 * w - nonlinearity(self.phi, w, p, self.modified)

    def newton_step(self, w, R):
        p = self.params
        shift = -p.beta ** 2 - nonlinearity_derivative(self.phi, w, p, self.modified)
        return self.op.solve(shift, -R)

    def norm2(self, v):
        return float(np.dot(self.op.weights * v, v))

    def merit(self, R):
        return math.sqrt(self.norm2(self.op.solve_spd(R)))


def _deflation(sys_: _System, w, known):
    """Multiplier ``M(w) = prod (||w - w_i||^-2 + 1)`` and the gradient of ``log M``."""
    logM = 0.0
    grad = np.zeros_like(w)
    for wk in known:
        diff = w - wk
        d2 = sys_.norm2(diff)
        if d2 == 0:
            return math.inf, grad
        fac = 1.0 / d2 + 1.0
        logM += math.log(fac)
        grad += (-2.0 * sys_.op.weights * diff / (d2 * d2)) / fac
    return math.exp(logM), grad


def _newton(sys_: _System, w0, known=(), maxit: int = NEWTON_MAXIT, tol: float = STEP_TOL):
    """Damped (deflated) Newton. Returns ``(w, converged, iterations)``."""
    w = np.array(w0, dtype=float)
    R = sys_.residual(w)
    M, _ = _deflation(sys_, w, known)
    merit = M * sys_.merit(R)
    for it in range(1, maxit + 1):
        d = sys_.newton_step(w, R)
        if known:
            M, glog = _deflation(sys_, w, known)
            denom = 1.0 - float(np.dot(glog, d))
            if denom == 0 or not np.isfinite(denom):
                return w, False, it
            d = d / denom
        if not np.all(np.isfinite(d)):
            return w, False, it
        lam = 1.0
        while lam > 1e-6:
            wn = w + lam * d
            Rn = sys_.residual(wn)
            Mn, _ = _deflation(sys_, wn, known)
            mn = Mn * sys_.merit(Rn)
            if mn < (1.0 - 1e-4 * lam) * merit or lam * np.max(np.abs(d)) <= tol * max(1.0, np.max(np.abs(wn))):
                break
            lam *= 0.5
        else:
            return w, False, it
        w, R, merit = wn, Rn, mn
        if lam * np.max(np.abs(d)) <= tol * max(1.0, float(np.max(np.abs(w)))):
            return w, True, it
    return w, False, maxit


def _shooting_guess(params: ProfileParams, grid: np.ndarray) -> np.ndarray | None:
    """Even positive profile from shooting on ``w'(0)`` with target ``w'(pi/2) = 0`` (``c2 = 0``)."""
    beta, c1 = params.beta, params.c1
    e = 1.0 + 2.0 / beta

    def rhs(_, y):
        return [y[1], -beta ** 2 * y[0] - c1 * math.copysign(abs(y[0]) ** e, y[0])]

    def end_slope(A):
        sol = solve_ivp(rhs, (0.0, math.pi / 2), [0.0, A], rtol=1e-12, atol=1e-14)
        return sol.y[1, -1]

    lo, hi = 1e-3, 1.0
    try:
        while end_slope(hi) > 0 and hi < 1e6:
            hi *= 2.0
        while end_slope(lo) < 0 and lo > 1e-12:
            lo *= 0.5
        if end_slope(lo) * end_slope(hi) > 0:
            return None
        A = brentq(end_slope, lo, hi, xtol=1e-14, rtol=1e-14)
    except (ValueError, OverflowError):
        return None
    half = grid[grid <= math.pi / 2 + 1e-15]
    sol = solve_ivp(rhs, (0.0, math.pi / 2), [0.0, A], t_eval=half, rtol=1e-12, atol=1e-14)
    w_half = sol.y[0]
    n = grid.size
    w = np.empty(n)
    w[:half.size] = w_half
    w[n - half.size:] = w_half[::-1]
    return w


def _seeds(params: ProfileParams, grid: np.ndarray, seed: int) -> list[tuple[str, np.ndarray]]:
    """Initial guesses: mode multiples, linking and saddle combinations, and seeded random mixtures."""
    K = count_nonpositive(params.beta, Domain.FULL_SEMICIRCLE)
    phi = grid[1:-1]
    seeds = []
    for k in range(1, K + 3):
        e = np.sin(k * phi)
        for lam in SEED_AMPLITUDES:
            for sgn in (1.0, -1.0):
                seeds.append((f"mode{k}:{sgn * lam:g}", sgn * lam * e))
    if K >= 1:
        y = sum(np.sin(k * phi) for k in range(1, K + 1))
        for lam in (4.0, 16.0):
            seeds.append((f"link:{lam:g}", y + lam * np.sin((K + 1) * phi)))
            seeds.append((f"saddle:{lam:g}", lam * np.sin(K * phi) + 0.1 * np.sin((K + 1) * phi)))
    rng = np.random.default_rng(seed)
    for j in range(N_RANDOM_SEEDS):
        coef = rng.standard_normal(K + 2) * np.exp(rng.uniform(0.0, math.log(64.0)))
        seeds.append((f"random{j}", sum(c * np.sin((k + 1) * phi) for k, c in enumerate(coef))))
    return seeds


def _accept(params: ProfileParams, w: np.ndarray) -> bool:
    """Reject trivial iterates and, outside ``|beta| < 1``, positive ones."""
    if np.max(np.abs(w)) <= 1e-8:
        return False
    if params.beta >= 1 or params.beta < -2:
        return bool(np.min(w) < 0)
    return True


@dataclass(frozen=True)
class RegularSearch:
    """All critical points found for one parameter set, sorted by functional value."""

    solutions: list[np.ndarray]
    values: list[float]
    labels: list[str]
    grid: np.ndarray
    rejected: int = 0


def _method(params: ProfileParams, method_hint: str) -> str:
    if method_hint not in ("auto", "newton", "shooting"):
        raise DomainError(f"unknown method hint {method_hint!r}")
    shooting_ok = params.regime is RegimeTag.REGULAR_SUPERLINEAR and params.c2 == 0
    if method_hint == "shooting" and not shooting_ok:
        raise DomainError("shooting applies to 0 < beta < 1 with c2 = 0")
    if method_hint == "auto":
        return "shooting" if shooting_ok else "newton"
    return method_hint


def solve_regular_all(params: ProfileParams, method_hint: str = "auto", seed: int = 0,
                      n: int = DEFAULT_N, max_solutions: int = 8) -> RegularSearch:
    """Collect distinct critical points by deflated Newton from every seed."""
    _require_regular(params)
    method = _method(params, method_hint)
    op = ReflectedFourthOrderOperator(int(n), math.pi)
    grid = op.nodes
    positive = params.regime is RegimeTag.REGULAR_SUPERLINEAR
    sys_ = _System(op, params, modified=positive)
    seeds: list[tuple[str, np.ndarray]] = []
    if method == "shooting":
        guess = _shooting_guess(params, grid)
        if guess is not None:
            seeds.append(("shooting", guess[1:-1]))
    if positive:
        seeds += [(f"mode1:{lam:g}", lam * np.sin(grid[1:-1])) for lam in SEED_AMPLITUDES]
    else:
        seeds += _seeds(params, grid, seed)
    known = [np.zeros(grid.size - 2)]
    found, labels = [], []
    rejected = 0
    for label, w0 in seeds:
        w, ok, _ = _newton(sys_, w0, known)
        if not ok:
            continue
        w, ok, _ = _newton(sys_, w)
        if not ok or np.max(np.abs(sys_.residual(w))) > RESIDUAL_TOL:
            continue
        if any(math.sqrt(sys_.norm2(w - k)) <= SAME_SOLUTION_TOL * max(1.0, np.max(np.abs(w))) for k in known):
            continue
        known.append(w)
        if not _accept(params, w):
            rejected += 1
            continue
        found.append(w)
        labels.append(label)
        if positive or len(found) >= max_solutions:
            break
    values = [functional_value(w, params, grid, modified=positive) for w in found]
    order = sorted(range(len(found)), key=lambda i: (values[i], labels[i]))
    return RegularSearch([found[i] for i in order], [values[i] for i in order], [labels[i] for i in order],
                         grid, rejected)


def _profile(params: ProfileParams, grid: np.ndarray, w_int: np.ndarray, tag: str, info: dict[str, Any]) -> ProfileSolution:
    w = np.concatenate([[0.0], w_int, [0.0]])
    op = ReflectedFourthOrderOperator(grid.size - 1, math.pi)
    sol = ProfileSolution(params, math.pi, grid, w, op.derivative(w), tag, 0.0, info=info)
    return sol.with_diagnostics(regular_report(sol))


def solve_regular(params: ProfileParams, method_hint: str = "auto", seed: int = 0,
                  n: int = DEFAULT_N) -> ProfileSolution:
    """Nontrivial critical point on ``(0, pi)`` with the smallest functional value.

    For ``0 < beta < 1`` the positive-part functional is used and the positive solution is
    returned. Alternates found by deflation are listed in ``info``.
    """
    search = solve_regular_all(params, method_hint, seed, n)
    if not search.solutions:
        raise NonConvergence("no start converged to an admissible nontrivial solution")
    info = {
        "method": _method(params, method_hint),
        "seed_label": search.labels[0],
        "functional_value": search.values[0],
        "alternates": [{"seed_label": lab, "functional_value": val, "max": float(np.max(s)), "min": float(np.min(s))}
                       for lab, val, s in zip(search.labels[1:], search.values[1:], search.solutions[1:])],
        "rejected_positive": search.rejected,
        "seed": int(seed),
    }
    return _profile(params, search.grid, search.solutions[0], "regular-newton-deflation", info)


def polish_regular(params: ProfileParams, w_full: np.ndarray, n: int | None = None) -> ProfileSolution:
    """Newton from a given full-grid guess (used for warm starts in parameter continuation)."""
    _require_regular(params)
    w_full = np.asarray(w_full, dtype=float)
    n = w_full.size - 1 if n is None else int(n)
    op = ReflectedFourthOrderOperator(n, math.pi)
    if w_full.size != n + 1:
        w_full = np.interp(op.nodes, np.linspace(0.0, math.pi, w_full.size), w_full)
    sys_ = _System(op, params, modified=params.regime is RegimeTag.REGULAR_SUPERLINEAR)
    w, ok, it = _newton(sys_, w_full[1:-1])
    if not ok or np.max(np.abs(sys_.residual(w))) > RESIDUAL_TOL or np.max(np.abs(w)) <= 1e-8:
        raise NonConvergence("warm-started Newton did not converge", float(np.max(np.abs(sys_.residual(w)))))
    return _profile(params, op.nodes, w, "regular-newton-warm", {"method": "newton", "iterations": it})


# ---------------------------------------------------------------------------
# verifiers


def projection_identity(sol: ProfileSolution) -> tuple[float, float]:
    """Both sides of ``(1 - beta^2) integral w e1 = integral g(phi, w) e1`` with ``e1 = sin``.

    With ``mu_1 = 1 - beta^2`` the left side is negative for positive ``w`` when
    ``|beta| > 1``, while the right side is positive; the identity therefore forces a
    sign change.
    """
    x = sol.grid
    e1 = np.sin(x)
    lhs = (1.0 - sol.params.beta ** 2) * float(np.trapezoid(sol.w * e1, x))
    rhs = float(np.trapezoid(nonlinearity(x, sol.w, sol.params) * e1, x))
    return lhs, rhs


def regular_report(sol: ProfileSolution) -> ResidualReport:
    """Discrete residual, gradient size and identities of a regular profile, from grid values only."""
    p = sol.params
    positive = p.regime is RegimeTag.REGULAR_SUPERLINEAR
    st = functional_state(sol.w, p, sol.grid, modified=positive)
    op = _operator(sol.grid)
    R = st.gradient / op.weights
    lhs, rhs = projection_identity(sol)
    return ResidualReport(
        {"discrete_ode": float(np.max(np.abs(R)))},
        {"w_left": abs(float(sol.w[0])), "w_right": abs(float(sol.w[-1]))},
        0.0,
        {"gradient_sup": float(np.max(np.abs(st.gradient))), "functional_value": st.I_value,
         "projection_identity": abs(lhs - rhs), "nodal_count": float(sol.nodal_count()),
         "min_w": float(np.min(sol.w)), "max_w": float(np.max(sol.w))},
    )
