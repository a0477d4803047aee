"""Discrete Dirichlet operators for ``-d^2/dphi^2`` with a variational structure.

Each operator acts on interior values (boundary values are zero) and comes with
a diagonal quadrature ``weights`` such that ``weights * apply(w)`` is the
gradient of the discrete Dirichlet energy ``0.5 * energy(w)``. The bilinear form,
functional and gradient built on top of an operator are therefore exactly
consistent with each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded, solveh_banded

from .errors import DomainError
from .grids import is_uniform, reflected_derivative, derivative


@dataclass(frozen=True)
class ThreePointOperator:
    """Second-order three-point scheme on an arbitrary strictly increasing grid.

    Off-diagonal entries are negative, so the matrix ``K + diag(c)`` with ``c >= 0``
    is an M-matrix whenever ``K - beta^2`` is positive definite.
    """

    nodes: np.ndarray
    name: str = "fd2"

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 5 or np.any(np.diff(x) <= 0):
            raise DomainError("grid must be strictly increasing with at least 5 nodes")
        h = np.diff(x)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "_hl", h[:-1])
        object.__setattr__(self, "_hr", h[1:])

    @property
    def length(self) -> float:
        return float(self.nodes[-1] - self.nodes[0])

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def weights(self) -> np.ndarray:
        return 0.5 * (self._hl + self._hr)

    def apply(self, w: np.ndarray) -> np.ndarray:
        hl, hr, m = self._hl, self._hr, self.weights
        wl = np.concatenate([[0.0], w[:-1]])
        wr = np.concatenate([w[1:], [0.0]])
        return ((w - wl) / hl - (wr - w) / hr) / m

    def energy(self, w: np.ndarray) -> float:
        """Discrete ``integral of |w'|^2``."""
        full = np.concatenate([[0.0], w, [0.0]])
        return float(np.sum(np.diff(full) ** 2 / np.diff(self.nodes)))

    def ab_matrix(self, shift: np.ndarray) -> tuple[tuple[int, int], np.ndarray]:
        """Banded form of ``K + diag(shift)`` for ``scipy.linalg.solve_banded``."""
        hl, hr, m = self._hl, self._hr, self.weights
        n = m.size
        ab = np.zeros((3, n))
        ab[0, 1:] = -1.0 / (hr[:-1] * m[:-1])
        ab[1] = (1.0 / hl + 1.0 / hr) / m + shift
        ab[2, :-1] = -1.0 / (hl[1:] * m[1:])
        return (1, 1), ab

    def solve(self, shift: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        lu, ab = self.ab_matrix(shift)
        return solve_banded(lu, ab, rhs)

    def derivative(self, w_full: np.ndarray) -> np.ndarray:
        return derivative(self.nodes, w_full)


@dataclass(frozen=True)
class ReflectedFourthOrderOperator:
    """Fourth-order five-point scheme on a uniform grid with odd reflection at both ends.

    The odd extension is exactly the Dirichlet condition for every odd-symmetric
    problem, so the discrete sine vectors are exact eigenvectors and the matrix is
    symmetric positive definite and pentadiagonal.
    """

    n: int
    length: float = np.pi
    name: str = "fd4"
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 6:
            raise DomainError(f"fourth-order operator needs at least 6 intervals, got {self.n}")
        object.__setattr__(self, "nodes", np.linspace(0.0, self.length, int(self.n) + 1))

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n - 1, self.h)

    def _bands(self):
        c = 1.0 / (12.0 * self.h * self.h)
        m = self.n - 1
        d0 = np.full(m, 30.0 * c)
        d0[0] -= c
        d0[-1] -= c
        return d0, np.full(m - 1, -16.0 * c), np.full(m - 2, c)

    def apply(self, w: np.ndarray) -> np.ndarray:
        d0, d1, d2 = self._bands()
        out = d0 * w
        out[:-1] += d1 * w[1:]
        out[1:] += d1 * w[:-1]
        out[:-2] += d2 * w[2:]
        out[2:] += d2 * w[:-2]
        return out

    def energy(self, w: np.ndarray) -> float:
        return float(self.h * np.dot(w, self.apply(w)))

    def ab_matrix(self, shift: np.ndarray) -> tuple[tuple[int, int], np.ndarray]:
        d0, d1, d2 = self._bands()
        m = d0.size
        ab = np.zeros((5, m))
        ab[0, 2:] = d2
        ab[1, 1:] = d1
        ab[2] = d0 + shift
        ab[3, :-1] = d1
        ab[4, :-2] = d2
        return (2, 2), ab

    def solve(self, shift: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        lu, ab = self.ab_matrix(shift)
        return solve_banded(lu, ab, rhs)

    def solve_spd(self, rhs: np.ndarray) -> np.ndarray:
        """Solve with the bare operator, using its symmetric positive definite structure."""
        d0, d1, d2 = self._bands()
        ab = np.zeros((3, d0.size))
        ab[0, 2:] = d2
        ab[1, 1:] = d1
        ab[2] = d0
        return solveh_banded(ab, rhs)

    def derivative(self, w_full: np.ndarray) -> np.ndarray:
        return reflected_derivative(self.h, w_full)


Operator = ThreePointOperator | ReflectedFourthOrderOperator


def operator_for(nodes: np.ndarray) -> Operator:
    """Pick the fourth-order scheme on uniform grids and the three-point scheme otherwise."""
    x = np.asarray(nodes, dtype=float)
    if x[0] == 0.0 and is_uniform(x):
        return ReflectedFourthOrderOperator(x.size - 1, float(x[-1]))
    return ThreePointOperator(x)
