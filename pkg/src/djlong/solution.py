"""Immutable containers for computed profiles and their verification reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .params import ProfileParams


@dataclass(frozen=True)
class ResidualReport:
    """Sup-norm residuals keyed by equation name.

    ``eq_residuals`` holds the equations that were evaluated, ``boundary_violations``
    the boundary-condition defects, ``extra`` any further scalar diagnostics such as
    energy-identity deviations or barrier margins. Entries that do not apply to a
    profile are simply absent.
    """

    eq_residuals: dict[str, float] = field(default_factory=dict)
    boundary_violations: dict[str, float] = field(default_factory=dict)
    excluded_node_fraction: float = 0.0
    extra: dict[str, float] = field(default_factory=dict)

    def merged(self, other: "ResidualReport") -> "ResidualReport":
        return ResidualReport(
            {**self.eq_residuals, **other.eq_residuals},
            {**self.boundary_violations, **other.boundary_violations},
            max(self.excluded_node_fraction, other.excluded_node_fraction),
            {**self.extra, **other.extra},
        )

    def max_residual(self) -> float:
        vals = list(self.eq_residuals.values())
        return max(vals) if vals else 0.0

    def to_dict(self) -> dict:
        return {
            "eq_residuals": dict(sorted(self.eq_residuals.items())),
            "boundary_violations": dict(sorted(self.boundary_violations.items())),
            "excluded_node_fraction": self.excluded_node_fraction,
            "extra": dict(sorted(self.extra.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResidualReport":
        return cls(
            {k: float(v) for k, v in data.get("eq_residuals", {}).items()},
            {k: float(v) for k, v in data.get("boundary_violations", {}).items()},
            float(data.get("excluded_node_fraction", 0.0)),
            {k: float(v) for k, v in data.get("extra", {}).items()},
        )


@dataclass(frozen=True, eq=False)
class ProfileSolution:
    """An angular profile ``w`` with derivative ``dw`` on ``grid`` over ``[0, domain_length]``.

    ``info`` carries solver-specific metadata (iteration counts, continuation
    history, alternates found by deflation). It is serialised alongside the profile
    but never used by the verifiers, which depend only on ``params``, ``grid``,
    ``w`` and ``dw``.
    """

    params: ProfileParams
    domain_length: float
    grid: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    solver_tag: str
    eps_final: float = 0.0
    diagnostics: ResidualReport = field(default_factory=ResidualReport)
    info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("grid", "w", "dw"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.grid.shape == self.w.shape == self.dw.shape):
            raise ValueError("grid, w and dw must have the same shape")

    @property
    def is_quarter(self) -> bool:
        return math.isclose(self.domain_length, math.pi / 2)

    @property
    def n_intervals(self) -> int:
        return self.grid.size - 1

    def with_diagnostics(self, report: ResidualReport) -> "ProfileSolution":
        return replace(self, diagnostics=report)

    def with_info(self, **items) -> "ProfileSolution":
        return replace(self, info={**self.info, **items})

    def nodal_count(self) -> int:
        """Number of sign changes of ``w`` strictly inside the domain."""
        inner = self.w[1:-1]
        tol = 1e-12 * max(1.0, float(np.max(np.abs(inner))))
        sgn = np.sign(np.where(np.abs(inner) <= tol, 0.0, inner))
        sgn = sgn[sgn != 0]
        return int(np.count_nonzero(sgn[1:] != sgn[:-1]))
