"""Parameter bundle, regime classification, eigenvalues and exponent ranges.

The angular profile ``w`` of a homogeneous stream function solves

    -w'' - beta^2 w = c1 w|w|^(2/beta) + c2 sin(phi) |w|^(1+3/beta)

with ``alpha = beta + 1``. For ``-2 < beta < 0`` the same equation is written
with the negative exponents ``s = -1 - 2/beta`` and ``s' = -1 - 3/beta`` as
``-w'' - beta^2 w = c1 w^(-s) + c2 sin(phi) w^(-s')`` for positive ``w``.
The physical constants of the Bernoulli function ``Pi = C1 |psi|^(2+2/beta)``
and the density ``rho = C2 psi|psi|^(1+3/beta)`` relate to ``(c1, c2)`` by
``c1 = -2 C1 (1 + 1/beta)`` and ``c2 = 2 C2 (1 + 3/(2 beta))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

# Closest approach of the default singular sigma to the excluded value 1.
SIGMA_CLAMP = 1e-3


class RegimeTag(str, enum.Enum):
    REGULAR_SUPERLINEAR = "RegularSuperlinear"
    REGULAR_LINKING = "RegularLinking"
    REGULAR_SUBLINEAR = "RegularSublinear"
    SINGULAR_AUTONOMOUS = "SingularAutonomous"
    SINGULAR_NONAUTONOMOUS = "SingularNonautonomous"
    INVALID = "Invalid"

    @property
    def is_regular(self) -> bool:
        return self in (RegimeTag.REGULAR_SUPERLINEAR, RegimeTag.REGULAR_LINKING, RegimeTag.REGULAR_SUBLINEAR)

    @property
    def is_singular(self) -> bool:
        return self in (RegimeTag.SINGULAR_AUTONOMOUS, RegimeTag.SINGULAR_NONAUTONOMOUS)


class Domain(str, enum.Enum):
    FULL_SEMICIRCLE = "FullSemicircle"
    QUARTER = "Quarter"

    @property
    def length(self) -> float:
        return math.pi if self is Domain.FULL_SEMICIRCLE else math.pi / 2


def _require_nonzero(beta: float) -> None:
    if beta == 0:
        raise DomainError("beta = 0: the exponents 2/beta and 3/beta are undefined")


def derive_exponents(beta: float) -> tuple[float, float, float]:
    """Return ``(alpha, s, s_prime)`` for a given ``beta``."""
    _require_nonzero(beta)
    return beta + 1.0, -1.0 - 2.0 / beta, -1.0 - 3.0 / beta


def map_coefficients(beta: float, C1: float, C2: float) -> tuple[float, float]:
    """Map the physical constants ``(C1, C2)`` to the equation coefficients ``(c1, c2)``."""
    _require_nonzero(beta)
    return -2.0 * C1 * (1.0 + 1.0 / beta), 2.0 * C2 * (1.0 + 3.0 / (2.0 * beta))


def inverse_map_coefficients(beta: float, c1: float, c2: float) -> tuple[float, float]:
    """Inverse of :func:`map_coefficients`.

    At ``beta = -1`` (resp. ``-3/2``) the first (resp. second) map is
    identically zero: a nonzero coefficient is rejected and a zero one is
    mapped to the constant 0, which is the conventional choice of the free
    constant.
    """
    _require_nonzero(beta)
    k1 = -2.0 * (1.0 + 1.0 / beta)
    k2 = 2.0 * (1.0 + 3.0 / (2.0 * beta))
    if k1 == 0.0:
        if c1 != 0.0:
            raise DomainError("beta = -1 forces c1 = 0; a nonzero c1 has no preimage C1")
        C1 = 0.0
    else:
        C1 = c1 / k1
    if k2 == 0.0:
        if c2 != 0.0:
            raise DomainError("beta = -3/2 forces c2 = 0; a nonzero c2 has no preimage C2")
        C2 = 0.0
    else:
        C2 = c2 / k2
    return C1, C2


def invalid_reason(beta: float, c1: float, c2: float) -> str | None:
    """Explain why ``(beta, c1, c2)`` is not admissible, or return ``None``."""
    if not all(math.isfinite(v) for v in (beta, c1, c2)):
        return "parameters must be finite"
    if c1 < 0 or c2 < 0:
        return "the coefficients must satisfy c1 >= 0 and c2 >= 0"
    if c1 == 0 and c2 == 0:
        return "at least one of c1, c2 must be nonzero"
    if beta == 0 or beta == -2:
        return f"beta = {beta:g} is excluded: no profile is constructed at beta = 0 or beta = -2"
    if -2 < beta < 0:
        if beta == -1 and c1 != 0:
            return "c1 must vanish at beta = -1 in the singular range -2 < beta < 0"
        if beta == -1.5 and c2 != 0:
            return "c2 must vanish at beta = -3/2 in the singular range -2 < beta < 0"
        return None
    if -3 <= beta < -2 and c2 != 0:
        return "c2 must vanish for -3 <= beta < -2"
    return None


def classify_regime(beta: float, c1: float, c2: float) -> RegimeTag:
    """Return the unique regime tag for ``(beta, c1, c2)``; never raises."""
    if invalid_reason(beta, c1, c2) is not None:
        return RegimeTag.INVALID
    if 0 < beta < 1:
        return RegimeTag.REGULAR_SUPERLINEAR
    if beta >= 1:
        return RegimeTag.REGULAR_LINKING
    if beta < -2:
        return RegimeTag.REGULAR_SUBLINEAR
    return RegimeTag.SINGULAR_AUTONOMOUS if c2 == 0 else RegimeTag.SINGULAR_NONAUTONOMOUS


def eigenvalue(k: int, beta: float, domain: Domain = Domain.FULL_SEMICIRCLE) -> float:
    """Eigenvalue ``mu_k`` of ``-d^2/dphi^2 - beta^2`` with Dirichlet data on ``domain``."""
    if int(k) != k or k < 1:
        raise DomainError(f"mode index must be a positive integer, got {k!r}")
    freq = k if Domain(domain) is Domain.FULL_SEMICIRCLE else 2 * k
    return float(freq * freq) - beta * beta


def sigma_range(beta: float) -> tuple[float, float]:
    """Admissible upper-barrier exponents: the half-open interval ``(lower, upper]``."""
    if not -2 < beta < 0:
        raise DomainError(f"sigma range is defined for -2 < beta < 0, got beta = {beta:g}")
    return beta * beta / 4.0, min(1.0, -2.0 * beta / 3.0)


def default_sigma(beta: float) -> float:
    """Midpoint of :func:`sigma_range`, kept at least ``SIGMA_CLAMP`` below 1."""
    lo, hi = sigma_range(beta)
    sigma = min(0.5 * (lo + hi), 1.0 - SIGMA_CLAMP)
    # Close to beta = -2 the lower end exceeds the clamp; stay halfway between it and 1.
    return sigma if sigma > lo else 0.5 * (lo + 1.0)


def regularity_ranges() -> dict[str, tuple[float, float]]:
    """Ranges of beta quoted for the ``C^{1, 2+2/beta}`` endpoint regularity.

    Two different ranges appear for the same property; both are exposed and
    neither is enforced.
    """
    return {"existence_statement": (-2.0, -1.5), "autonomous_statement": (-2.0, -1.0)}


@dataclass(frozen=True)
class ProfileParams:
    """Validated parameter bundle; construct with :meth:`from_c` or :meth:`from_C`."""

    beta: float
    c1: float
    c2: float
    alpha: float
    C1: float
    C2: float
    s: float
    s_prime: float
    regime: RegimeTag

    @classmethod
    def from_c(cls, beta: float, c1: float, c2: float) -> "ProfileParams":
        beta, c1, c2 = float(beta), float(c1), float(c2)
        alpha, s, sp = derive_exponents(beta)
        regime = classify_regime(beta, c1, c2)
        if regime is RegimeTag.INVALID:
            C1 = C2 = math.nan
        else:
            C1, C2 = inverse_map_coefficients(beta, c1, c2)
        return cls(beta, c1, c2, alpha, C1, C2, s, sp, regime)

    @classmethod
    def from_C(cls, beta: float, C1: float, C2: float) -> "ProfileParams":
        beta, C1, C2 = float(beta), float(C1), float(C2)
        alpha, s, sp = derive_exponents(beta)
        c1, c2 = map_coefficients(beta, C1, C2)
        c1, c2 = c1 + 0.0, c2 + 0.0
        return cls(beta, c1, c2, alpha, C1, C2, s, sp, classify_regime(beta, c1, c2))

    def require_valid(self) -> "ProfileParams":
        reason = invalid_reason(self.beta, self.c1, self.c2)
        if reason is not None:
            raise DomainError(reason)
        return self

    def with_c(self, c1: float, c2: float) -> "ProfileParams":
        return ProfileParams.from_c(self.beta, c1, c2)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta, "c1": self.c1, "c2": self.c2, "alpha": self.alpha,
            "C1": self.C1, "C2": self.C2, "s": self.s, "s_prime": self.s_prime,
            "regime": self.regime.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProfileParams":
        params = cls.from_c(data["beta"], data["c1"], data["c2"])
        if "C1" in data and "C2" in data and params.regime is not RegimeTag.INVALID:
            params = cls(params.beta, params.c1, params.c2, params.alpha, float(data["C1"]),
                         float(data["C2"]), params.s, params.s_prime, params.regime)
        return params
