"""Curvature quadruples (alpha, beta, gamma, kappa) and the parameter space Gamma.

Integer quadruples are kept as Python ints so that every downstream product stays
exact; anything else is carried as float64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from numbers import Integral, Real
from typing import Sequence

REL_TOL = 1e-12

WIDE_INT_MAX = 2**127 - 1


class Backend(str, Enum):
    """Numeric representation used for curvature arithmetic."""

    AUTO = "auto"
    EXACT = "exact"  # unbounded Python integers
    WIDE = "wide"  # integers checked against a signed 128-bit range
    FLOAT = "float"


class CurvatureOverflowError(OverflowError):
    """An integer value left the range allowed by the active backend."""


def check_width(value: int, backend: Backend | str) -> int:
    if Backend(backend) is Backend.WIDE and abs(value) > WIDE_INT_MAX:
        raise CurvatureOverflowError(f"value {value} exceeds the 128-bit integer range")
    return value


def _is_int(x) -> bool:
    return isinstance(x, Integral) and not isinstance(x, bool)


def kappa_of(alpha: Real, beta: Real, gamma: Real) -> Real:
    """Return sqrt(beta*gamma + gamma*alpha + alpha*beta).

    For integer arguments with a perfect-square radicand the result is an exact int.
    """
    if min(alpha, beta, gamma) < 0:
        raise ValueError("curvatures must be nonnegative")
    radicand = beta * gamma + gamma * alpha + alpha * beta
    if _is_int(alpha) and _is_int(beta) and _is_int(gamma):
        root = math.isqrt(int(radicand))
        if root * root == radicand:
            return root
    return math.sqrt(radicand)


@dataclass(frozen=True)
class CurvatureVector:
    """Row vector g = (alpha, beta, gamma, kappa) with kappa^2 = beta*gamma + gamma*alpha + alpha*beta."""

    alpha: Real
    beta: Real
    gamma: Real
    kappa: Real

    def __post_init__(self):
        a, b, c, k = self.alpha, self.beta, self.gamma, self.kappa
        if min(a, b, c, k) < 0:
            raise ValueError(f"negative entry in {self.as_tuple()}")
        rad = b * c + c * a + a * b
        if self.is_integral:
            if k * k != rad:
                raise ValueError(f"kappa invariant violated exactly: {k}^2 != {rad}")
        elif abs(k * k - rad) > REL_TOL * max(k * k, rad, 1e-300):
            raise ValueError(f"kappa invariant violated: {k}^2 vs {rad}")

    @classmethod
    def from_triple(cls, alpha: Real, beta: Real, gamma: Real) -> "CurvatureVector":
        """Build the quadruple with kappa derived; non-integral input is coerced to float."""
        if not (_is_int(alpha) and _is_int(beta) and _is_int(gamma)):
            alpha, beta, gamma = float(alpha), float(beta), float(gamma)
        k = kappa_of(alpha, beta, gamma)
        if not _is_int(k):
            alpha, beta, gamma = float(alpha), float(beta), float(gamma)
        return cls(alpha, beta, gamma, k)

    @classmethod
    def of(cls, values: Sequence[Real]) -> "CurvatureVector":
        """Accept either a triple (kappa derived) or a full quadruple."""
        if len(values) == 3:
            return cls.from_triple(*values)
        if len(values) == 4:
            if all(_is_int(v) for v in values):
                return cls(*values)
            return cls(*(float(v) for v in values))
        raise ValueError("expected 3 or 4 curvatures")

    @property
    def is_integral(self) -> bool:
        return all(_is_int(v) for v in self.as_tuple())

    def as_tuple(self) -> tuple:
        return (self.alpha, self.beta, self.gamma, self.kappa)

    def as_floats(self) -> tuple[float, float, float, float]:
        return tuple(float(v) for v in self.as_tuple())

    def to_float(self) -> "CurvatureVector":
        return CurvatureVector(*self.as_floats())

    @property
    def triple(self) -> tuple:
        return (self.alpha, self.beta, self.gamma)

    def __iter__(self):
        return iter(self.as_tuple())

    def __str__(self) -> str:
        return "(" + ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in self) + ")"


@dataclass(frozen=True)
class GammaEpsilonParams:
    epsilon: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")


def pair_sums(v: CurvatureVector) -> tuple:
    return (v.beta + v.gamma, v.gamma + v.alpha, v.alpha + v.beta)


def in_gamma(v: CurvatureVector) -> bool:
    return min(v.triple) >= 0 and v.kappa > 0


def in_gamma_eps(v: CurvatureVector, p: GammaEpsilonParams | float) -> bool:
    eps = p.epsilon if isinstance(p, GammaEpsilonParams) else float(p)
    if not in_gamma(v):
        return False
    return max(v.triple) <= 1 / eps and min(pair_sums(v)) >= eps


def in_gamma_interior(v: CurvatureVector) -> bool:
    return min(v.as_tuple()) > 0


def epsilon_of(v: CurvatureVector) -> float:
    """Largest epsilon with v in Gamma_epsilon (ignoring the epsilon < 1 cap)."""
    return min(1 / max(v.triple), min(pair_sums(v)))


def _require_gamma(v: CurvatureVector) -> None:
    if not in_gamma(v):
        raise ValueError(f"{v} is not in Gamma (kappa must be positive)")


def inscribed_curvature(v: CurvatureVector) -> Real:
    """Curvature alpha + beta + gamma + 2*kappa of the disk inscribed in the ideal triangle."""
    _require_gamma(v)
    return v.alpha + v.beta + v.gamma + 2 * v.kappa


def circumscribed_curvature(v: CurvatureVector) -> Real:
    _require_gamma(v)
    return v.kappa


def scale(v: CurvatureVector, s: Real) -> CurvatureVector:
    if s <= 0:
        raise ValueError("scale factor must be positive")
    _require_gamma(v)
    if v.is_integral and _is_int(s):
        return CurvatureVector(*(s * x for x in v))
    s = float(s)
    return CurvatureVector(*(s * float(x) for x in v))


def permute(v: CurvatureVector, pi: Sequence[int]) -> CurvatureVector:
    """Reorder (alpha, beta, gamma) so that the new j-th entry is the old pi[j]-th (1-based)."""
    if sorted(pi) != [1, 2, 3]:
        raise ValueError(f"{pi} is not a permutation of (1, 2, 3)")
    t = v.triple
    return CurvatureVector(t[pi[0] - 1], t[pi[1] - 1], t[pi[2] - 1], v.kappa)


def rho_gamma(v1: CurvatureVector, v2: CurvatureVector) -> float:
    """Euclidean distance between the (alpha, beta, gamma) parts."""
    return math.dist([float(x) for x in v1.triple], [float(x) for x in v2.triple])


def norm(v: CurvatureVector) -> float:
    return math.hypot(*(float(x) for x in v))
