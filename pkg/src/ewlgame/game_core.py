"""Classical primitives for symmetric two-strategy games.

Strategies are indexed 0 and 1; for the Prisoner's dilemma index 0 is
"cooperate" and index 1 is "defect".  A mixed strategy is a
:class:`StrategyDensity` ``(x0, x1)`` and single-parameter families use the
weight ``t`` on index 1, i.e. ``(1 - t, t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORMALIZATION_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a domain invariant."""


@dataclass(frozen=True)
class GameMatrix2:
    """A real 2x2 payoff matrix ``A[i][j]`` (row player's payoff)."""

    a00: float
    a01: float
    a10: float
    a11: float

    def __post_init__(self):
        for name in ("a00", "a01", "a10", "a11"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"matrix entry {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, arr) -> GameMatrix2:
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {arr.shape}")
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.a00, self.a01], [self.a10, self.a11]])

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        return (self.a00, self.a01, self.a10, self.a11)[2 * i + j]

    @property
    def T(self) -> GameMatrix2:
        return GameMatrix2(self.a00, self.a10, self.a01, self.a11)

    def __add__(self, other: GameMatrix2) -> GameMatrix2:
        return GameMatrix2.from_array(self.as_array() + other.as_array())

    def scaled(self, factor: float) -> GameMatrix2:
        return GameMatrix2.from_array(factor * self.as_array())


@dataclass(frozen=True)
class PrisonersDilemmaParams:
    """Payoffs ``0 < a < b < c`` giving the matrix ``[[b, 0], [c, a]]``.

    ``b`` is mutual cooperation, ``a`` mutual defection and ``c`` the
    temptation to defect against a cooperator.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = (float(self.a), float(self.b), float(self.c))
        if not all(math.isfinite(v) for v in (a, b, c)):
            raise ValidationError("Prisoner's dilemma payoffs must be finite")
        if not 0 < a < b < c:
            raise ValidationError(
                f"Prisoner's dilemma requires 0 < a < b < c, got a={a}, b={b}, c={c}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def matrix(self) -> GameMatrix2:
        return GameMatrix2(self.b, 0.0, self.c, self.a)


@dataclass(frozen=True)
class StrategyDensity:
    """Probability weights ``(x0, x1)`` on the two basis strategies."""

    x0: float
    x1: float

    def __post_init__(self):
        x0, x1 = float(self.x0), float(self.x1)
        if not (math.isfinite(x0) and math.isfinite(x1)):
            raise ValidationError(f"density components must be finite: ({x0}, {x1})")
        if x0 < 0 or x1 < 0:
            raise ValidationError(f"density components must be non-negative: ({x0}, {x1})")
        if abs(x0 + x1 - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(f"density ({x0}, {x1}) does not sum to 1")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "x1", x1)

    @classmethod
    def from_weight(cls, t: float) -> StrategyDensity:
        """Density ``(1 - t, t)`` for a weight ``t`` on strategy 1."""
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ValidationError(f"weight must lie in [0, 1], got {t}")
        return cls(1.0 - t, t)

    @property
    def weight(self) -> float:
        return self.x1

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1])


def classical_payoff(x: StrategyDensity, y: StrategyDensity, A: GameMatrix2) -> float:
    """Row payoff ``sum_ij x_i A_ij y_j`` of density ``x`` against ``y``."""
    return (
        x.x0 * (A.a00 * y.x0 + A.a01 * y.x1)
        + x.x1 * (A.a10 * y.x0 + A.a11 * y.x1)
    )


def conjugate_payoff(x: StrategyDensity, y: StrategyDensity, A: GameMatrix2) -> float:
    """The opponent's payoff in the symmetric game, ``classical_payoff(y, x, A)``."""
    return classical_payoff(y, x, A)


def diagonal_payoff(x: StrategyDensity, A: GameMatrix2) -> float:
    """Common payoff when both players use the same density ``x``."""
    return classical_payoff(x, x, A)
