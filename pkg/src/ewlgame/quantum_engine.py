"""Entangled two-qubit strategy machinery.

Each player applies ``U = [[a0, a1], [-conj(a1), conj(a0)]]`` with
``a_i = sqrt(x_i) exp(i*phase_i)`` between the entangler
``J = exp(-i gamma/2 sigma_y (x) sigma_y)`` and its adjoint.  The payoff is
read off the diagonal game operator, ``sum_ij A_ij |psi_ij|^2``.

The state-vector route (:func:`correlated_state`, :func:`quantum_payoff`) is
the reference.  :func:`effective_decomposition` is the analytic view of the
same payoff as a density-independent matrix plus a correlation term
``K * sqrt(x0 x1 y0 y1)``.  Its phase combinations were derived from the
state vector and differ from a naive "sum of phases" rule on the
off-diagonal entries::

    theta_00 = xi0 + u0      theta_01 = u1 - xi0
    theta_10 = u0 - xi1      theta_11 = xi1 + u1

    B_ij = A_ij - sin^2(gamma) sin^2(theta_ij) (A_ij - A_{~i~j})
    K    = 2 sin(gamma) sum_ij (-1)^(i+1) sin(theta_{~i~j}) cos(theta_ij) A_ij

where ``~`` flips an index.  A consequence is that the symmetric profile
``(pi/4, pi/4)`` exchanges only the diagonal entries (the matrix of
:func:`case4_matrix`) while ``(pi/4, 3pi/4)`` exchanges both diagonal and
off-diagonal entries (the matrix of :func:`case3_matrix`).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .game_core import (
    GameMatrix2,
    StrategyDensity,
    ValidationError,
    classical_payoff,
)

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi
GAMMA_SLACK = 1e-12
PHASE_MATCH_TOL = 1e-9


def check_gamma(gamma: float) -> float:
    """Return ``gamma`` as a float, rejecting values outside ``[0, pi/2]``."""
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < -GAMMA_SLACK or gamma > HALF_PI + GAMMA_SLACK:
        raise ValidationError(f"entanglement gamma must lie in [0, pi/2], got {gamma}")
    return min(max(gamma, 0.0), HALF_PI)


@dataclass(frozen=True)
class PhaseProfile:
    """Phase angles of both players' amplitudes.

    ``upsilon0``/``upsilon1`` default to ``xi0``/``xi1`` (identical phases for
    both players).  Angles are stored as given; :meth:`canonical` reduces them
    to ``[0, 2*pi)``.
    """

    xi0: float
    xi1: float
    upsilon0: float | None = None
    upsilon1: float | None = None

    def __post_init__(self):
        if self.upsilon0 is None:
            object.__setattr__(self, "upsilon0", self.xi0)
        if self.upsilon1 is None:
            object.__setattr__(self, "upsilon1", self.xi1)
        for name in ("xi0", "xi1", "upsilon0", "upsilon1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"phase {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)

    @property
    def is_symmetric(self) -> bool:
        return self.xi0 == self.upsilon0 and self.xi1 == self.upsilon1

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xi0, self.xi1, self.upsilon0, self.upsilon1)

    def canonical(self) -> PhaseProfile:
        tau = 2.0 * math.pi
        return PhaseProfile(*(v % tau for v in self.as_tuple()))


TRIVIAL = PhaseProfile(0.0, 0.0)
PSEUDOCLASSICAL = PhaseProfile(0.0, HALF_PI)
CASE3 = PhaseProfile(QUARTER_PI, QUARTER_PI)
CASE4 = PhaseProfile(QUARTER_PI, 3.0 * QUARTER_PI)


@dataclass(frozen=True)
class QuantumStrategy:
    """A strategy density together with the phases of its two amplitudes."""

    density: StrategyDensity
    phase0: float = 0.0
    phase1: float = 0.0

    def __post_init__(self):
        if not isinstance(self.density, StrategyDensity):
            raise ValidationError("QuantumStrategy.density must be a StrategyDensity")
        for name in ("phase0", "phase1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} is not finite: {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_weight(cls, t: float, phase0: float = 0.0, phase1: float = 0.0) -> QuantumStrategy:
        return cls(StrategyDensity.from_weight(t), phase0, phase1)

    def amplitudes(self) -> tuple[complex, complex]:
        return (
            math.sqrt(self.density.x0) * complex(math.cos(self.phase0), math.sin(self.phase0)),
            math.sqrt(self.density.x1) * complex(math.cos(self.phase1), math.sin(self.phase1)),
        )


@dataclass(frozen=True)
class StateVector4:
    """Amplitudes over ``|00>, |01>, |10>, |11>`` (first index: player 1)."""

    amp00: complex
    amp01: complex
    amp10: complex
    amp11: complex

    @classmethod
    def from_array(cls, arr) -> StateVector4:
        a = np.asarray(arr, dtype=complex).reshape(4)
        return cls(complex(a[0]), complex(a[1]), complex(a[2]), complex(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.amp00, self.amp01, self.amp10, self.amp11], dtype=complex)

    def probabilities(self) -> np.ndarray:
        """``|psi_ij|^2`` as a 2x2 array indexed ``[i, j]``."""
        return (np.abs(self.as_array()) ** 2).reshape(2, 2)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))

    def with_global_phase(self, phi: float) -> StateVector4:
        return StateVector4.from_array(np.exp(1j * phi) * self.as_array())


def strategy_unitary(s: QuantumStrategy) -> np.ndarray:
    """The 2x2 SU(2) matrix of a quantum strategy."""
    a0, a1 = s.amplitudes()
    return np.array([[a0, a1], [-a1.conjugate(), a0.conjugate()]], dtype=complex)


def apply_entangler(state, gamma: float, adjoint: bool = False) -> np.ndarray:
    """Apply ``J_gamma`` (or its adjoint) to a length-4 amplitude array.

    ``J`` rotates within the ``(|00>, |11>)`` and ``(|01>, |10>)`` planes:
    ``J|00> = c|00> + i s|11>`` and ``J|01> = c|01> - i s|10>`` with
    ``c = cos(gamma/2)``, ``s = sin(gamma/2)``.
    """
    v = np.asarray(state, dtype=complex)
    c, s = math.cos(0.5 * gamma), math.sin(0.5 * gamma)
    if adjoint:
        s = -s
    return np.array(
        [
            c * v[0] + 1j * s * v[3],
            c * v[1] - 1j * s * v[2],
            c * v[2] - 1j * s * v[1],
            c * v[3] + 1j * s * v[0],
        ],
        dtype=complex,
    )


def entangled_initial_state(gamma: float) -> StateVector4:
    """``J_gamma |00> = cos(gamma/2)|00> + i sin(gamma/2)|11>``."""
    gamma = check_gamma(gamma)
    return StateVector4.from_array(apply_entangler([1, 0, 0, 0], gamma))


def correlated_state(gamma: float, alpha: QuantumStrategy, beta: QuantumStrategy) -> StateVector4:
    """Final state ``J^dag (U_alpha (x) U_beta) J |00>``."""
    gamma = check_gamma(gamma)
    local = np.kron(strategy_unitary(alpha), strategy_unitary(beta))
    psi = apply_entangler(local @ entangled_initial_state(gamma).as_array(), gamma, adjoint=True)
    return StateVector4.from_array(psi)


def expected_payoff(state: StateVector4, A: GameMatrix2) -> float:
    """Player 1's payoff ``sum_ij A_ij |psi_ij|^2`` for a given state."""
    return float(np.sum(A.as_array() * state.probabilities()))


def quantum_payoff(gamma: float, alpha: QuantumStrategy, beta: QuantumStrategy,
                   A: GameMatrix2) -> float:
    """Exact payoff of player 1 (strategy ``alpha``) against ``beta``."""
    return expected_payoff(correlated_state(gamma, alpha, beta), A)


def quantum_payoff_player2(gamma: float, alpha: QuantumStrategy, beta: QuantumStrategy,
                           A: GameMatrix2) -> float:
    """Exact payoff of player 2, ``sum_ij A_ji |psi_ij|^2``."""
    return expected_payoff(correlated_state(gamma, alpha, beta), A.T)


def _pair_angles(phases: PhaseProfile) -> np.ndarray:
    xi0, xi1, u0, u1 = phases.as_tuple()
    return np.array([[xi0 + u0, u1 - xi0], [u0 - xi1, xi1 + u1]])


@dataclass(frozen=True)
class EffectiveMatrixDecomposition:
    """Quantum payoff split into ``A + exchange`` and a correlation term.

    The correlation contribution to the payoff is
    ``correlation_coefficient * sqrt(x0 x1 y0 y1)``.
    """

    base: GameMatrix2
    exchange: GameMatrix2
    correlation_coefficient: float
    gamma: float
    phases: PhaseProfile = field(default=TRIVIAL)

    @property
    def matrix(self) -> GameMatrix2:
        """The density-independent part ``A + B_exc``."""
        return self.base + self.exchange


def effective_decomposition(gamma: float, phases: PhaseProfile,
                            A: GameMatrix2) -> EffectiveMatrixDecomposition:
    gamma = check_gamma(gamma)
    a = A.as_array()
    flipped = a[::-1, ::-1]  # flipped[i, j] = A[1-i, 1-j]
    theta = _pair_angles(phases)
    sin_g = math.sin(gamma)
    exchange = -(sin_g ** 2) * np.sin(theta) ** 2 * (a - flipped)
    sign = np.array([[-1.0, -1.0], [1.0, 1.0]])
    corr = 2.0 * sin_g * float(np.sum(sign * np.sin(theta[::-1, ::-1]) * np.cos(theta) * a))
    return EffectiveMatrixDecomposition(
        base=A,
        exchange=GameMatrix2.from_array(exchange),
        correlation_coefficient=corr,
        gamma=gamma,
        phases=phases,
    )


def effective_matrix(gamma: float, phases: PhaseProfile, A: GameMatrix2) -> GameMatrix2:
    """Density-independent effective game matrix ``A + B_exc``."""
    return effective_decomposition(gamma, phases, A).matrix


def payoff_from_decomposition(decomp: EffectiveMatrixDecomposition, x: StrategyDensity,
                              y: StrategyDensity) -> float:
    """Reassemble the payoff; finite on the whole simplex."""
    root = math.sqrt(x.x0 * x.x1 * y.x0 * y.x1)
    return classical_payoff(x, y, decomp.matrix) + decomp.correlation_coefficient * root


def pseudoclassical_matrix(gamma: float, A: GameMatrix2) -> GameMatrix2:
    """``cos^2(gamma) A + sin^2(gamma) A^T``."""
    gamma = check_gamma(gamma)
    c2, s2 = math.cos(gamma) ** 2, math.sin(gamma) ** 2
    return GameMatrix2.from_array(c2 * A.as_array() + s2 * A.T.as_array())


def case3_matrix(gamma: float, A: GameMatrix2) -> GameMatrix2:
    """Mix each entry with its doubly-flipped partner: ``B_ij = c^2 A_ij + s^2 A_{~i~j}``.

    Realized by the symmetric phase profile ``(pi/4, 3pi/4)``.
    """
    gamma = check_gamma(gamma)
    c2, s2 = math.cos(gamma) ** 2, math.sin(gamma) ** 2
    a = A.as_array()
    return GameMatrix2.from_array(c2 * a + s2 * a[::-1, ::-1])


def case4_matrix(gamma: float, A: GameMatrix2) -> GameMatrix2:
    """Mix the diagonal entries only; off-diagonal entries stay put.

    Realized by the symmetric phase profile ``(pi/4, pi/4)``.
    """
    gamma = check_gamma(gamma)
    c2, s2 = math.cos(gamma) ** 2, math.sin(gamma) ** 2
    return GameMatrix2(
        c2 * A.a00 + s2 * A.a11,
        A.a01,
        A.a10,
        c2 * A.a11 + s2 * A.a00,
    )


class PhaseClass(enum.Enum):
    TRIVIAL = "Trivial"
    PSEUDOCLASSICAL = "Pseudoclassical"
    SEPARABLE_CASE3 = "SeparableCase3"
    SEPARABLE_CASE4 = "SeparableCase4"
    GENERIC = "Generic"


_CLASS_TARGETS = (
    (PhaseClass.TRIVIAL, ((0.0, 0.0), (HALF_PI, HALF_PI))),
    (PhaseClass.PSEUDOCLASSICAL, ((0.0, HALF_PI), (HALF_PI, 0.0))),
    (PhaseClass.SEPARABLE_CASE3, ((QUARTER_PI, QUARTER_PI), (3 * QUARTER_PI, 3 * QUARTER_PI))),
    (PhaseClass.SEPARABLE_CASE4, ((QUARTER_PI, 3 * QUARTER_PI), (3 * QUARTER_PI, QUARTER_PI))),
)


def _same_mod_pi(a: float, b: float, tol: float) -> bool:
    d = math.remainder(a - b, math.pi)
    return abs(d) <= tol


def classify_phase_profile(phases: PhaseProfile, tol: float = PHASE_MATCH_TOL) -> PhaseClass:
    """Name the special subset a phase profile belongs to (angles modulo pi).

    Profiles whose two players carry different phases are always ``GENERIC``.
    """
    if abs(phases.xi0 - phases.upsilon0) > tol or abs(phases.xi1 - phases.upsilon1) > tol:
        return PhaseClass.GENERIC
    for tag, targets in _CLASS_TARGETS:
        for t0, t1 in targets:
            if _same_mod_pi(phases.xi0, t0, tol) and _same_mod_pi(phases.xi1, t1, tol):
                return tag
    return PhaseClass.GENERIC


def _weights(t):
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, np.sqrt(np.where(inside, t * (1.0 - t), 0.0)), 0.0)


class DensityPayoff:
    """Payoff ``Pi(t, s)`` of weight ``t`` against opponent weight ``s``.

    ``Pi(t, s) = x.M.y + corr * sqrt(t(1-t)) * sqrt(s(1-s))`` with
    ``x = (1-t, t)`` and ``y = (1-s, s)``.  Every payoff surface in this
    package (classical, pseudoclassical, the separable cases and the general
    phase-fixed quantum payoff) has this form.  ``base`` is the classical
    matrix used for :meth:`classical_diagonal`.

    Instances are immutable and evaluate vectorized over numpy arrays.
    """

    def __init__(self, matrix: GameMatrix2, corr: float = 0.0, base: GameMatrix2 | None = None,
                 label: str = ""):
        self.matrix = matrix
        self.corr = float(corr)
        self.base = matrix if base is None else base
        self.label = label
        self._m = matrix.as_array()

    def __repr__(self):
        return f"DensityPayoff({self.matrix!r}, corr={self.corr!r}, label={self.label!r})"

    @classmethod
    def classical(cls, A: GameMatrix2) -> DensityPayoff:
        return cls(A, 0.0, A, label="classical")

    @classmethod
    def pseudoclassical(cls, gamma: float, A: GameMatrix2) -> DensityPayoff:
        return cls(pseudoclassical_matrix(gamma, A), 0.0, A, label="pseudoclassical")

    @classmethod
    def quantum(cls, gamma: float, phases: PhaseProfile, A: GameMatrix2) -> DensityPayoff:
        d = effective_decomposition(gamma, phases, A)
        return cls(d.matrix, d.correlation_coefficient, A, label="quantum")

    def __call__(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        m = self._m
        row0 = (1.0 - s) * m[0, 0] + s * m[0, 1]
        row1 = (1.0 - s) * m[1, 0] + s * m[1, 1]
        out = (1.0 - t) * row0 + t * row1
        if self.corr:
            out = out + self.corr * _weights(t) * _weights(s)
        return out if out.ndim else float(out)

    def indifference(self, s):
        """``d Pi(t, s)/dt`` evaluated at ``t = s`` (finite on [0, 1])."""
        s = np.asarray(s, dtype=float)
        m = self._m
        out = (1.0 - s) * (m[1, 0] - m[0, 0]) + s * (m[1, 1] - m[0, 1])
        if self.corr:
            out = out + 0.5 * self.corr * (1.0 - 2.0 * s)
        return out if out.ndim else float(out)

    def grid_max(self, t_grid, s_grid):
        m = self.matrix
        return kernels.density_grid_max((m.a00, m.a01, m.a10, m.a11), self.corr, t_grid, s_grid)

    def classical_diagonal(self, t):
        return DensityPayoff.classical(self.base)(t, t)


class StateVectorPayoff:
    """The same surface as :class:`DensityPayoff` computed from the state vector.

    Used as an independent route for cross-checks; slower but free of any
    algebraic reduction.
    """

    def __init__(self, gamma: float, phases: PhaseProfile, A: GameMatrix2, player: int = 1):
        self.gamma = check_gamma(gamma)
        self.phases = phases
        self.base = A
        self.player = player

    def __call__(self, t, s):
        m = self.base
        p1, p2 = kernels.statevector_payoffs(
            self.gamma, self.phases.as_tuple(), (m.a00, m.a01, m.a10, m.a11), t, s
        )
        out = p1 if self.player == 1 else p2
        return out if out.ndim else float(out)

    def classical_diagonal(self, t):
        return DensityPayoff.classical(self.base)(t, t)
