"""Density-only analysis of symmetric 2x2 games in the entangled quantum scheme.

The phases of each player's strategy are held fixed and only the amplitude
densities are optimized.  ``quantum_engine`` holds the payoff model,
``equilibrium`` the solvers, ``scenarios`` the Prisoner's-dilemma closed
forms and sweeps, and ``cli`` the command-line front end.
"""
from .equilibrium import (
    EquilibriumKind,
    EquilibriumPoint,
    EquilibriumReport,
    SolverSettings,
    brute_force_nash,
    symmetric_nash,
)
from .game_core import GameMatrix2, PrisonersDilemmaParams, StrategyDensity, ValidationError
from .kernels import BACKEND
from .quantum_engine import (
    CASE3,
    CASE4,
    PSEUDOCLASSICAL,
    TRIVIAL,
    DensityPayoff,
    PhaseProfile,
    QuantumStrategy,
    effective_decomposition,
    effective_matrix,
    quantum_payoff,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CASE3", "CASE4", "PSEUDOCLASSICAL", "TRIVIAL",
    "DensityPayoff", "EquilibriumKind", "EquilibriumPoint", "EquilibriumReport",
    "GameMatrix2", "PhaseProfile", "PrisonersDilemmaParams", "QuantumStrategy",
    "SolverSettings", "StrategyDensity", "ValidationError",
    "brute_force_nash", "effective_decomposition", "effective_matrix",
    "quantum_payoff", "symmetric_nash",
]
