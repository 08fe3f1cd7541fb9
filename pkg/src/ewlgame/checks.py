"""Self-checks run by ``ewlgame verify``.

Each check draws random configurations from a seeded generator, computes a
residual between two independent routes and compares it to a fixed
tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .equilibrium import SolverSettings, brute_force_nash, symmetric_nash
from .game_core import GameMatrix2, PrisonersDilemmaParams, StrategyDensity, classical_payoff
from .quantum_engine import (
    CASE3,
    CASE4,
    HALF_PI,
    PSEUDOCLASSICAL,
    QUARTER_PI,
    TRIVIAL,
    DensityPayoff,
    PhaseProfile,
    QuantumStrategy,
    effective_decomposition,
    payoff_from_decomposition,
    quantum_payoff,
)
from .scenarios import pd_pseudoclassical_equilibrium

NAMED_PROFILES = (
    TRIVIAL,
    PhaseProfile(HALF_PI, HALF_PI),
    PSEUDOCLASSICAL,
    PhaseProfile(HALF_PI, 0.0),
    CASE3,
    PhaseProfile(3 * QUARTER_PI, 3 * QUARTER_PI),
    CASE4,
    PhaseProfile(3 * QUARTER_PI, QUARTER_PI),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float
    samples: int

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


def _matrix(rng) -> GameMatrix2:
    return GameMatrix2.from_array(rng.uniform(-5.0, 5.0, size=(2, 2)))


def _density(rng, interior=False) -> StrategyDensity:
    t = rng.uniform(1e-3, 1 - 1e-3) if interior else rng.uniform()
    return StrategyDensity.from_weight(t)


def _phases(rng) -> PhaseProfile:
    return PhaseProfile(*rng.uniform(0.0, 2 * math.pi, size=4))


def check_classical_limit(rng, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        A, ph = _matrix(rng), _phases(rng)
        x, y = _density(rng), _density(rng)
        q = quantum_payoff(0.0, QuantumStrategy(x, ph.xi0, ph.xi1),
                           QuantumStrategy(y, ph.upsilon0, ph.upsilon1), A)
        worst = max(worst, abs(q - classical_payoff(x, y, A)))
    return CheckResult("classical_limit", worst, 1e-12, n)


def check_decomposition(rng, n: int, corrupt: bool = False) -> CheckResult:
    """State vector against the matrix + correlation reassembly.

    ``corrupt`` flips the sign of the correlation coefficient (fault
    injection for testing the check itself).
    """
    worst = 0.0
    for _ in range(n):
        A, ph = _matrix(rng), _phases(rng)
        gamma = rng.uniform(0.0, HALF_PI)
        x, y = _density(rng, True), _density(rng, True)
        d = effective_decomposition(gamma, ph, A)
        if corrupt:
            d = replace(d, correlation_coefficient=-d.correlation_coefficient)
        q = quantum_payoff(gamma, QuantumStrategy(x, ph.xi0, ph.xi1),
                           QuantumStrategy(y, ph.upsilon0, ph.upsilon1), A)
        worst = max(worst, abs(payoff_from_decomposition(d, x, y) - q))
    return CheckResult("decomposition_equivalence", worst, 1e-10, n)


def check_pseudoclassical(rng, n: int) -> list[CheckResult]:
    mix = diag = adj = 0.0
    for _ in range(n):
        A = _matrix(rng)
        gamma = rng.uniform(0.0, HALF_PI)
        x, y = _density(rng), _density(rng)
        c2, s2 = math.cos(gamma) ** 2, math.sin(gamma) ** 2

        def q(u, v, g=gamma):
            return quantum_payoff(g, QuantumStrategy(u, 0.0, HALF_PI),
                                  QuantumStrategy(v, 0.0, HALF_PI), A)

        mix = max(mix, abs(q(x, y) - (c2 * classical_payoff(x, y, A) + s2 * classical_payoff(y, x, A))))
        diag = max(diag, abs(q(x, x) - classical_payoff(x, x, A)))
        adj = max(adj, abs(q(x, y, QUARTER_PI) - q(y, x, QUARTER_PI)))
    return [
        CheckResult("pseudoclassical_mixture", mix, 1e-12, n),
        CheckResult("diagonal_identity", diag, 1e-12, n),
        CheckResult("self_adjoint_quarter_pi", adj, 1e-12, n),
    ]


def check_correlation_vanishing(rng, n: int) -> CheckResult:
    worst = 0.0
    for ph in NAMED_PROFILES:
        for _ in range(n):
            gamma = rng.uniform(0.0, HALF_PI)
            k = effective_decomposition(gamma, ph, _matrix(rng)).correlation_coefficient
            worst = max(worst, abs(k))
    return CheckResult("correlation_vanishing", worst, 1e-12, n * len(NAMED_PROFILES))


def check_pd_closed_forms(n_gamma: int = 11, settings: SolverSettings | None = None) -> list[CheckResult]:
    """Closed-form PD equilibria against the solver and the lattice oracle."""
    settings = settings or SolverSettings()
    solver_gap = oracle_gap = 0.0
    count = 0
    for abc in ((1.0, 2.0, 4.0), (1.0, 2.0, 5.0), (2.0, 3.0, 4.0)):
        p = PrisonersDilemmaParams(*abc)
        A = p.matrix()
        for gamma in np.linspace(0.0, HALF_PI, n_gamma):
            report = pd_pseudoclassical_equilibrium(p, gamma, settings, crosscheck=False)
            numeric = symmetric_nash(DensityPayoff.pseudoclassical(gamma, A), settings)
            if len(numeric.equilibria) != len(report.equilibria):
                solver_gap = math.inf
            else:
                for e1, e2 in zip(report.equilibria, numeric.equilibria):
                    solver_gap = max(solver_gap, abs(e1.t_star - e2.t_star),
                                     abs(e1.payoff_quantum - e2.payoff_quantum))
            oracle = brute_force_nash(DensityPayoff.pseudoclassical(gamma, A), settings.oracle_grid)
            for e in report.equilibria:
                if oracle.representatives:
                    gap = min(abs(e.t_star - r) for r in oracle.representatives)
                else:
                    gap = math.inf
                oracle_gap = max(oracle_gap, gap)
            count += 1
    return [
        CheckResult("pd_closed_form_vs_solver", solver_gap, 1e-6, count),
        CheckResult("pd_closed_form_vs_oracle", oracle_gap, 2e-3, count),
    ]


def run_all(seed: int = 0, samples: int = 1000, inject_fault: bool = False,
            settings: SolverSettings | None = None) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = [check_classical_limit(rng, samples),
               check_decomposition(rng, samples, corrupt=inject_fault)]
    results += check_pseudoclassical(rng, samples)
    results.append(check_correlation_vanishing(rng, max(1, samples // 10)))
    results += check_pd_closed_forms(settings=settings)
    return results
