"""Prisoner's-dilemma closed forms and parameter sweeps.

For the pseudoclassical profile the game reduces to the classical game with
matrix ``cos^2(g) A + sin^2(g) A^T``.  With ``A = [[b, 0], [c, a]]`` the
slope of a player's payoff at the symmetric point ``(s, s)`` is::

    D(s) = (c cos^2 g - b) + s (a + b - c)

so the interior candidate is ``t = (b - c cos^2 g) / (a + b - c)``, the
end point 0 is an equilibrium when ``D(0) <= 0`` and the end point 1 when
``D(1) = a - c sin^2 g >= 0``.  At the interior candidate the common payoff
equals ``(ab - (c^2/4) sin^2(2g)) / (a + b - c)``.  Writing the candidate
with ``sin^2`` in place of ``cos^2`` breaks the ``g = 0`` limit, where the
classical equilibrium is pure defection; :func:`pd_interior_weight_sin2`
keeps that variant for comparison.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .equilibrium import (
    EquilibriumKind,
    EquilibriumPoint,
    EquilibriumReport,
    SolverSettings,
    stationary_point,
    symmetric_nash,
)
from .game_core import GameMatrix2, PrisonersDilemmaParams, ValidationError
from .quantum_engine import (
    HALF_PI,
    PSEUDOCLASSICAL,
    DensityPayoff,
    PhaseProfile,
    StateVectorPayoff,
    case3_matrix,
    check_gamma,
    pseudoclassical_matrix,
)

BOUNDARY_SNAP = 1e-12


class ClosedFormMismatch(RuntimeError):
    """The closed-form equilibria disagree with the numerical solver."""


def _select(payoff, settings):
    """Weight recorded by the sweeps and the number of equilibria found."""
    report = symmetric_nash(payoff, settings)
    if report.equilibria:
        return report.dominant().t_star, len(report.equilibria)
    return stationary_point(payoff, settings), 0


class Branch(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY_LOW = "BoundaryLow"
    BOUNDARY_HIGH = "BoundaryHigh"


@dataclass(frozen=True)
class GammaSweepRecord:
    gamma: float
    t_star: float
    payoff_classical_at_eq: float
    payoff_quantum_at_eq: float
    branch: Branch
    equilibrium_count: int


@dataclass(frozen=True)
class PhaseSweepRecord:
    """One point of a phase sweep.

    ``equilibrium_count`` is 0 when the payoff has no symmetric equilibrium;
    ``t_star`` then holds the first-order point from
    :func:`~ewlgame.equilibrium.stationary_point`.
    """

    xi0: float
    xi1: float
    gamma: float
    t_star: float
    payoff_classical: float
    payoff_quantum: float
    equilibrium_count: int = 1


class PayoffFormula(NamedTuple):
    value: float
    interior_active: bool


@dataclass(frozen=True)
class Case3Comparison:
    gamma: float
    case3_t: float
    case3_payoff: float
    substituted_t: float
    substituted_payoff: float
    difference: float
    holds: bool


def _as_matrix(game) -> GameMatrix2:
    if isinstance(game, PrisonersDilemmaParams):
        return game.matrix()
    if isinstance(game, GameMatrix2):
        return game
    raise ValidationError(f"expected PrisonersDilemmaParams or GameMatrix2, got {type(game).__name__}")


def branch_of(t: float) -> Branch:
    if t <= 0.0:
        return Branch.BOUNDARY_LOW
    if t >= 1.0:
        return Branch.BOUNDARY_HIGH
    return Branch.INTERIOR


def pd_classical_equilibrium(p: PrisonersDilemmaParams) -> EquilibriumPoint:
    """Classical PD: defection dominates, ``t* = 1`` with payoff ``a``."""
    if not isinstance(p, PrisonersDilemmaParams):
        raise ValidationError("pd_classical_equilibrium needs PrisonersDilemmaParams")
    return EquilibriumPoint(
        t_star=1.0,
        payoff_classical=p.a,
        payoff_quantum=p.a,
        kind=EquilibriumKind.PURE_BOUNDARY,
        pareto_efficient=False,
        pareto_dominant=True,
    )


def pd_interior_weight(p: PrisonersDilemmaParams, gamma: float) -> float:
    """Interior candidate ``(b - c cos^2 g) / (a + b - c)`` (may fall outside [0, 1])."""
    gamma = check_gamma(gamma)
    return (p.b - p.c * math.cos(gamma) ** 2) / (p.a + p.b - p.c)


def pd_interior_weight_sin2(p: PrisonersDilemmaParams, gamma: float) -> float:
    """The ``sin^2`` variant ``(b - c sin^2 g) / (a + b - c)``; wrong at ``g = 0``."""
    gamma = check_gamma(gamma)
    return (p.b - p.c * math.sin(gamma) ** 2) / (p.a + p.b - p.c)


def pd_payoff_formula(p: PrisonersDilemmaParams, gamma: float) -> PayoffFormula:
    """``(ab - (c^2/4) sin^2 2g) / (a + b - c)`` and whether it applies.

    The formula is the equilibrium payoff only when ``a + b < c`` and the
    interior candidate lies in ``[0, 1]``.
    """
    gamma = check_gamma(gamma)
    value = (p.a * p.b - 0.25 * p.c ** 2 * math.sin(2.0 * gamma) ** 2) / (p.a + p.b - p.c)
    t = pd_interior_weight(p, gamma)
    active = p.a + p.b < p.c and -BOUNDARY_SNAP <= t <= 1.0 + BOUNDARY_SNAP
    return PayoffFormula(value, active)


def pd_pareto(p: PrisonersDilemmaParams) -> tuple[float, float]:
    """Maximizer of the common payoff ``b(1-t)^2 + c t(1-t) + a t^2``."""
    d = p.a + p.b - p.c
    if d < 0:
        t = min(max((2.0 * p.b - p.c) / (2.0 * d), 0.0), 1.0)
    else:
        t = 0.0
    return t, p.b * (1 - t) ** 2 + p.c * t * (1 - t) + p.a * t * t


def pd_pseudoclassical_equilibrium(p: PrisonersDilemmaParams, gamma: float,
                                   settings: SolverSettings | None = None,
                                   crosscheck: bool = True) -> EquilibriumReport:
    """All symmetric equilibria of the pseudoclassical PD from the closed form.

    With ``crosscheck`` the result is compared against :func:`symmetric_nash`
    and :class:`ClosedFormMismatch` is raised on disagreement beyond 1e-6.
    """
    settings = settings or SolverSettings()
    gamma = check_gamma(gamma)
    a, b, c = p.a, p.b, p.c
    cos2, sin2 = math.cos(gamma) ** 2, math.sin(gamma) ** 2
    d = a + b - c
    slope0 = c * cos2 - b
    slope1 = a - c * sin2
    snap = BOUNDARY_SNAP * c
    points: list[tuple[float, tuple | None]] = []
    if d == 0.0 and abs(slope0) <= snap:
        points.append((0.0, (0.0, 1.0)))
    else:
        if slope0 <= snap:
            points.append((0.0, None))
        if d != 0.0:
            t = -slope0 / d
            if BOUNDARY_SNAP < t < 1.0 - BOUNDARY_SNAP:
                points.append((t, None))
        if slope1 >= -snap:
            points.append((1.0, None))

    A = p.matrix()
    game = DensityPayoff.pseudoclassical(gamma, A)
    t_par, v_par = pd_pareto(p)
    rows = []
    for t, seg in points:
        if seg is not None:
            kind = EquilibriumKind.INDIFFERENCE_CONTINUUM
        elif t in (0.0, 1.0):
            kind = EquilibriumKind.PURE_BOUNDARY
        else:
            kind = EquilibriumKind.MIXED_INTERIOR
        rows.append(dict(
            t_star=t,
            payoff_classical=float(game.classical_diagonal(t)),
            payoff_quantum=float(game(t, t)),
            kind=kind,
            pareto_efficient=abs(t - t_par) <= settings.coincidence_tol,
            segment=seg,
        ))
    top = max(r["payoff_quantum"] for r in rows)
    for r in rows:
        r["pareto_dominant"] = r["payoff_quantum"] >= top - 1e-12 * max(1.0, abs(top))
    report = EquilibriumReport(
        equilibria=tuple(EquilibriumPoint(**r) for r in rows),
        pareto_t=t_par,
        pareto_payoff=v_par,
        settings=settings,
    )
    if crosscheck:
        numeric = symmetric_nash(game, settings)
        if not reports_agree(report, numeric, 1e-6):
            raise ClosedFormMismatch(
                f"closed form {report.t_stars} vs solver {numeric.t_stars} at gamma={gamma}"
            )
    return report


def reports_agree(r1: EquilibriumReport, r2: EquilibriumReport, tol: float) -> bool:
    """Same number of equilibria with matching weights and payoffs."""
    if len(r1.equilibria) != len(r2.equilibria):
        return False
    for e1, e2 in zip(r1.equilibria, r2.equilibria):
        if abs(e1.t_star - e2.t_star) > tol or abs(e1.payoff_quantum - e2.payoff_quantum) > tol:
            return False
    return True


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def gamma_grid(n_points: int) -> np.ndarray:
    if n_points < 2:
        raise ValidationError("a gamma sweep needs at least 2 points")
    return np.linspace(0.0, HALF_PI, n_points)


def gamma_sweep(game, phases: PhaseProfile = PSEUDOCLASSICAL, n_points: int = 101,
                settings: SolverSettings | None = None, workers: int = 1,
                gammas=None) -> list[GammaSweepRecord]:
    """Equilibrium along a uniform grid of ``gamma`` on ``[0, pi/2]``.

    Each record carries the Pareto-dominant equilibrium (smallest weight on
    ties) and the number of coexisting equilibria.  When no symmetric
    equilibrium exists the count is 0 and the first-order point is recorded.
    ``gammas`` overrides the uniform grid.
    """
    settings = settings or SolverSettings()
    A = _as_matrix(game)
    grid = gamma_grid(n_points) if gammas is None else np.asarray(gammas, dtype=float)

    def solve(gamma):
        payoff = DensityPayoff.quantum(gamma, phases, A)
        t, count = _select(payoff, settings)
        exact = StateVectorPayoff(gamma, phases, A)
        return GammaSweepRecord(
            gamma=float(gamma),
            t_star=t,
            payoff_classical_at_eq=float(payoff.classical_diagonal(t)),
            payoff_quantum_at_eq=float(exact(t, t)),
            branch=branch_of(t),
            equilibrium_count=count,
        )

    return _map(solve, list(grid), workers)


def phase_sweep(game, gamma_grid, xi0_grid, xi1_grid,
                settings: SolverSettings | None = None,
                workers: int = 1) -> list[PhaseSweepRecord]:
    """Equilibria over a grid of identical phase profiles ``(xi0, xi1)``.

    Only the densities are optimized; phases are fixed for each record.
    Records are ordered by ``(xi0 index, xi1 index, gamma index)``.
    """
    settings = settings or SolverSettings()
    A = _as_matrix(game)
    if not (len(gamma_grid) and len(xi0_grid) and len(xi1_grid)):
        raise ValidationError("phase sweep grids must be non-empty")
    points = [(float(x0), float(x1), float(g))
              for x0 in xi0_grid for x1 in xi1_grid for g in gamma_grid]

    def solve(point):
        xi0, xi1, gamma = point
        phases = PhaseProfile(xi0, xi1)
        payoff = DensityPayoff.quantum(gamma, phases, A)
        t, count = _select(payoff, settings)
        exact = StateVectorPayoff(gamma, phases, A)
        return PhaseSweepRecord(
            xi0=xi0,
            xi1=xi1,
            gamma=check_gamma(gamma),
            t_star=t,
            payoff_classical=float(payoff.classical_diagonal(t)),
            payoff_quantum=float(exact(t, t)),
            equilibrium_count=count,
        )

    return _map(solve, points, workers)


def case3_average_check(p: PrisonersDilemmaParams, gamma: float, tol: float = 1e-9,
                        settings: SolverSettings | None = None) -> Case3Comparison:
    """Compare the doubly-exchanged game with the averaged pseudoclassical PD.

    The first game uses :func:`case3_matrix`; the second replaces ``a`` and
    ``b`` by ``(a + b)/2`` and applies the pseudoclassical mixture.  The
    Pareto-dominant equilibrium payoff of each is reported; ``holds`` records
    whether they agree to ``tol``.
    """
    settings = settings or SolverSettings()
    gamma = check_gamma(gamma)
    A = p.matrix()
    m = 0.5 * (p.a + p.b)
    averaged = GameMatrix2(m, 0.0, p.c, m)
    first = symmetric_nash(DensityPayoff(case3_matrix(gamma, A), base=A), settings).dominant()
    second = symmetric_nash(
        DensityPayoff(pseudoclassical_matrix(gamma, averaged), base=averaged), settings
    ).dominant()
    diff = first.payoff_quantum - second.payoff_quantum
    return Case3Comparison(
        gamma=gamma,
        case3_t=first.t_star,
        case3_payoff=first.payoff_quantum,
        substituted_t=second.t_star,
        substituted_payoff=second.payoff_quantum,
        difference=diff,
        holds=abs(diff) <= tol,
    )
