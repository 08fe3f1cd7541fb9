"""Symmetric equilibria and the Pareto optimum over the density simplex.

A payoff function is any callable ``payoff(t, s)`` broadcasting over numpy
arrays: the payoff of a player with weight ``t`` on strategy 1 against an
opponent with weight ``s``.  Two optional attributes are used when present:

``grid_max(t_grid, s_grid)``
    fast row maxima (see :meth:`ewlgame.quantum_engine.DensityPayoff.grid_max`);
``indifference(s)``
    the slope ``d payoff(t, s) / dt`` at ``t = s``;
``classical_diagonal(t)``
    the classical common payoff reported next to the game's own payoff.

Equilibria are defined by the absence of a profitable unilateral deviation,
which also covers boundary equilibria where the slope does not vanish.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
FD_STEP = 1e-6
_BLOCK = 256


class SolverError(RuntimeError):
    """Raised when a payoff evaluation is not finite."""


@dataclass(frozen=True)
class SolverSettings:
    grid_n: int = 2001
    tol: float = 1e-9
    merge_tol: float = 1e-6
    gain_tol: float = 1e-7
    oracle_grid: int = 1001
    coincidence_tol: float = 1e-6

    def __post_init__(self):
        if self.grid_n < 3 or self.oracle_grid < 3:
            raise ValueError("grid sizes must be at least 3")
        for name in ("tol", "merge_tol", "gain_tol", "coincidence_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


class EquilibriumKind(enum.Enum):
    PURE_BOUNDARY = "PureBoundary"
    MIXED_INTERIOR = "MixedInterior"
    INDIFFERENCE_CONTINUUM = "IndifferenceContinuum"


@dataclass(frozen=True)
class EquilibriumPoint:
    """A symmetric equilibrium ``(t_star, t_star)``.

    ``pareto_efficient`` marks coincidence with the Pareto optimum of the
    classical common payoff; ``pareto_dominant`` marks the best equilibrium
    (highest payoff) when several coexist.  For a continuum of equilibria
    ``segment`` holds its end points and ``t_star`` is the lower one.
    """

    t_star: float
    payoff_classical: float
    payoff_quantum: float
    kind: EquilibriumKind
    pareto_efficient: bool = False
    pareto_dominant: bool = False
    gain: float = 0.0
    segment: tuple[float, float] | None = None


@dataclass(frozen=True)
class EquilibriumReport:
    equilibria: tuple[EquilibriumPoint, ...]
    pareto_t: float
    pareto_payoff: float
    settings: SolverSettings = field(default_factory=SolverSettings)
    empty_flagged: bool = False

    @property
    def t_stars(self) -> tuple[float, ...]:
        return tuple(e.t_star for e in self.equilibria)

    def dominant(self) -> EquilibriumPoint:
        """The first Pareto-dominant equilibrium (smallest ``t_star``)."""
        for e in self.equilibria:
            if e.pareto_dominant:
                return e
        raise LookupError("report has no equilibria")


@dataclass(frozen=True)
class BestResponse:
    """Maximizers of ``payoff(., s)``; ``whole_interval`` marks indifference."""

    points: tuple[float, ...]
    value: float
    whole_interval: bool = False

    def __contains__(self, t) -> bool:
        return self.whole_interval or any(p == t for p in self.points)

    def contains(self, t: float, tol: float) -> bool:
        return self.whole_interval or any(abs(p - t) <= tol for p in self.points)


# ---------------------------------------------------------------------------
# one-dimensional maximization


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Maximizer of a unimodal ``f`` on ``[lo, hi]`` to within ``tol``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _checked(values):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise SolverError("payoff evaluation returned a non-finite value")
    return arr


def _maximizers(f, grid: np.ndarray, tol: float):
    """All global maximizers of scalar ``f`` found by scan + golden section.

    Returns ``(points, best_value, values_on_grid)`` with ``points`` sorted.
    """
    vals = _checked(f(grid))
    n = grid.shape[0]
    vmax = float(vals.max())
    left = np.concatenate(([-np.inf], vals[:-1]))
    right = np.concatenate((vals[1:], [-np.inf]))
    peaks = np.flatnonzero((vals >= left) & (vals >= right))
    # plateaus: keep the first index of each run of adjacent peaks
    peaks = peaks[np.concatenate(([True], np.diff(peaks) > 1))]
    if peaks.size > 64:
        peaks = peaks[vals[peaks] >= vmax - tol]

    def scalar(t):
        return float(_checked(f(np.asarray(t))))

    found = []
    for k in peaks:
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, n - 1)]
        t = golden_section_max(scalar, lo, hi, tol)
        v = scalar(t)
        v_grid = float(vals[k])
        # refined point must beat the grid point by more than rounding noise
        if v > v_grid + 8.0 * np.finfo(float).eps * max(1.0, abs(v_grid)) and abs(t - grid[k]) > tol:
            found.append((t, v))
        else:
            found.append((float(grid[k]), v_grid))
    best = max(v for _, v in found)
    points = sorted(t for t, v in found if v >= best - tol)
    return points, best, vals


def _merge(points, tol):
    """Coalesce points closer than ``tol``; end points 0 and 1 win."""
    out = []
    for p in sorted(points):
        if not out or p - out[-1] > tol:
            out.append(p)
        elif p == 1.0:
            out[-1] = 1.0
    return out


def best_response(s: float, payoff, tol: float = 1e-9, grid_n: int = 2001) -> BestResponse:
    """Weights ``t`` maximizing ``payoff(t, s)`` to within ``tol``."""
    grid = np.linspace(0.0, 1.0, grid_n)

    def f(t):
        return payoff(t, s)

    vals = _checked(f(grid))
    if float(vals.max() - vals.min()) <= tol:
        return BestResponse((), float(vals.max()), whole_interval=True)
    points, best, _ = _maximizers(f, grid, tol)
    return BestResponse(tuple(_merge(points, 1e-6)), best)


def pareto_optimum(diag_payoff, settings: SolverSettings | None = None) -> tuple[float, float]:
    """Global maximizer of the common payoff ``diag_payoff(t)``.

    Ties resolve to the smallest ``t``.
    """
    settings = settings or SolverSettings()
    grid = np.linspace(0.0, 1.0, settings.grid_n)
    points, best, _ = _maximizers(diag_payoff, grid, settings.tol)
    return points[0], best


# ---------------------------------------------------------------------------
# symmetric Nash equilibria


def _row_max(payoff, t_grid, s_grid):
    grid_max = getattr(payoff, "grid_max", None)
    if grid_max is not None:
        vals, _ = grid_max(t_grid, s_grid)
        return _checked(vals)
    out = np.empty(s_grid.shape[0])
    for start in range(0, s_grid.shape[0], _BLOCK):
        s = s_grid[start:start + _BLOCK]
        block = _checked(payoff(t_grid[None, :], s[:, None]))
        out[start:start + _BLOCK] = block.max(axis=1)
    return out


def _indicator(payoff):
    ind = getattr(payoff, "indifference", None)
    if ind is not None:
        return ind

    def slope(s):
        s = np.asarray(s, dtype=float)
        lo = np.clip(s - FD_STEP, 0.0, 1.0)
        hi = np.clip(s + FD_STEP, 0.0, 1.0)
        return (payoff(hi, s) - payoff(lo, s)) / (hi - lo)

    return slope


def deviation_gain(payoff, s: float, tol: float = 1e-9, grid_n: int = 2001) -> float:
    """Largest improvement available by deviating from ``(s, s)``."""
    br = best_response(s, payoff, tol, grid_n)
    return max(0.0, br.value - float(payoff(s, s)))


def _bisect(g, lo, hi, g_lo):
    """Bracketed root of ``g``, bisected down to adjacent doubles."""
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return lo if abs(g_lo) <= abs(float(g(hi))) else hi
        g_mid = float(g(mid))
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid


def _runs(mask):
    """Start/stop index pairs of consecutive True runs."""
    runs, start = [], None
    for k, flag in enumerate(mask):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            runs.append((start, k - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def symmetric_nash(payoff, settings: SolverSettings | None = None,
                   diag_payoff=None) -> EquilibriumReport:
    """All symmetric equilibria ``(t, t)`` of ``payoff`` on ``[0, 1]``.

    Candidates come from the end points, from sign changes of the slope
    indicator on a grid (refined by bisection) and from grid points where the
    deviation gain nearly vanishes.  Every candidate is kept only if no
    deviation improves the payoff by more than ``gain_tol`` (scaled by the
    payoff magnitude).  ``diag_payoff`` defaults to the payoff's
    ``classical_diagonal`` and is used for the Pareto optimum.
    """
    settings = settings or SolverSettings()
    grid = np.linspace(0.0, 1.0, settings.grid_n)
    diag = _checked(payoff(grid, grid))
    row_max = _row_max(payoff, grid, grid)
    gains = np.maximum(row_max - diag, 0.0)
    scale = max(1.0, float(np.max(np.abs(row_max))), float(np.max(np.abs(diag))))
    gain_tol = settings.gain_tol * scale
    ind = _indicator(payoff)
    slope = _checked(ind(grid))

    def gain_at(s):
        return deviation_gain(payoff, s, settings.tol, settings.grid_n)

    accepted: dict[float, float] = {}
    segments = []

    # continua: long runs of zero gain on the grid
    for i, j in _runs(gains <= gain_tol):
        if j - i >= 2 and np.all(np.abs(slope[i:j + 1]) <= gain_tol):
            segments.append((float(grid[i]), float(grid[j])))

    candidates = [0.0, 1.0]
    candidates.extend(grid[:-1][slope[:-1] == 0.0].tolist())
    crossing = ((slope[:-1] > 0) != (slope[1:] > 0)) & (slope[:-1] != 0.0) & (slope[1:] != 0.0)
    for k in np.flatnonzero(crossing):
        candidates.append(_bisect(ind, float(grid[k]), float(grid[k + 1]), slope[k]))
    # touching points: strict local minima of |slope| with a small gain
    mid, prev, nxt = np.abs(slope[1:-1]), np.abs(slope[:-2]), np.abs(slope[2:])
    touching = ((mid <= prev) & (mid <= nxt) & ((mid < prev) | (mid < nxt))
                & (gains[1:-1] <= 1e-4 * scale))
    roots = list(candidates)
    for k in np.flatnonzero(touching) + 1:
        t = golden_section_max(
            lambda x: -abs(float(ind(x))), float(grid[k - 1]), float(grid[k + 1]), settings.tol
        )
        # a bisected root is more precise than a minimum of |slope|
        if all(abs(t - r) > settings.merge_tol for r in roots):
            candidates.append(t)

    for s in _merge(candidates, settings.tol):
        if any(lo - settings.merge_tol <= s <= hi + settings.merge_tol for lo, hi in segments):
            continue
        g = gain_at(s)
        if g <= gain_tol:
            accepted[s] = g

    points = []
    for s in _merge(sorted(accepted), settings.merge_tol):
        points.append((s, accepted[s], None))
    for lo, hi in segments:
        points.append((lo, 0.0, (lo, hi)))
    points.sort(key=lambda p: p[0])

    if diag_payoff is None:
        diag_payoff = getattr(payoff, "classical_diagonal", None) or (lambda t: payoff(t, t))
    t_par, v_par = pareto_optimum(diag_payoff, settings)

    equilibria = []
    for s, g, seg in points:
        if seg is not None:
            kind = EquilibriumKind.INDIFFERENCE_CONTINUUM
        elif s in (0.0, 1.0):
            kind = EquilibriumKind.PURE_BOUNDARY
        else:
            kind = EquilibriumKind.MIXED_INTERIOR
        if seg is None:
            efficient = abs(s - t_par) <= settings.coincidence_tol
        else:
            efficient = seg[0] - settings.coincidence_tol <= t_par <= seg[1] + settings.coincidence_tol
        equilibria.append(dict(
            t_star=s,
            payoff_classical=float(diag_payoff(s)),
            payoff_quantum=float(payoff(s, s)),
            kind=kind,
            pareto_efficient=efficient,
            gain=g,
            segment=seg,
        ))
    if equilibria:
        top = max(e["payoff_quantum"] for e in equilibria)
        for e in equilibria:
            e["pareto_dominant"] = e["payoff_quantum"] >= top - gain_tol
    return EquilibriumReport(
        equilibria=tuple(EquilibriumPoint(**e) for e in equilibria),
        pareto_t=t_par,
        pareto_payoff=v_par,
        settings=settings,
        empty_flagged=not equilibria,
    )


def stationary_point(payoff, settings: SolverSettings | None = None) -> float:
    """First-order symmetric point: a root of the slope indicator.

    Among several roots the one with the highest common payoff wins (smallest
    weight on ties).  Without a root the end point favoured by the sign of the
    slope is returned.  Unlike :func:`symmetric_nash` this does not check that
    the point is a best response; it is the fallback used by the sweeps when
    no symmetric equilibrium exists (payoffs that are convex in the own
    weight can have none).
    """
    settings = settings or SolverSettings()
    grid = np.linspace(0.0, 1.0, settings.grid_n)
    ind = _indicator(payoff)
    slope = _checked(ind(grid))
    roots = grid[slope == 0.0].tolist()
    crossing = ((slope[:-1] > 0) != (slope[1:] > 0)) & (slope[:-1] != 0.0) & (slope[1:] != 0.0)
    for k in np.flatnonzero(crossing):
        roots.append(_bisect(ind, float(grid[k]), float(grid[k + 1]), slope[k]))
    if not roots:
        return 1.0 if slope[0] > 0 else 0.0
    roots.sort()
    values = [float(payoff(r, r)) for r in roots]
    return roots[int(np.argmax(values))]


def check_pareto_nash_coincidence(report: EquilibriumReport, tol: float = 1e-6) -> bool:
    """True when some equilibrium sits at the Pareto optimum within ``tol``."""
    for e in report.equilibria:
        if e.segment is not None:
            if e.segment[0] - tol <= report.pareto_t <= e.segment[1] + tol:
                return True
        elif abs(e.t_star - report.pareto_t) <= tol:
            return True
    return False


# ---------------------------------------------------------------------------
# brute-force oracle


@dataclass(frozen=True)
class BruteForceResult:
    """Lattice points passing the deviation test.

    ``flagged`` holds every lattice weight ``s_j`` whose deviation gain is
    within ``eps``; ``representatives`` collapses them to the local minima
    of the gain, and ``continua`` lists flat runs of such minima.
    """

    grid: np.ndarray
    gains: np.ndarray
    eps: float
    flagged: np.ndarray
    representatives: tuple[float, ...]
    continua: tuple[tuple[float, float], ...]


def brute_force_nash(payoff, grid_n: int = 1001) -> BruteForceResult:
    """Exhaustive lattice search for symmetric equilibria.

    Evaluates ``payoff`` on the full ``grid_n x grid_n`` lattice with no
    refinement.  A weight ``s_j`` is flagged when
    ``payoff(s_j, s_j) >= max_i payoff(t_i, s_j) - eps`` with
    ``eps = 2 * range / grid_n``; on a lattice the gain next to an interior
    equilibrium grows linearly with the spacing, so the tolerance is first
    order in it.
    """
    if grid_n < 101:
        raise ValueError("brute_force_nash needs grid_n >= 101")
    grid = np.linspace(0.0, 1.0, grid_n)
    table = np.asarray(payoff(grid[:, None], grid[None, :]), dtype=float)
    row_best = table.max(axis=0)
    diag = np.diagonal(table)
    gains = row_best - diag
    spread = float(table.max() - table.min())
    eps = 2.0 * spread / grid_n
    flagged_mask = gains <= eps
    left = np.concatenate(([np.inf], gains[:-1]))
    right = np.concatenate((gains[1:], [np.inf]))
    minima = flagged_mask & (gains <= left) & (gains <= right)
    reps, continua = [], []
    for i, j in _runs(minima):
        if j - i >= 2:
            continua.append((float(grid[i]), float(grid[j])))
        else:
            k = i + int(np.argmin(gains[i:j + 1]))
            reps.append(float(grid[k]))
    return BruteForceResult(
        grid=grid,
        gains=gains,
        eps=eps,
        flagged=grid[flagged_mask],
        representatives=tuple(reps),
        continua=tuple(continua),
    )
