import os
import subprocess
import sys

import numpy as np
import pytest

from ewlgame import kernels
from ewlgame.game_core import GameMatrix2
from ewlgame.quantum_engine import PhaseProfile, QuantumStrategy, quantum_payoff, quantum_payoff_player2

HAS_CYTHON = "cython" in kernels.available_backends()
BACKENDS = ["python"] + (["cython"] if HAS_CYTHON else [])


def _naive_grid_max(m, corr, t, s):
    T, S = np.meshgrid(t, s, indexing="ij")
    vals = ((1 - T) * ((1 - S) * m[0] + S * m[1]) + T * ((1 - S) * m[2] + S * m[3])
            + corr * np.sqrt(T * (1 - T)) * np.sqrt(S * (1 - S)))
    return vals.max(axis=0), vals.argmax(axis=0)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("corr", [0.0, 1.7, -2.3])
def test_grid_max_matches_naive(backend, corr, rng):
    m = tuple(rng.normal(size=4))
    t = np.linspace(0, 1, 101)
    s = np.linspace(0, 1, 37)
    vals, args = kernels.density_grid_max(m, corr, t, s, backend=backend)
    ref_vals, ref_args = _naive_grid_max(m, corr, t, s)
    np.testing.assert_allclose(vals, ref_vals, atol=1e-13)
    np.testing.assert_array_equal(args, ref_args)


@pytest.mark.parametrize("backend", BACKENDS)
def test_grid_max_ties_take_first_index(backend):
    vals, args = kernels.density_grid_max((1, 1, 1, 1), 0.0, np.linspace(0, 1, 11), np.array([0.3]),
                                          backend=backend)
    assert vals[0] == pytest.approx(1.0) and args[0] == 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_statevector_matches_scalar_route(backend, rng):
    A = GameMatrix2.from_array(rng.normal(size=(2, 2)))
    ph = PhaseProfile(*rng.uniform(0, 6.28, 4))
    x = rng.uniform(0, 1, 50)
    y = rng.uniform(0, 1, 50)
    x[:2], y[:2] = (0.0, 1.0), (1.0, 0.0)
    p1, p2 = kernels.statevector_payoffs(0.8, ph.as_tuple(), (A.a00, A.a01, A.a10, A.a11), x, y,
                                         backend=backend)
    for k in range(50):
        alpha = QuantumStrategy.from_weight(x[k], ph.xi0, ph.xi1)
        beta = QuantumStrategy.from_weight(y[k], ph.upsilon0, ph.upsilon1)
        assert p1[k] == pytest.approx(quantum_payoff(0.8, alpha, beta, A), abs=1e-13)
        assert p2[k] == pytest.approx(quantum_payoff_player2(0.8, alpha, beta, A), abs=1e-13)


@pytest.mark.skipif(not HAS_CYTHON, reason="compiled extension not built")
def test_backends_agree(rng):
    m = tuple(rng.normal(size=4))
    t = np.linspace(0, 1, 301)
    a = kernels.density_grid_max(m, 0.9, t, t, backend="cython")
    b = kernels.density_grid_max(m, 0.9, t, t, backend="python")
    np.testing.assert_allclose(a[0], b[0], atol=1e-14)
    np.testing.assert_array_equal(a[1], b[1])
    x, y = np.meshgrid(t[::10], t[::10])
    c = kernels.statevector_payoffs(1.1, (0.2, 1.3, 0.5, 0.1), m, x, y, backend="cython")
    d = kernels.statevector_payoffs(1.1, (0.2, 1.3, 0.5, 0.1), m, x, y, backend="python")
    np.testing.assert_allclose(c[0], d[0], atol=1e-14)
    np.testing.assert_allclose(c[1], d[1], atol=1e-14)


def test_statevector_broadcasts():
    p1, p2 = kernels.statevector_payoffs(0.5, (0, 0, 0, 0), (2, 0, 4, 1), np.zeros((3, 1)), np.zeros(4))
    assert p1.shape == (3, 4)
    np.testing.assert_allclose(p1, 2.0, atol=1e-14)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.density_grid_max((0, 0, 0, 0), 0.0, [0.0], [0.0], backend="fortran")


def test_pure_python_switch():
    code = ("import ewlgame, ewlgame.kernels as k;"
            "from ewlgame import symmetric_nash, DensityPayoff, PrisonersDilemmaParams as P, SolverSettings;"
            "r = symmetric_nash(DensityPayoff.pseudoclassical(0.785398, P(1,2,5).matrix()), SolverSettings(grid_n=401));"
            "print(k.BACKEND, round(r.equilibria[0].t_star, 4))")
    env = dict(os.environ, EWLGAME_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "0.25"]
