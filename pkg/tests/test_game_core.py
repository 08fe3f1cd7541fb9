import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ewlgame.game_core import (
    GameMatrix2,
    PrisonersDilemmaParams,
    StrategyDensity,
    ValidationError,
    classical_payoff,
    conjugate_payoff,
    diagonal_payoff,
)

from conftest import PD_MATRIX, densities, matrices, weights

D = StrategyDensity


@pytest.mark.parametrize("x, y, expected", [
    ((1, 0), (1, 0), 2.0),
    ((0, 1), (1, 0), 4.0),
    ((0.5, 0.5), (0.5, 0.5), 7 / 4),
])
def test_classical_payoff_examples(x, y, expected):
    assert classical_payoff(D(*x), D(*y), PD_MATRIX) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("x, y, expected", [
    ((0, 1), (1, 0), 0.0),
    ((1, 0), (1, 0), 2.0),
    ((0.5, 0.5), (0, 1), 2.5),
])
def test_conjugate_payoff_examples(x, y, expected):
    assert conjugate_payoff(D(*x), D(*y), PD_MATRIX) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("x, expected", [((1, 0), 2.0), ((0, 1), 1.0), ((0.6, 0.4), 1.84)])
def test_diagonal_payoff_examples(x, expected):
    assert diagonal_payoff(D(*x), PD_MATRIX) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("bad", [(0.5, 0.6), (-0.1, 1.1), (float("nan"), 1.0), (0.5, 0.5 + 1e-9)])
def test_density_rejects_invalid(bad):
    with pytest.raises(ValidationError):
        D(*bad)


def test_density_tolerance_boundary():
    D(0.5, 0.5 + 5e-13)  # within 1e-12
    with pytest.raises(ValidationError):
        StrategyDensity.from_weight(1.5)


def test_matrix_rejects_non_finite():
    with pytest.raises(ValidationError):
        GameMatrix2(1.0, float("inf"), 0.0, 0.0)
    with pytest.raises(ValidationError):
        GameMatrix2.from_array(np.zeros(3))


@pytest.mark.parametrize("abc", [(1, 1, 2), (2, 1, 3), (0, 1, 2), (1, 3, 2), (-1, 1, 2)])
def test_pd_ordering_enforced(abc):
    with pytest.raises(ValidationError):
        PrisonersDilemmaParams(*abc)


def test_pd_matrix_layout():
    assert PrisonersDilemmaParams(1, 2, 4).matrix() == GameMatrix2(2, 0, 4, 1)


def test_matrix_helpers():
    A = GameMatrix2(1, 2, 3, 4)
    assert A[(1, 0)] == 3 and A.T == GameMatrix2(1, 3, 2, 4)
    assert A + A == A.scaled(2.0)


@given(densities, matrices)
def test_diagonal_is_self_conjugate(x, A):
    assert classical_payoff(x, x, A) == pytest.approx(conjugate_payoff(x, x, A), abs=1e-12)


@given(densities, densities, matrices)
def test_conjugate_is_transpose(x, y, A):
    assert conjugate_payoff(x, y, A) == pytest.approx(classical_payoff(x, y, A.T), abs=1e-12)


@given(weights, weights, st.floats(0.0, 1.0), densities, matrices)
def test_bilinearity(t1, t2, lam, y, A):
    x1, x2 = D.from_weight(t1), D.from_weight(t2)
    mix = D.from_weight(lam * t1 + (1 - lam) * t2)
    lhs = classical_payoff(mix, y, A)
    rhs = lam * classical_payoff(x1, y, A) + (1 - lam) * classical_payoff(x2, y, A)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    lhs = classical_payoff(y, mix, A)
    rhs = lam * classical_payoff(y, x1, A) + (1 - lam) * classical_payoff(y, x2, A)
    assert lhs == pytest.approx(rhs, abs=1e-12)
