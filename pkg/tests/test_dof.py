from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ifofdm.dof import (
    DofQuery,
    dof_slope_estimate,
    mimo_circulant_ic_dof,
    sum_dof_symmetric,
    sum_dof_theorem1,
    tdma_ofdm_dof,
)

GRID = [(K, L_D, L_I) for K in range(1, 17) for L_D in range(2, 13) for L_I in range(1, L_D)]


@pytest.mark.parametrize(
    "taps, L_I, expected",
    [
        ((2, 2, 2, 2), 1, Fraction(2)),
        ((3, 3, 3), 3, Fraction(1)),
        ((5, 5, 5), 4, Fraction(1)),
        ((5,) * 8, 4, Fraction(8, 7)),
        ((10, 2), 1, Fraction(1)),
        ((4, 2, 2), 1, Fraction(5, 5)),
        ((2, 2, 2), 1, Fraction(3, 2)),
    ],
)
def test_sum_dof_values(taps, L_I, expected):
    assert sum_dof_theorem1(DofQuery(taps, L_I)) == expected


@pytest.mark.parametrize("K", [1, 2, 5, 16])
@pytest.mark.parametrize("L_D", [2, 3])
def test_symmetric_half_k(K, L_D):
    assert sum_dof_symmetric(K, L_D, 1) == Fraction(K, 2)


def test_symmetric_second_branch():
    assert sum_dof_symmetric(7, 5, 4) == 1
    assert sum_dof_theorem1(DofQuery.symmetric(7, 5, 4)) == 1


@pytest.mark.parametrize("L_D, L_I", [(3, 3), (2, 4)])
def test_symmetric_rejects_tdma_regime(L_D, L_I):
    with pytest.raises(ValueError):
        sum_dof_symmetric(3, L_D, L_I)


def test_symmetric_matches_general_formula_exhaustively():
    for K, L_D, L_I in GRID:
        t1 = sum_dof_theorem1(DofQuery.symmetric(K, L_D, L_I))
        if t1 > 1:
            assert sum_dof_symmetric(K, L_D, L_I) == t1, (K, L_D, L_I)


def test_sum_dof_monotone_on_symmetric_grid():
    for K in range(1, 17):
        for L_I in range(1, 12):
            vals = [sum_dof_theorem1(DofQuery.symmetric(K, L_D, L_I)) for L_D in range(L_I, 13)]
            assert all(a <= b for a, b in zip(vals, vals[1:]))
        for L_D in range(2, 13):
            vals = [sum_dof_theorem1(DofQuery.symmetric(K, L_D, L_I)) for L_I in range(1, L_D + 1)]
            assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_sum_dof_not_monotone_for_asymmetric_users():
    # raising one user's taps also stretches the shared subblock
    a = sum_dof_theorem1(DofQuery((2, 2, 2), 1))
    b = sum_dof_theorem1(DofQuery((3, 2, 2), 1))
    assert (a, b) == (Fraction(3, 2), Fraction(1))


def test_outputs_are_exact():
    assert isinstance(sum_dof_theorem1(DofQuery.symmetric(3, 4, 2)), Fraction)
    assert isinstance(sum_dof_symmetric(3, 4, 2), Fraction)
    assert isinstance(tdma_ofdm_dof(8, 3, 2), Fraction)


def test_tdma_values():
    assert tdma_ofdm_dof(64, 2, 1) == Fraction(64, 65)
    assert tdma_ofdm_dof(1, 1, 1) == 1
    with pytest.raises(ValueError):
        tdma_ofdm_dof(0, 2, 1)


def test_tdma_increasing_to_one():
    Ms = [1, 2, 10, 100, 10**4, 10**6]
    vals = [tdma_ofdm_dof(M, 5, 3) for M in Ms]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1 and 1 - vals[-1] < Fraction(1, 10**5)


@pytest.mark.parametrize("K, n, expected", [(2, 2, Fraction(2)), (5, 3, Fraction(15, 2))])
def test_mimo_circulant(K, n, expected):
    assert mimo_circulant_ic_dof(K, n) == expected


def test_mimo_circulant_invalid():
    with pytest.raises(ValueError):
        mimo_circulant_ic_dof(2, 0)


@given(st.floats(0.1, 20), st.floats(-5, 5))
def test_slope_of_exact_line(c, offset):
    pts = [(p, c * p / 10 * np.log2(10) + offset) for p in (40, 45, 50, 55, 60)]
    assert dof_slope_estimate(pts) == pytest.approx(c, rel=1e-9)


def test_slope_two_points():
    x0, x1 = 10 / 10 * np.log2(10), 30 / 10 * np.log2(10)
    assert dof_slope_estimate([(10, 1.0), (30, 4.0)]) == pytest.approx(3.0 / (x1 - x0))


@pytest.mark.parametrize("pts", [[(1, 1)], [(1, 1), (1, 2)]])
def test_slope_invalid(pts):
    with pytest.raises(ValueError):
        dof_slope_estimate(pts)


@pytest.mark.parametrize("taps, L_I", [((), 1), ((0, 2), 1), ((2,), 0)])
def test_query_validation(taps, L_I):
    with pytest.raises(ValueError):
        DofQuery(taps, L_I)
