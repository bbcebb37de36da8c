import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crosskerr.algebra import (
    Convention,
    deformation_value,
    deformed_binomial,
    deformed_factorial,
    ladder_apply,
    log_weights,
    spectrum_check,
    su2_generators,
)


@pytest.mark.parametrize(
    "kt, nb, expected",
    [(0, 5, 1.0), (0.5, 2, math.sqrt(2)), (1, 3, 2.0)],
)
def test_deformation_value(kt, nb, expected):
    assert deformation_value(kt, nb) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("kt, nb", [(-0.1, 1), (0.1, -1)])
def test_deformation_value_domain(kt, nb):
    with pytest.raises(ValueError):
        deformation_value(kt, nb)


def test_deformed_factorial_examples():
    for kt in (0, 0.3, 7.0):
        assert deformed_factorial(kt, 0) == 1.0
    assert deformed_factorial(1, 2) == pytest.approx(math.sqrt(6), rel=1e-15)
    assert deformed_factorial(0, 7) == 1.0
    with pytest.raises(ValueError):
        deformed_factorial(0.1, -1)


@given(st.floats(0, 10), st.integers(1, 60))
def test_deformed_factorial_recursion(kt, m):
    assert deformed_factorial(kt, m) == pytest.approx(
        deformation_value(kt, m) * deformed_factorial(kt, m - 1), rel=1e-12
    )


@given(st.floats(0, 10), st.floats(0, 10), st.integers(0, 50))
def test_deformation_monotone(k1, k2, n):
    lo, hi = sorted((k1, k2))
    assert deformation_value(lo, n) <= deformation_value(hi, n)
    assert deformation_value(lo, n) <= deformation_value(lo, n + 1)
    assert deformed_factorial(lo, n) <= deformed_factorial(hi, n)
    assert deformed_factorial(lo, n) <= deformed_factorial(lo, n + 1)


def test_deformed_binomial_examples():
    for conv in Convention:
        assert deformed_binomial(2, 1, 0, conv) == 2
        assert deformed_binomial(5, 0, 0.3, conv) == pytest.approx(1.0) if conv is Convention.OPERATOR else True
    assert deformed_binomial(5, 0, 0.3, Convention.OPERATOR) == 1.0
    with pytest.raises(ValueError):
        deformed_binomial(3, 4, 0.1)
    with pytest.raises(ValueError):
        deformed_binomial(3, -1, 0.1)


@pytest.mark.parametrize("N, kt", [(2, 1.0), (5, 0.3), (12, 2.5)])
def test_operator_binomial_matches_repeated_raising(N, kt):
    # (J+)^n |0,N> = n! sqrt(binom) W_n |n, N-n>, so binom W_n^2 = ((J+)^n e0)_n^2 / n!^2
    jp, _, _ = su2_generators(N, kt)
    v = np.zeros(N + 1)
    v[0] = 1.0
    for n in range(N + 1):
        if n:
            v = jp @ v
        oracle = (v[n] / math.factorial(n)) ** 2
        assert deformed_binomial(N, n, kt, "operator") == pytest.approx(oracle, rel=1e-12)


def test_operator_binomial_frozen_value():
    # hand expansion: J+|0,2> = sqrt(2) f(1) |1,1> = 2 |1,1>
    assert deformed_binomial(2, 1, 1, Convention.OPERATOR) == pytest.approx(4.0, rel=1e-15)


def test_log_weights_conventions_agree_when_undeformed():
    for N in (0, 1, 10, 40):
        assert np.array_equal(log_weights(N, 0, "operator"), log_weights(N, 0, "literal"))


def test_literal_weights_are_factorials():
    N, kt = 6, 0.7
    lw = log_weights(N, kt, Convention.LITERAL)
    for n in range(N + 1):
        assert math.exp(lw[n]) == pytest.approx(deformed_factorial(kt, N - n), rel=1e-13)


def test_convention_parse():
    assert Convention.parse("OperatorExpansion") is Convention.OPERATOR
    assert Convention.parse("literal") is Convention.LITERAL
    with pytest.raises(ValueError):
        Convention.parse("bogus")


def _dense_raise(kt, cutoff):
    """Matrix of f(n_b) a^dag on the (cutoff+1)^2 truncation, index n_a*(c+1)+n_b."""
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1)
    f = np.diag(np.sqrt(1 + kt * np.arange(cutoff + 1)))
    return np.kron(a.T, f)


def test_ladder_lower_vacuum_and_undeformed():
    psi = np.zeros((4, 5))
    psi[0, 3] = 1.0
    assert not np.any(ladder_apply("lower", 0.7, psi))
    psi = np.zeros((4, 5))
    psi[3, 2] = 1.0
    out = ladder_apply("lower", 0.0, psi)
    expected = np.zeros((4, 5))
    expected[2, 2] = math.sqrt(3)
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_ladder_raise_matches_dense_matrix():
    psi = np.zeros((3, 5))
    psi[0, 3] = 1.0
    out = ladder_apply("raise", 1.0, psi)
    assert out[1, 3] == pytest.approx(2.0, abs=1e-15)
    oracle = (_dense_raise(1.0, 4) @ np.pad(psi, ((0, 2), (0, 0))).ravel()).reshape(5, 5)[:3]
    np.testing.assert_allclose(out, oracle, atol=1e-14)


def test_ladder_adjoint_pair():
    rng = np.random.default_rng(3)
    kt = 0.4
    x = rng.normal(size=(5, 4))
    x[-1] = 0
    y = rng.normal(size=(5, 4))
    # <y, A^dag x> = <A y, x>
    assert np.sum(y * ladder_apply("raise", kt, x)) == pytest.approx(
        np.sum(ladder_apply("lower", kt, y) * x), rel=1e-12
    )


def test_ladder_refuses_to_leave_truncation():
    psi = np.zeros((2, 2))
    psi[1, 0] = 1.0
    with pytest.raises(ValueError):
        ladder_apply("raise", 0.1, psi)
    with pytest.raises(ValueError):
        ladder_apply("sideways", 0.1, psi)


def test_su2_spin_half():
    jp, jm, j0 = su2_generators(1, 0.0)
    np.testing.assert_array_equal(j0, np.diag([-0.5, 0.5]))
    np.testing.assert_array_equal(jp, np.array([[0, 0], [1, 0]]))
    np.testing.assert_array_equal(jm, jp.T)


@pytest.mark.parametrize("kt", [0.0, 0.1, 1.0])
@pytest.mark.parametrize("N", [0, 1, 5, 17, 40])
def test_su2_commutators(N, kt):
    jp, jm, j0 = su2_generators(N, kt)
    assert np.array_equal(jm, jp.conj().T)
    assert np.all(jp >= 0) and np.all(np.diag(j0) == np.diag(j0).real)
    assert np.max(np.abs(j0 @ jp - jp @ j0 - jp)) < 1e-12
    assert np.max(np.abs(j0 @ jm - jm @ j0 + jm)) < 1e-12
    if kt == 0:
        assert np.max(np.abs(jp @ jm - jm @ jp - 2 * j0)) < 1e-12


@pytest.mark.parametrize("N", [3, 10, 40])
def test_su2_deformation_remainder_vanishes_linearly(N):
    ratios = []
    for kt in (1e-1, 1e-2, 1e-3):
        jp, jm, j0 = su2_generators(N, kt)
        ratios.append(np.max(np.abs(jp @ jm - jm @ jp - 2 * j0)) / kt)
    assert max(ratios) < 2 * min(ratios)


@pytest.mark.parametrize("kt", [0.0, 0.3, 5.0])
def test_extremal_weights_annihilated(kt):
    N = 7
    jp, jm, _ = su2_generators(N, kt)
    e = np.eye(N + 1)
    assert not np.any(jm @ e[0])
    assert not np.any(jp @ e[N])


def test_spectrum_check():
    assert spectrum_check(10, 0.0, 1.0, 1.3) == 0.0
    assert spectrum_check(10, 0.1, 1.0, 1.0) < 1e-12
    for N in range(41):
        for kt in (0.1, 1.0):
            assert spectrum_check(N, kt, 1.0, 1.0) < 1e-12
    with pytest.raises(ValueError):
        spectrum_check(3, 0.1, 0.0, 1.0)


def test_spectrum_check_vacuum_row_exact():
    # N = 0 only contains n_a = 0
    assert spectrum_check(0, 3.0, 2.0, 5.0) == 0.0
