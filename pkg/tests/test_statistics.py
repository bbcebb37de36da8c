import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from crosskerr.errors import IntegrityError
from crosskerr.states import build_ckncs, joint_distribution
from crosskerr.statistics import (
    cross_correlation,
    mandel_parameter,
    mean_occupations,
    mode_statistics,
    static_row,
    validate_distribution,
)


def loop_moments(table):
    """Moments by explicit double loops over the table."""
    s = {"a": 0.0, "b": 0.0, "aa": 0.0, "bb": 0.0, "ab": 0.0}
    for na in range(table.shape[0]):
        for nb in range(table.shape[1]):
            p = table[na, nb]
            s["a"] += na * p
            s["b"] += nb * p
            s["aa"] += na * na * p
            s["bb"] += nb * nb * p
            s["ab"] += na * nb * p
    return s


def test_frozen_means():
    table = joint_distribution(build_ckncs(N=2, mu=1.0, kappa_tilde=1.0))
    mean_a, mean_b = mean_occupations(table)
    assert mean_a == pytest.approx(8 / 7, abs=1e-14)
    assert mean_b == pytest.approx(6 / 7, abs=1e-14)


def test_frozen_mandel_undeformed():
    # probabilities (1, 2, 1) / 4: mean 1, variance 1/2
    table = joint_distribution(build_ckncs(N=2, mu=1.0, kappa_tilde=0.0))
    assert mandel_parameter(table, "a") == pytest.approx(-0.5, abs=1e-14)
    assert mandel_parameter(table, "b") == pytest.approx(-0.5, abs=1e-14)


@pytest.mark.parametrize("N, mu, kt", [(10, 0.1, 0.1), (5, 1.0, 0.0), (30, 0.6, 2.0)])
def test_against_loop_oracle(N, mu, kt):
    table = joint_distribution(build_ckncs(N=N, mu=mu, kappa_tilde=kt))
    m = loop_moments(table)
    mean_a, mean_b = mean_occupations(table)
    assert mean_a == pytest.approx(m["a"], rel=1e-12)
    assert mean_b == pytest.approx(m["b"], rel=1e-12)
    assert mean_a + mean_b == pytest.approx(N, abs=1e-10)
    g2 = cross_correlation(table)
    assert g2 == pytest.approx(m["ab"] / (m["a"] * m["b"]), rel=1e-12)
    assert mandel_parameter(table, "a") == pytest.approx((m["aa"] - m["a"] ** 2 - m["a"]) / m["a"], rel=1e-10, abs=1e-12)
    assert mandel_parameter(table, "b") == pytest.approx((m["bb"] - m["b"] ** 2 - m["b"]) / m["b"], rel=1e-10, abs=1e-12)


def test_g2_in_unit_interval_for_small_deformed_state():
    g2 = cross_correlation(joint_distribution(build_ckncs(N=10, mu=0.1, kappa_tilde=0.1)))
    assert 0 < g2 < 1


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 120), st.floats(0.01, 20), st.floats(0, 50))
def test_fixed_total_gives_sub_poissonian_anticorrelation(N, mu, kt):
    table = joint_distribution(build_ckncs(N=N, mu=mu, kappa_tilde=kt))
    mean_a, mean_b = mean_occupations(table)
    assert abs(mean_a + mean_b - N) < 1e-9
    q_a = mandel_parameter(table, "a")
    if q_a is not None:
        assert q_a >= -1 - 1e-12
    g2 = cross_correlation(table)
    if g2 is not None:
        # n_b = N - n_a makes the modes anticorrelated
        assert g2 <= 1 + 1e-12


def test_undefined_for_single_table_is_none():
    table = joint_distribution(build_ckncs(N=4, mu=0.0))
    assert cross_correlation(table) is None
    assert mandel_parameter(table, "a") is None
    assert mandel_parameter(table, "b") == pytest.approx(-1.0)
    row = static_row(table)
    assert row[2] is None and row[3] is None


def test_undefined_in_batch_is_masked():
    t1 = joint_distribution(build_ckncs(N=4, mu=0.0))
    t2 = joint_distribution(build_ckncs(N=4, mu=1.0))
    batch = np.stack([t1, t2])
    g2 = cross_correlation(batch)
    assert isinstance(g2, np.ma.MaskedArray)
    assert g2.mask.tolist() == [True, False]
    assert g2[1] == pytest.approx(cross_correlation(t2))
    qa = mandel_parameter(batch, "a")
    assert qa.mask.tolist() == [True, False]


@settings(max_examples=40, deadline=None)
@given(arrays(float, (4, 5), elements=st.floats(0, 1)))
def test_batch_matches_single(raw):
    if raw.sum() == 0:
        return
    t = raw / raw.sum()
    batch = np.stack([t, t[::-1]])
    qa = mandel_parameter(batch, "a")
    single = mandel_parameter(t, "a")
    if single is None:
        assert qa.mask[0]
    else:
        assert qa[0] == pytest.approx(single, rel=1e-12, abs=1e-12)


def test_mode_statistics():
    table = joint_distribution(build_ckncs(N=2, mu=1.0, kappa_tilde=0.0))
    stats = mode_statistics(table, "a")
    assert stats["mean"] == pytest.approx(1.0)
    assert stats["variance"] == pytest.approx(0.5)
    assert stats["mandel_q"] == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        mode_statistics(np.stack([table, table]), "a")


def test_validation():
    with pytest.raises(IntegrityError):
        validate_distribution(np.full((2, 2), 0.3))
    with pytest.raises(IntegrityError):
        validate_distribution(np.array([[1.5, -0.5], [0, 0]]))
    with pytest.raises(ValueError):
        validate_distribution(np.ones(3) / 3)
    with pytest.raises(ValueError):
        mandel_parameter(np.eye(2) / 2, "c")
