import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gammaincc

from mapstat.exact import enumerate_all
from mapstat.series import (
    SeriesPoly,
    SingularFit,
    TruncationTooShort,
    _fit,
    component_cdf_table,
    connected_series,
    exact_expectation_mu,
    exact_expectation_tau,
    expectation_curve,
    extraction_factor,
    extrapolate_constant,
    largest_component_cdf,
    mapping_series,
    rth_largest_component_cdf,
    sth_largest_tree_cdf,
    tree_cdf_table,
    tree_series,
)

from conftest import brute_structure


def _rooted_tree_count(k):
    """Mappings of [k] whose only cyclic vertex is a fixed point are rooted trees."""
    count = 0
    for images in itertools.product(range(1, k + 1), repeat=k):
        cyclic, _, _ = brute_structure(list(images))
        count += len(cyclic) == 1
    return count


def _connected_closed_form(n):
    return math.factorial(n - 1) * sum(Fraction(n**k, math.factorial(k)) for k in range(n))


def test_tree_coefficients_small():
    T = tree_series(4)
    assert T[0] == 0
    assert T[1] == 1 and T[2] == 1 and T[3] == Fraction(3, 2)
    assert [T.count(k) for k in range(1, 5)] == [_rooted_tree_count(k) for k in range(1, 5)] == [1, 2, 9, 64]


def test_tree_float_is_scaled():
    Tf = tree_series(300, "float")
    Tr = tree_series(300)
    for k in (1, 7, 50, 300):
        assert Tf[k] == pytest.approx(float(Tr[k]) * math.exp(-k), rel=1e-12)
    k = np.arange(1, 301)
    assert np.all(Tf.coeffs[1:] <= 1)
    # k**(k-1) e**-k / k! ~ k**-1.5 / sqrt(2 pi)
    assert np.allclose(Tf.coeffs[1:] * k**1.5 * math.sqrt(2 * math.pi), 1, atol=0.1)


def test_total_mapping_count():
    G = mapping_series(12)
    assert [G.count(n) for n in range(13)] == [n**n if n else 1 for n in range(13)]


def test_connected_counts_small():
    C = connected_series(4)
    assert [C.count(k) for k in range(1, 5)] == [1, 3, 17, 142]
    assert [C.count(k) for k in range(1, 5)] == [enumerate_all(k).connected_count for k in range(1, 5)]


def test_connected_exact_against_closed_form():
    C = connected_series(25)
    assert all(C.count(n) == _connected_closed_form(n) for n in range(1, 26))


def test_connected_float_against_incomplete_gamma():
    N = 3000
    C = connected_series(N, "float")
    n = np.arange(1, N + 1)
    # scaled coefficient = e**-n (1/n) sum_{k<n} n**k / k! = Q(n, n) / n
    assert np.allclose(C.coeffs[1:], gammaincc(n, n) / n, rtol=1e-10, atol=0)


def test_exp_reproduces_mapping_series():
    N = 15
    assert connected_series(N).exp().coeffs == mapping_series(N).coeffs
    Cf = connected_series(400, "float")
    assert np.allclose(Cf.exp().coeffs, mapping_series(400, "float").coeffs, rtol=1e-11)


def test_exp_log_round_trip():
    C = connected_series(12)
    assert C.exp().log().coeffs == C.coeffs
    Cf = connected_series(200, "float")
    assert np.allclose(Cf.exp().log().coeffs, Cf.coeffs, rtol=1e-9, atol=1e-15)


def test_series_arithmetic_and_modes():
    a = SeriesPoly.constant(1, 3, "rational")
    T = tree_series(3)
    assert (T * 2 - T).coeffs == T.coeffs
    assert (T**2)[2] == 1
    assert (1 - T).coeffs[0] == 1 and (a + T)[1] == 1
    with pytest.raises(ValueError):
        T + tree_series(3, "float")
    with pytest.raises(ValueError):
        a.exp()


def test_largest_component_small():
    assert largest_component_cdf(2, 1) == Fraction(1, 4)
    assert largest_component_cdf(2, 0) == 0
    assert all(largest_component_cdf(n, n) == 1 for n in range(1, 13))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_cdfs_match_direct_tally(n, brute_tables):
    want = brute_tables[n]
    assert component_cdf_table(n, 1) == list(itertools.accumulate(want["mu_dist"]))
    assert component_cdf_table(n, 2) == list(itertools.accumulate(want["mu2_dist"]))
    for s in (1, 2, 3):
        assert tree_cdf_table(n, s) == list(itertools.accumulate(want["tau_dist"][s - 1]))


def test_rth_reduces_to_largest():
    for n in range(1, 11):
        for m in range(n + 1):
            assert rth_largest_component_cdf(n, m, 1) == largest_component_cdf(n, m)


def test_second_component_small():
    assert rth_largest_component_cdf(2, 0, 2) == Fraction(3, 4)


def test_second_component_table_n6():
    assert component_cdf_table(6, 2) == enumerate_all(6, r_max=2).mu_cdf(2)


def test_tree_small():
    assert sth_largest_tree_cdf(2, 1, 1) == Fraction(1, 2)
    assert all(sth_largest_tree_cdf(n, n, s) == 1 for n in range(1, 11) for s in (1, 2, 3))


def test_tree_table_n7():
    assert tree_cdf_table(7, 2) == enumerate_all(7).tau_cdf(2)
    assert component_cdf_table(7, 1) == enumerate_all(7).mu_cdf(1)


def test_monotone_in_m_s_r():
    n = 9
    mu1, mu2 = component_cdf_table(n, 1), component_cdf_table(n, 2)
    taus = [tree_cdf_table(n, s) for s in (1, 2, 3)]
    for row in [mu1, mu2, *taus]:
        assert all(a <= b for a, b in zip(row, row[1:]))
        assert 0 <= row[0] and row[-1] == 1
    assert all(a <= b for a, b in zip(mu1, mu2))
    for lo, hi in zip(taus, taus[1:]):
        assert all(a <= b for a, b in zip(lo, hi))


def test_expectations_small():
    assert exact_expectation_mu(1) == 1
    assert exact_expectation_mu(2) == Fraction(7, 4)
    assert exact_expectation_tau(2, 1) == Fraction(3, 2)
    assert exact_expectation_tau(2, 2) == Fraction(1, 2)
    assert exact_expectation_tau(1, 2) == 0


def test_expectation_ordering():
    for n in range(1, 20):
        mu = exact_expectation_mu(n)
        taus = [exact_expectation_tau(n, s) for s in (1, 2, 3)]
        assert taus[0] <= mu and taus == sorted(taus, reverse=True)


def test_truncation_too_short():
    with pytest.raises(TruncationTooShort):
        largest_component_cdf(10, 3, N=8)
    with pytest.raises(TruncationTooShort):
        sth_largest_tree_cdf(10, 3, 1, "float", N=8)
    with pytest.raises(TruncationTooShort):
        exact_expectation_mu(10, N=5)
    with pytest.raises(TruncationTooShort):
        tree_series(5).probability(6)


@pytest.mark.parametrize("n", [10, 33, 64])
def test_float_mode_matches_rational(n):
    rel = 1e-10
    assert float(exact_expectation_mu(n)) == pytest.approx(exact_expectation_mu(n, "float"), rel=rel)
    for s in (1, 2, 3):
        assert float(exact_expectation_tau(n, s)) == pytest.approx(exact_expectation_tau(n, s, "float"), rel=rel)
    for m in (1, n // 3, n // 2, n - 1):
        assert float(largest_component_cdf(n, m)) == pytest.approx(largest_component_cdf(n, m, "float"), rel=rel)
        assert float(rth_largest_component_cdf(n, m, 2)) == pytest.approx(rth_largest_component_cdf(n, m, 2, "float"), rel=rel)
        assert float(sth_largest_tree_cdf(n, m, 2)) == pytest.approx(sth_largest_tree_cdf(n, m, 2, "float"), rel=rel)


def test_sweeps_match_generic_float_path():
    N = 120
    mu = expectation_curve("mu", N)
    tau = [expectation_curve(("tau", s), N, s_max=3) for s in (1, 2, 3)]
    for n in (1, 2, 17, 60, 120):
        generic_mu = sum(1 - largest_component_cdf(n, m, "float") for m in range(n)) / n
        assert mu[n] == pytest.approx(generic_mu, rel=1e-11)
        for s in (1, 2, 3):
            generic = sum(1 - sth_largest_tree_cdf(n, m, s, "float") for m in range(n)) / n
            assert tau[s - 1][n] == pytest.approx(generic, rel=1e-10, abs=1e-15)


def test_normalisation():
    C = connected_series(30)
    assert all(C.exp().probability(n) == 1 for n in range(1, 31))
    G = connected_series(2000, "float").exp()
    assert all(abs(G.probability(n) - 1) < 1e-10 for n in (1, 10, 500, 2000))


def test_extraction_factor_stirling():
    n = 10_000
    assert extraction_factor(n, "float") / math.sqrt(2 * math.pi * n) == pytest.approx(1, abs=1e-4)
    assert extraction_factor(5, "rational") == Fraction(120, 3125)


def test_fit_recovers_model():
    grid = [100, 400, 1600, 6400]
    vals = [0.3 + 0.7 / math.sqrt(g) - 2.0 / g for g in grid]
    fit = _fit("mu", grid, vals)
    assert fit.limit_estimate == pytest.approx(0.3, abs=1e-12)
    assert fit.residual_norm < 1e-12


def test_singular_fit():
    with pytest.raises(SingularFit):
        extrapolate_constant("mu", [64, 128])
    with pytest.raises(SingularFit):
        extrapolate_constant("mu", [64, 64, 128])


def test_extrapolate_rational_small_grid():
    fit = extrapolate_constant("mu", [8, 12, 16], mode="rational")
    flt = extrapolate_constant("mu", [8, 12, 16], mode="float")
    assert fit.limit_estimate == pytest.approx(flt.limit_estimate, rel=1e-9)
    assert fit.values[0] == pytest.approx(float(exact_expectation_mu(8) / 8), rel=1e-15)
