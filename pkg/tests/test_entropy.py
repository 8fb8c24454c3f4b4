import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdp_entropy.entropy import (
    extremal_config,
    global_max_entropy,
    global_min_entropy,
    mle_entropy,
    posterior_mean_entropy,
    prior_mean_entropy,
    shannon_entropy,
    weighted_posterior_entropy,
)
from pdp_entropy.oracle import check_extremality, compositions, enumerate_extremes
from pdp_entropy.sampler import PdpParams, SampleState, make_rng, simulate_batch, states_from_increments
from pdp_entropy.special_fn import digamma

from .strategies import pdp_params, sample_states

DP = PdpParams(0.0, 1.0)


def test_prior_mean_examples():
    assert prior_mean_entropy(DP) == pytest.approx(1.0, abs=1e-12)
    assert prior_mean_entropy(PdpParams(0.5, 0.5)) == pytest.approx(2.0, abs=1e-12)
    assert abs(prior_mean_entropy(PdpParams(0.0, 1e-9))) < 1e-8


def test_posterior_examples():
    assert posterior_mean_entropy([1], DP) == pytest.approx(1.0, abs=1e-12)
    assert posterior_mean_entropy([], DP) == pytest.approx(1.0, abs=1e-12)
    # psi(3.5) - 0.4 psi(0.5) - 0.6 psi(2.5) reduces to 22/15 by the recurrence
    assert posterior_mean_entropy([2], PdpParams(0.5, 0.5)) == pytest.approx(22 / 15, abs=1e-12)


def test_posterior_frozen_value_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    with mpmath.workdps(40):
        d = mpmath.digamma
        expected = d(3.5) - mpmath.mpf(1) / 2.5 * d(0.5) - mpmath.mpf(1.5) / 2.5 * d(2.5)
    assert float(expected) == pytest.approx(22 / 15, abs=1e-15)


def test_weighted_empty_sample():
    assert weighted_posterior_entropy([], DP) == pytest.approx(1.0, abs=1e-12)
    # the first weighted step from the empty sample: 2 * H_1 - 1 * H_0 = 1
    assert weighted_posterior_entropy([1], DP) - weighted_posterior_entropy([], DP) == pytest.approx(1.0)


def test_sample_and_counts_agree():
    state = SampleState.from_counts([3, 1, 2])
    params = PdpParams(0.3, 0.7)
    assert posterior_mean_entropy(state, params) == posterior_mean_entropy([3, 1, 2], params)


def test_rejects_bad_frequencies():
    with pytest.raises(ValueError):
        posterior_mean_entropy([1, 0], DP)
    with pytest.raises(ValueError):
        mle_entropy([])


def test_mle_examples():
    assert mle_entropy([7]) == 0.0
    assert mle_entropy([1, 1]) == pytest.approx(math.log(2), abs=1e-15)
    assert mle_entropy([2, 1, 1]) == pytest.approx(1.5 * math.log(2), abs=1e-15)


def test_shannon_entropy_ignores_zero_weights():
    assert shannon_entropy([0.5, 0.5, 0.0]) == pytest.approx(math.log(2))
    assert shannon_entropy([1.0]) == 0.0


@settings(max_examples=300, deadline=None)
@given(pdp_params(), sample_states(min_ell=1))
def test_posterior_matches_weighted_form(params, state):
    lhs = (params.theta + state.ell) * posterior_mean_entropy(state, params)
    assert lhs == pytest.approx(weighted_posterior_entropy(state, params), abs=1e-9, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(pdp_params(), sample_states(min_ell=1))
def test_sandwich(params, state):
    h = posterior_mean_entropy(state, params)
    assert global_min_entropy(state.ell, params) - 1e-10 <= h <= global_max_entropy(state.ell, params) + 1e-10


@settings(max_examples=200, deadline=None)
@given(sample_states(min_ell=1))
def test_mle_bounded_by_log_ell(state):
    h = mle_entropy(state)
    assert -1e-15 <= h <= math.log(state.ell) + 1e-12


def test_extremal_config_examples():
    assert sorted(extremal_config(7, 3, "max").counts) == [2, 2, 3]
    assert sorted(extremal_config(7, 3, "min").counts, reverse=True) == [5, 1, 1]
    assert extremal_config(5, 5, "max").counts == (1,) * 5
    assert extremal_config(5, 5, "min").counts == (1,) * 5
    with pytest.raises(ValueError):
        extremal_config(3, 4, "max")
    with pytest.raises(ValueError):
        extremal_config(3, 2, "median")


@given(st.integers(1, 200), st.data())
def test_extremal_config_shapes(ell, data):
    k = data.draw(st.integers(1, ell))
    mx = extremal_config(ell, k, "max").counts
    mn = extremal_config(ell, k, "min").counts
    assert sum(mx) == sum(mn) == ell and len(mx) == len(mn) == k
    assert max(mx) - min(mx) <= 1


def test_global_examples():
    assert global_max_entropy(2, DP) == pytest.approx(7 / 6, abs=1e-12)
    assert global_min_entropy(2, DP) == pytest.approx(5 / 6, abs=1e-12)
    params = PdpParams(0.4, 2.0)
    expected = digamma(params.theta + 2) - digamma(1 - params.alpha) - 1 / (params.theta + 1)
    assert global_max_entropy(1, params) == pytest.approx(expected, abs=1e-12)
    assert global_max_entropy(1, params) == pytest.approx(posterior_mean_entropy([1], params), abs=1e-12)
    assert global_min_entropy(1, params) == pytest.approx(posterior_mean_entropy([1], params), abs=1e-12)
    with pytest.raises(ValueError):
        global_max_entropy(0, params)


def test_compositions_count():
    # C(ell - 1, k - 1) compositions of ell into k positive parts
    assert sum(1 for _ in compositions(8, 3)) == math.comb(7, 2)
    assert list(compositions(3, 3)) == [(1, 1, 1)]


@pytest.mark.parametrize("alpha, theta", [(0.0, 1.0), (0.25, -0.15), (0.5, 0.5), (0.9, 10.0), (0.9, -0.8)])
def test_fixed_k_extremality_brute_force(alpha, theta):
    params = PdpParams(alpha, theta)
    for ell in range(1, 11):
        assert check_extremality(ell, params) == []


def test_enumerate_extremes_reports_every_k():
    findings = enumerate_extremes(6, PdpParams(0.25, 0.5))
    assert sorted(f.k for f in findings) == list(range(1, 7))


def test_weighted_global_min_diverges():
    params = PdpParams(0.5, 1.0)
    ells = np.unique(np.geomspace(1, 1e6, 400).astype(int))
    values = np.array([(params.theta + l) * global_min_entropy(int(l), params) for l in ells])
    assert np.all(np.diff(values) > 0)
    assert values[-1] > 10.0


def test_consistency_trend():
    params = PdpParams(0.5, 1.0)
    n_star = simulate_batch(params, 1000, 40, make_rng(9))
    gaps = {100: [], 1000: []}
    for row in n_star:
        states = states_from_increments(row)
        for ell in gaps:
            s = states[ell - 1]
            gaps[ell].append(abs(posterior_mean_entropy(s, params) - mle_entropy(s)))
    assert np.median(gaps[1000]) < np.median(gaps[100])


@pytest.mark.parametrize("alpha, theta", [(0.25, 0.1), (0.0, 0.5), (0.0, 0.9), (0.1, 0.0), (0.4, -0.3)])
def test_two_species_alternation_dips(alpha, theta):
    # pattern A, B, A, B: the posterior entropy dips at ell = 3
    params = PdpParams(alpha, theta)
    assert theta < 1 - 3 * alpha
    h2 = posterior_mean_entropy([1, 1], params)
    h3 = posterior_mean_entropy([2, 1], params)
    h4 = posterior_mean_entropy([2, 2], params)
    assert h2 > h3 and h4 > h3


def _oracle_posterior(counts, alpha, theta):
    import mpmath

    with mpmath.workdps(40):
        a, t = mpmath.mpf(alpha), mpmath.mpf(theta)
        ell, k = sum(counts), len(counts)
        d = mpmath.digamma
        occupied = sum((n - a) * d(n - a + 1) for n in counts)
        return float(d(t + ell + 1) - ((t + a * k) * d(1 - a) + occupied) / (t + ell))


def test_alternation_frozen_values():
    params = PdpParams(0.25, 0.1)
    for counts in ([1, 1], [2, 1], [2, 2]):
        expected = _oracle_posterior(counts, 0.25, 0.1)
        assert posterior_mean_entropy(counts, params) == pytest.approx(expected, abs=1e-12)


def test_plugin_alternation_dips():
    assert mle_entropy([1, 1]) == mle_entropy([2, 2]) == pytest.approx(math.log(2))
    assert mle_entropy([2, 1]) < math.log(2)


def test_global_max_exact_rational():
    # alpha = 0, theta = 1: psi(ell + 2) - psi(1) - ell / (ell + 1) is a harmonic sum
    for ell in range(1, 30):
        harmonic = sum(Fraction(1, i) for i in range(1, ell + 2))
        exact = harmonic - Fraction(ell, ell + 1)
        assert global_max_entropy(ell, DP) == pytest.approx(float(exact), abs=1e-12)
