import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loqrc.detection import (LOSSLESS, LossModel, ShotSampler, click_probabilities,
                             coincidence_vector, coincidences_to_csv, pair_labels,
                             pattern_coincidences, sample_coincidences, threshold_distribution)
from loqrc.fock import CapacityError, PnrDistribution, enumerate_basis, output_distribution
from loqrc.mesh import MziParams, mzi_unitary

from oracles import haar_unitary

HOM = mzi_unitary(MziParams(math.pi / 4, 0.0))


def hom_dist():
    return output_distribution(HOM, [1, 1], enumerate_basis(2, 2))


def random_dist(m, n, seed):
    rng = np.random.default_rng(seed)
    s = np.zeros(m, dtype=int)
    s[:n] = 1
    return output_distribution(haar_unitary(m, rng), s, enumerate_basis(m, n))


def test_click_probabilities_lossless():
    q = [0, 1, 3, 0, 2]
    np.testing.assert_array_equal(click_probabilities(q, LossModel(1.0)), [0, 1, 1, 0, 1])


def test_click_probabilities_dark():
    np.testing.assert_array_equal(click_probabilities([0, 1, 3], LossModel(0.0)), [0, 0, 0])


def test_click_probability_two_photons_half_efficiency():
    assert click_probabilities([2], LossModel(0.5))[0] == pytest.approx(0.75)


@pytest.mark.parametrize("eta", [-0.1, 1.5, math.nan])
def test_loss_model_range(eta):
    with pytest.raises(ValueError):
        LossModel(eta)


def test_threshold_point_mass():
    b = enumerate_basis(4, 2)
    d = output_distribution(np.eye(4), [1, 1, 0, 0], b)
    t = threshold_distribution(d, LOSSLESS).as_dict()
    assert t[(1, 1, 0, 0)] == pytest.approx(1.0)
    assert sum(t.values()) == pytest.approx(1.0)


def test_threshold_hom():
    t = threshold_distribution(hom_dist(), LOSSLESS).as_dict()
    assert t[(1, 1)] == pytest.approx(0.0, abs=1e-15)
    assert t[(1, 0)] == pytest.approx(0.5, abs=1e-12)
    assert t[(0, 1)] == pytest.approx(0.5, abs=1e-12)
    assert t[(0, 0)] == 0.0


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.6, 1.0])
def test_threshold_normalization(eta):
    t = threshold_distribution(random_dist(6, 3, 1), LossModel(eta))
    assert abs(t.probs.sum() - 1) < 1e-9


def test_lossless_pattern_weight_bounds():
    t = threshold_distribution(random_dist(6, 3, 2), LOSSLESS)
    w = t.patterns.sum(axis=1)
    assert t.probs[(w == 0) | (w > 3)].max() == 0.0


def test_threshold_capacity_guard():
    d = PnrDistribution(enumerate_basis(21, 1), np.full(21, 1 / 21))
    with pytest.raises(CapacityError, match="coincidence_vector"):
        threshold_distribution(d, LOSSLESS)


def test_coincidences_point_mass():
    b = enumerate_basis(5, 2)
    c = coincidence_vector(output_distribution(np.eye(5), [1, 1, 0, 0, 0], b), LOSSLESS)
    expected = np.zeros(10)
    expected[0] = 1.0
    np.testing.assert_array_equal(c, expected)


def test_coincidences_hom():
    assert coincidence_vector(hom_dist(), LOSSLESS)[0] == pytest.approx(0.0, abs=1e-15)


def test_pair_order_is_lexicographic():
    assert pair_labels(4) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


@pytest.mark.parametrize("m,n", [(m, n) for m in (2, 4, 6, 8) for n in (1, 2, 3) if n <= m])
@pytest.mark.parametrize("eta", [0.6, 0.8, 1.0])
def test_marginalization_identity(m, n, eta):
    d = random_dist(m, n, 10 * m + n)
    loss = LossModel(eta)
    exact = coincidence_vector(d, loss)
    oracle = pattern_coincidences(threshold_distribution(d, loss))
    assert np.abs(exact - oracle).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(1, 4), st.integers(0, 2**32 - 1),
       st.floats(0.0, 1.0))
def test_coincidence_bounds(m, n, seed, eta):
    n = min(n, m)
    c = coincidence_vector(random_dist(m, n, seed), LossModel(eta))
    assert c.min() >= 0 and c.max() <= 1
    assert c.sum() <= n * (n - 1) / 2 + 1e-9


def test_eta_monotonicity():
    d = random_dist(6, 3, 4)
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    cs = np.array([coincidence_vector(d, LossModel(e)) for e in grid])
    assert np.all(np.diff(cs, axis=0) >= -1e-15)
    assert np.all(cs[0] == 0)


def test_coincidence_csv():
    text = coincidences_to_csv(np.array([0.25, 0.0, 0.5]), 3)
    assert text.splitlines() == ["pair,value", "1-2,0.25", "1-3,0.0", "2-3,0.5"]


# --- finite shots ------------------------------------------------------------

def test_sample_point_mass_is_exact():
    b = enumerate_basis(4, 2)
    d = output_distribution(np.eye(4), [1, 1, 0, 0], b)
    rng = np.random.default_rng(0)
    for shots in (1, 7, 1000):
        np.testing.assert_array_equal(sample_coincidences(d, LOSSLESS, shots, rng),
                                      [1, 0, 0, 0, 0, 0])


def test_sample_rejects_zero_shots():
    with pytest.raises(ValueError):
        sample_coincidences(hom_dist(), LOSSLESS, 0, np.random.default_rng(0))


def test_sample_hom_suppression():
    rng = np.random.default_rng(1)
    est = [sample_coincidences(hom_dist(), LOSSLESS, 10**4, rng)[0] for _ in range(100)]
    assert np.mean(est) == 0.0


def test_sample_variance_is_binomial():
    d = random_dist(4, 2, 8)
    c = coincidence_vector(d, LOSSLESS)
    rng = np.random.default_rng(2)
    shots = 10**4
    est = np.array([sample_coincidences(d, LOSSLESS, shots, rng) for _ in range(100)])
    se = np.sqrt(c * (1 - c) / shots)
    live = c > 0.01
    assert np.all(np.abs(est.mean(axis=0) - c)[live] < 4 * se[live] / np.sqrt(100))
    ratio = est.std(axis=0, ddof=1)[live] / se[live]
    assert np.all((ratio > 1 / 1.5) & (ratio < 1.5))


@pytest.mark.parametrize("eta", [0.7, 1.0])
def test_grouped_sampler_matches_per_shot_reference(eta):
    d = random_dist(5, 3, 12)
    sampler = ShotSampler(d.basis, LossModel(eta))
    rng = np.random.default_rng(3)
    reps, shots = 400, 2000
    a = np.array([sampler.sample(d.probs, shots, rng) for _ in range(reps)])
    b = np.array([sampler.sample_per_shot(d.probs, shots, rng) for _ in range(reps)])
    c = sampler.exact(d.probs)
    se = np.sqrt(c * (1 - c) / shots / reps)
    live = c > 0.01
    assert np.all(np.abs(a.mean(0) - c)[live] < 4.5 * se[live])
    assert np.all(np.abs(b.mean(0) - c)[live] < 4.5 * se[live])
    # joint law: covariance between features agrees
    ca, cb = np.cov(a[:, live].T), np.cov(b[:, live].T)
    scale = np.sqrt(np.outer(np.diag(cb), np.diag(cb)))
    assert np.abs(ca - cb).max() / scale.max() < 0.25


def test_gaussian_regime_and_threshold():
    d = random_dist(6, 3, 5)
    c = coincidence_vector(d, LOSSLESS)
    rng = np.random.default_rng(4)
    huge = sample_coincidences(d, LOSSLESS, 10**14, rng)
    assert np.abs(huge - c).max() < 1e-5
    est = np.array([sample_coincidences(d, LOSSLESS, 10**7, rng) for _ in range(300)])
    live = (c > 0.01) & (c < 0.99)
    ratio = est.std(axis=0)[live] / np.sqrt(c * (1 - c) / 10**7)[live]
    assert np.all((ratio > 0.8) & (ratio < 1.2))
    # threshold disabled: exact sampling even for large budgets
    exact = ShotSampler(d.basis, LOSSLESS, gaussian_threshold=None).sample(d.probs, 10**9, rng)
    assert np.abs(exact - c).max() < 1e-3


def test_shot_noise_variance_slope():
    d = random_dist(6, 3, 6)
    sampler = ShotSampler(d.basis, LossModel(0.8))
    c = sampler.exact(d.probs)
    live = (c > 0.02) & (c < 0.98)
    rng = np.random.default_rng(5)
    budgets = [10**2, 10**3, 10**4, 10**5]
    var = [np.array([sampler.sample(d.probs, n, rng) for _ in range(200)])[:, live].var(axis=0).mean()
           for n in budgets]
    slope = np.polyfit(np.log10(budgets), np.log10(var), 1)[0]
    assert abs(slope + 1) < 0.15
