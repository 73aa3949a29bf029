import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from secisac.canonical import bec_bsc_channel, bernoulli_noiseless_channel, lemma3_estimators
from secisac.estimation import (DistortionMetric, Estimator, all_deterministic_estimators,
                                expected_distortion, hamming, optimal_estimator)
from secisac.prob_core import Alphabet, LabeledJoint

NAMES = ("X", "Y1", "Y2", "S1", "S2")


def random_joint(rng, max_size=3):
    sizes = rng.integers(1, max_size + 1, size=5)
    sizes[3] = max(sizes[3], 2)
    mass = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
    mass[rng.random(mass.shape) < 0.2] = 0.0
    if mass.sum() == 0:
        mass.flat[0] = 1.0
    axes = [Alphabet(n, range(k)) for n, k in zip(NAMES, sizes)]
    return LabeledJoint(axes, mass / mass.sum())


def random_metric(rng, state: Alphabet):
    n_rec = int(rng.integers(2, 4))
    return DistortionMetric(state, Alphabet("S1_hat", range(n_rec)),
                            rng.random((len(state), n_rec)).round(2))


def enumerated_minimum(joint, metric, obs):
    """Smallest expected distortion over all deterministic maps, by vectorized enumeration."""
    p = joint.marginal_array(list(obs) + ["S1"])
    cells = p.reshape(-1, p.shape[-1])
    risk = cells @ metric.table                          # [cell, s_hat]
    n_rec = risk.shape[1]
    tables = np.array(list(itertools.product(range(n_rec), repeat=len(risk))))
    return float(risk[np.arange(len(risk)), tables].sum(axis=1).min())


class TestMetricAndEstimator:
    def test_metric_validation(self):
        s = Alphabet("S1", [0, 1])
        with pytest.raises(ValueError):
            DistortionMetric(s, s, [[0, -1], [1, 0]])
        with pytest.raises(ValueError):
            DistortionMetric(s, s, [[0, 1, 1], [1, 0, 1]])
        with pytest.raises(ValueError):
            DistortionMetric(s, s, [[0, np.inf], [1, 0]])

    def test_estimator_total(self):
        a = Alphabet("X", [0, 1])
        with pytest.raises(ValueError):
            Estimator(("X",), (a,), Alphabet("S", [0, 1]), [0])
        with pytest.raises(ValueError):
            Estimator(("X",), (a,), Alphabet("S", [0, 1]), [0, 2])

    def test_from_rule(self):
        a = Alphabet("Y1", (0, 1, "e"))
        est = Estimator.from_rule([a], Alphabet("S1_hat", [0, 1]), lambda y: 0 if y == "e" else y)
        assert [est(y) for y in (0, 1, "e")] == [0, 1, 0]


class TestOptimalEstimator:
    def test_point_mass_posterior(self):
        mass = np.zeros((2, 1, 1, 3, 1))
        mass[0, 0, 0, 2, 0] = 0.4
        mass[1, 0, 0, 1, 0] = 0.6
        j = LabeledJoint([Alphabet(n, range(k)) for n, k in zip(NAMES, mass.shape)], mass)
        est = optimal_estimator(j, 1, hamming(j.axis("S1")), ("X",))
        assert list(est.table) == [2, 1]
        assert expected_distortion(j, est, hamming(j.axis("S1")), 1) == 0.0

    def test_ties_and_zero_cells(self):
        mass = np.zeros((3, 1, 1, 2, 1))
        mass[0, 0, 0, :, 0] = [0.25, 0.25]     # tie
        mass[2, 0, 0, :, 0] = [0.1, 0.4]       # X = 1 has zero mass
        j = LabeledJoint([Alphabet(n, range(k)) for n, k in zip(NAMES, mass.shape)], mass / mass.sum())
        est = optimal_estimator(j, 1, hamming(j.axis("S1")), ("X",))
        assert list(est.table) == [0, 0, 1]

    def test_observations_restricted(self):
        j = bernoulli_noiseless_channel(0.65, 0.21).joint([0.5, 0.5])
        with pytest.raises(ValueError):
            optimal_estimator(j, 1, hamming(j.axis("S1")), ("X", "S2"))
        with pytest.raises(ValueError):
            optimal_estimator(j, 3, hamming(j.axis("S1")))

    def test_metric_mismatch(self):
        j = bernoulli_noiseless_channel(0.65, 0.21).joint([0.5, 0.5])
        with pytest.raises(ValueError):
            optimal_estimator(j, 1, hamming(Alphabet("S1", [0, 1, 2])))

    @pytest.mark.parametrize("q", [0.3, 0.65])
    def test_lemma1_rule(self, q):
        ch = bernoulli_noiseless_channel(q, 0.21)
        j = ch.joint([0.4, 0.6])
        for which in (1, 2):
            est = optimal_estimator(j, which, hamming(j.axis(f"S{which}")), ("X", f"Y{which}"))
            prob_one = q if which == 1 else q * 0.21
            assert est(1, 0) == 0 and est(1, 1) == 1
            assert est(0, 0) == int(prob_one > 0.5)

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 1.0])
    def test_lemma1_distortion(self, p):
        q, a = 0.65, 0.21
        j = bernoulli_noiseless_channel(q, a).joint([1 - p, p])
        for which, ref in ((1, (1 - p) * min(q, 1 - q)), (2, (1 - p) * min(q * a, 1 - q * a))):
            m = hamming(j.axis(f"S{which}"))
            d = expected_distortion(j, optimal_estimator(j, which, m, ("X", f"Y{which}")), m, which)
            assert d == pytest.approx(ref, abs=1e-15)

    @pytest.mark.parametrize("q,gamma,p", [(0.65, 0.3, 0.4), (0.3, 0.7, 0.8), (0.5, 0.1, 0.5)])
    def test_becbsc_state1_distortion(self, q, gamma, p):
        j = bec_bsc_channel(q, 0.5, gamma, 0.1).joint([1 - p, p])
        m = hamming(j.axis("S1"))
        d = expected_distortion(j, optimal_estimator(j, 1, m, ("X", "Y1")), m, 1)
        assert d == pytest.approx((1 - p + p * gamma) * min(q, 1 - q), abs=1e-12)

    @pytest.mark.parametrize("q,alpha,beta", [(0.65, 0.5, 0.1), (0.9, 0.9, 0.1), (0.2, 0.3, 0.2)])
    def test_becbsc_state2_indicator_structure(self, q, alpha, beta):
        j = bec_bsc_channel(q, alpha, 0.3, beta).joint([0.5, 0.5])
        est = optimal_estimator(j, 2, hamming(j.axis("S2")), ("X", "Y2"))
        qa = q * alpha
        assert est(1, 1) == int(qa > beta)
        assert est(1, 0) == int(qa > 1 - beta)
        # the hand-written rule gives the same table
        assert np.array_equal(est.table, lemma3_estimators(q, alpha, 0.3, beta)[1].table)

    @pytest.mark.parametrize("p", [0.2, 0.7])
    def test_oracle_distortions(self, p):
        j = bec_bsc_channel(0.65, 0.5, 0.3, 0.2).joint([1 - p, p])
        ref = oracles.becbsc_joint(0.65, 0.5, 0.3, 0.2, p)
        for which, obs, oidx in ((1, ("X", "Y1", "Y2"), (0, 3, 4)), (2, ("X", "Y2"), (0, 4))):
            m = hamming(j.axis(f"S{which}"))
            d = expected_distortion(j, optimal_estimator(j, which, m, obs), m, which)
            assert d == pytest.approx(oracles.best_distortion(ref, which, oidx), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_optimal_beats_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        j = random_joint(rng)
        metric = random_metric(rng, j.axis("S1"))
        obs = ("X", "Y1")
        best = expected_distortion(j, optimal_estimator(j, 1, metric, obs), metric, 1)
        assert best <= enumerated_minimum(j, metric, obs) + 1e-12

    def test_optimal_beats_package_enumeration(self, rng):
        for _ in range(10):
            j = random_joint(rng, 2)
            m = hamming(j.axis("S1"))
            best = expected_distortion(j, optimal_estimator(j, 1, m, ("X", "Y2")), m, 1)
            for e in all_deterministic_estimators(j, m, ("X", "Y2")):
                assert best <= expected_distortion(j, e, m, 1) + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_more_observations_never_hurt(self, seed):
        rng = np.random.default_rng(seed)
        j = random_joint(rng)
        for which in (1, 2):
            if len(j.axis(f"S{which}")) < 2:
                continue
            m = hamming(j.axis(f"S{which}"))
            full = expected_distortion(j, optimal_estimator(j, which, m), m, which)
            part = expected_distortion(j, optimal_estimator(j, which, m, ("X", f"Y{which}")), m, which)
            assert full <= part + 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_hamming_is_map(self, seed):
        rng = np.random.default_rng(seed)
        j = random_joint(rng)
        est = optimal_estimator(j, 1, hamming(j.axis("S1")), ("X", "Y1", "Y2"))
        p = j.marginal_array(["X", "Y1", "Y2", "S1"])
        for cell in np.ndindex(*p.shape[:-1]):
            if p[cell].sum() > 1e-15:
                post = p[cell] / p[cell].sum()
                assert post[est.table[cell]] >= post.max() - 1e-12

    def test_enumeration_guard(self):
        j = random_joint(np.random.default_rng(0))
        big = DistortionMetric(j.axis("S1"), Alphabet("S1_hat", range(50)),
                               np.ones((len(j.axis("S1")), 50)))
        with pytest.raises(ValueError):
            list(all_deterministic_estimators(j, big, ("X", "Y1", "Y2")))
