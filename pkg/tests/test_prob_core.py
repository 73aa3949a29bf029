import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import make_joint
from oracles import hb
from secisac.prob_core import (Alphabet, Kernel, LabeledJoint, ZERO_MASS, ZeroMassError,
                               binary_entropy, condition, conditional_entropy, entropy, marginalize,
                               mutual_information, product_joint, star)


def joints(max_axes=3, max_size=4):
    """Hypothesis strategy for random joints with strictly positive total mass."""
    @st.composite
    def build(draw):
        n = draw(st.integers(2, max_axes))
        shape = tuple(draw(st.lists(st.integers(1, max_size), min_size=n, max_size=n)))
        mass = draw(arrays(float, shape, elements=st.floats(0, 1)))
        if mass.sum() <= 1e-6:
            mass = mass + 1.0
        return make_joint(mass, ["A", "B", "C"][:n])
    return build()


class TestAlphabet:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Alphabet("X", [0, 0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Alphabet("X", [])

    def test_index(self):
        a = Alphabet("Y1", (0, 1, "e"))
        assert a.index("e") == 2
        with pytest.raises(ValueError):
            a.index(5)


class TestTables:
    def test_joint_must_sum_to_one(self):
        with pytest.raises(ValueError):
            LabeledJoint([Alphabet("A", [0, 1])], [0.5, 0.6])

    def test_joint_rejects_negative(self):
        with pytest.raises(ValueError):
            LabeledJoint([Alphabet("A", [0, 1])], [1.5, -0.5])

    def test_joint_is_read_only(self):
        j = make_joint([0.5, 0.5])
        with pytest.raises(ValueError):
            j.mass[0] = 1.0

    def test_kernel_rows(self):
        a, b = Alphabet("A", [0, 1]), Alphabet("B", [0, 1])
        Kernel([a], [b], [[0.3, 0.7], [1.0, 0.0]])
        with pytest.raises(ValueError):
            Kernel([a], [b], [[0.3, 0.6], [1.0, 0.0]])

    def test_deterministic_kernel(self):
        a, b = Alphabet("A", [0, 1, 2]), Alphabet("B", [0, 1])
        k = Kernel.deterministic([a], [b], lambda x: x % 2)
        assert np.array_equal(k.table, [[1, 0], [0, 1], [1, 0]])


class TestScalars:
    def test_binary_entropy_examples(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        # frozen from the direct-formula oracle
        assert binary_entropy(0.21) == pytest.approx(0.7414827399312737, abs=1e-15)
        assert binary_entropy(0.5, math.e) == pytest.approx(math.log(2), abs=1e-15)

    def test_binary_entropy_range(self):
        for bad in (-0.1, 1.1, float("nan")):
            with pytest.raises(ValueError):
                binary_entropy(bad)

    @given(st.floats(0, 1))
    def test_binary_entropy_symmetry_and_oracle(self, x):
        assert binary_entropy(x) == pytest.approx(binary_entropy(1 - x), abs=1e-12)
        assert binary_entropy(x) == pytest.approx(hb(x), abs=1e-12)
        assert 0.0 <= binary_entropy(x) <= 1.0

    def test_star_examples(self):
        assert star(0.5, 0.37) == 0.5
        assert star(0.3, 0.0) == 0.3
        assert star(0.3, 0.1) == pytest.approx(0.34, abs=1e-15)
        with pytest.raises(ValueError):
            star(1.2, 0.1)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_star_in_unit_interval(self, p, b):
        assert 0.0 <= star(p, b) <= 1.0


class TestMeasures:
    def test_entropy_examples(self):
        assert entropy(make_joint([1, 1]), "A0") == pytest.approx(1.0, abs=1e-15)
        assert entropy(make_joint([0, 1, 0]), "A0") == 0.0
        j = make_joint([0.65, 0.35])
        assert entropy(j, "A0", math.e) == pytest.approx(binary_entropy(0.65, math.e), abs=1e-15)
        assert entropy(j, "A0", math.e) == pytest.approx(0.6474466390346325, abs=1e-15)

    def test_unknown_axis_rejected(self):
        with pytest.raises(ValueError):
            entropy(make_joint([1, 1]), "Z")

    def test_overlap_rejected(self):
        j = make_joint(np.ones((2, 2)))
        with pytest.raises(ValueError):
            conditional_entropy(j, ["A0"], ["A0", "A1"])
        with pytest.raises(ValueError):
            mutual_information(j, "A0", "A0")

    def test_conditional_entropy_examples(self):
        indep = make_joint(np.outer([0.2, 0.8], [0.5, 0.3, 0.2]))
        assert conditional_entropy(indep, "A0", "A1") == pytest.approx(entropy(indep, "A0"), abs=1e-12)
        func = make_joint([[0.3, 0], [0, 0.7]])
        assert conditional_entropy(func, "A0", "A1") == 0.0

    def test_mutual_information_examples(self):
        indep = make_joint(np.outer([0.2, 0.8], [0.5, 0.5]))
        assert mutual_information(indep, "A0", "A1") == 0.0
        same = make_joint([[0.3, 0], [0, 0.7]])
        assert mutual_information(same, "A0", "A1") == pytest.approx(binary_entropy(0.3), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(joints())
    def test_chain_rule(self, j):
        a, b = j.names[0], j.names[1:]
        assert entropy(j, j.names) == pytest.approx(
            entropy(j, a) + conditional_entropy(j, b, a), abs=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(joints())
    def test_nonnegative_and_bounded(self, j):
        size = int(np.prod(j.mass.shape))
        assert 0.0 <= entropy(j, j.names) <= math.log2(size) + 1e-12
        assert mutual_information(j, j.names[0], j.names[1]) >= 0.0
        g = j.names[2:] if len(j.names) > 2 else ()
        assert 0.0 <= conditional_entropy(j, j.names[0], g) <= entropy(j, j.names[0]) + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(joints())
    def test_base_conversion(self, j):
        h2, he = entropy(j, j.names), entropy(j, j.names, math.e)
        assert h2 * math.log(2) == pytest.approx(he, abs=1e-10)
        i2 = mutual_information(j, j.names[0], j.names[1:])
        ie = mutual_information(j, j.names[0], j.names[1:], base=math.e)
        assert i2 * math.log(2) == pytest.approx(ie, abs=1e-10)

    def test_base_must_be_2_or_e(self):
        with pytest.raises(ValueError):
            entropy(make_joint([1, 1]), "A0", 10)


class TestMarginalizeCondition:
    def test_marginalize_identity(self):
        j = make_joint(np.arange(1, 9).reshape(2, 2, 2))
        assert marginalize(j, j.names) == j

    @settings(max_examples=40, deadline=None)
    @given(joints())
    def test_marginalize_idempotent(self, j):
        once = marginalize(j, j.names[:2])
        twice, direct = marginalize(once, once.names[:1]), marginalize(j, j.names[:1])
        assert twice.names == direct.names
        assert np.allclose(twice.mass, direct.mass, rtol=0, atol=1e-15)

    def test_condition_on_support_of_point_mass(self):
        mass = np.zeros((2, 3))
        mass[1] = [0.2, 0.5, 0.3]
        j = make_joint(mass)
        c = condition(j, {"A0": 1})
        assert np.allclose(c.mass, [0.2, 0.5, 0.3])

    def test_zero_mass_signal(self):
        j = make_joint([[0.5, 0.5], [0, 0]])
        with pytest.raises(ZeroMassError):
            condition(j, {"A0": 1})
        assert condition(j, {"A0": 1}, zero_mass="sentinel") is ZERO_MASS
        assert not ZERO_MASS

    def test_lemma1_posterior_point_mass(self):
        from secisac.canonical import bernoulli_noiseless_channel
        j = bernoulli_noiseless_channel(0.65, 0.21).joint([0.5, 0.5])
        post = condition(j, {"X": 1, "Y1": 1, "Y2": 0, "S2": 0})
        assert post.names == ("S1",)
        assert np.array_equal(post.mass, [0.0, 1.0])

    def test_product_joint(self):
        a = make_joint([0.2, 0.8], ["A"])
        b = make_joint([0.5, 0.25, 0.25], ["B"])
        p = product_joint(a, b)
        assert mutual_information(p, "A", "B") == 0.0
        assert np.allclose(p.mass, np.outer([0.2, 0.8], [0.5, 0.25, 0.25]))
