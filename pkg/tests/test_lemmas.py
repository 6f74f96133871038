import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from ftconsensus.lemma_oracles import (lemma2_check, lemma4_check,
                                       lemma5_check, young_check)

vectors = hnp.arrays(np.float64, st.integers(1, 8),
                     elements=st.floats(-10.0, 10.0))


class TestLemma2:
    def test_equality_at_p_one(self):
        w = lemma2_check([1.0, 1.0], 1.0)
        assert w.passed and w.slack == pytest.approx(0.0)

    def test_equal_entries_cubed(self):
        # n^(1-p) (sum)^p == sum v^p when entries are equal
        w = lemma2_check([1.0, 1.0], 3.0)
        assert w.lhs == pytest.approx(2.0)
        assert w.rhs == pytest.approx(2.0)
        assert w.passed

    def test_sqrt_strict(self):
        w = lemma2_check([1.0, 1.0], 0.5)
        assert w.rhs == pytest.approx(2.0)
        assert w.lhs == pytest.approx(np.sqrt(2.0))
        assert w.slack > 0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            lemma2_check([1.0, -0.1], 0.5)

    def test_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            lemma2_check([1.0], 0.0)

    @settings(deadline=None, max_examples=200)
    @given(hnp.arrays(np.float64, st.integers(1, 8),
                      elements=st.floats(0.0, 10.0)),
           st.sampled_from([1.0 / 3.0, 0.5, 2.0, 3.0]))
    def test_random(self, v, p):
        assert lemma2_check(v, p).passed


class TestYoung:
    def test_zero_left_factor(self):
        assert young_check(0.0, 5.0, 2.0, 2.0, 1.0).passed

    def test_equality_case(self):
        w = young_check(1.0, 1.0, 2.0, 2.0, 1.0)
        assert w.lhs == pytest.approx(1.0)
        assert w.rhs == pytest.approx(1.0)
        assert w.passed

    def test_rejects_nonconjugate(self):
        with pytest.raises(ValueError):
            young_check(1.0, 1.0, 2.0, 3.0, 1.0)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ValueError):
            young_check(1.0, 1.0, 2.0, 2.0, 0.0)

    @settings(deadline=None, max_examples=200)
    @given(st.floats(-10.0, 10.0), st.floats(-10.0, 10.0),
           st.sampled_from([2.0, 4.0, 1.5]), st.floats(0.1, 5.0))
    def test_random(self, a, b, p, c):
        q = p / (p - 1.0)
        assert young_check(a, b, p, q, c).passed


class TestLemma4:
    def test_zero(self):
        w = lemma4_check([0.0], [0.0])
        assert w.lhs == 0.0 and w.rhs == 0.0 and w.passed

    def test_hand_value(self):
        w = lemma4_check([1.0], [0.0])
        assert w.lhs == pytest.approx(-1.0)
        assert w.rhs == pytest.approx(-0.5)
        assert w.slack == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            lemma4_check([1.0, 2.0], [1.0])

    @settings(deadline=None, max_examples=300)
    @given(st.integers(0, 2 ** 16))
    def test_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        a = rng.uniform(-10, 10, n)
        b = rng.uniform(-10, 10, n)
        assert lemma4_check(a, b).passed


class TestLemma5:
    def test_hand_value(self):
        w = lemma5_check([1.0], [0.0])
        assert w.lhs == pytest.approx(-1.0)
        assert w.rhs == pytest.approx(-0.125)

    def test_scale_covariance(self):
        """Scaling both vectors by s scales lhs, rhs, and slack by s^4."""
        rng = np.random.default_rng(42)
        a = rng.uniform(-3, 3, 5)
        b = rng.uniform(-3, 3, 5)
        base = lemma5_check(a, b)
        for s in (0.5, 2.0):
            w = lemma5_check(s * a, s * b)
            assert w.lhs == pytest.approx(s**4 * base.lhs, rel=1e-10)
            assert w.rhs == pytest.approx(s**4 * base.rhs, rel=1e-10)
            assert w.slack == pytest.approx(s**4 * base.slack, rel=1e-9)

    @settings(deadline=None, max_examples=300)
    @given(st.integers(0, 2 ** 16))
    def test_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        a = rng.uniform(-10, 10, n)
        b = rng.uniform(-10, 10, n)
        assert lemma5_check(a, b).passed


class TestWitness:
    def test_relative_slack_tolerance(self):
        # a tiny negative slack on large magnitudes still passes
        w = lemma4_check([1e6], [1e6])
        assert w.passed

    def test_nonnegative_four_thirds_power(self):
        from ftconsensus.adaptation import signed_pow
        xs = np.array([-7.3, -1.0, 0.0, 2.5])
        assert np.all(signed_pow(xs, 1.0 / 3.0) ** 4 >= 0.0)
