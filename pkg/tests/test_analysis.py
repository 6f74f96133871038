import types

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftconsensus.analysis import (NOT_SETTLED, aggregate_kp_kq,
                                  monotone_envelope_fraction, omega_radii,
                                  settling_time, tmax_bound, truth_oracle_F1)
from ftconsensus.adaptation import ControllerGains, StepGains
from ftconsensus.dynamics import builtin_model
from ftconsensus.topology import Topology


def fake_trace(t, err):
    """Minimal stand-in exposing .t and .tracking_error."""
    tr = types.SimpleNamespace()
    tr.t = np.asarray(t, dtype=float)
    err = np.asarray(err, dtype=float)
    tr.tracking_error = err if err.ndim == 2 else err[:, None]
    return tr


class TestTmaxBound:
    def test_unit_gains(self):
        b = tmax_bound(1.0, 1.0, 1.0 / 3.0, 3.0)
        assert b.t_max == pytest.approx(2.0)

    def test_example2_gains(self):
        b = tmax_bound(1.5, 1.5, 1.0 / 3.0, 3.0)
        assert b.t_max == pytest.approx(1.0 + 1.0 / 3.0)

    def test_limit_structure(self):
        big = tmax_bound(1e12, 1.0, 1.0 / 3.0, 3.0)
        assert big.t_max == pytest.approx(0.5, rel=1e-6)

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            tmax_bound(1.0, 1.0, 1.5, 3.0)
        with pytest.raises(ValueError):
            tmax_bound(-1.0, 1.0, 1.0 / 3.0, 3.0)


class TestSettlingTime:
    def test_simple_crossing(self):
        t = np.linspace(0, 1, 11)
        err = np.where(t < 0.35, 1.0, 0.01)
        assert settling_time(fake_trace(t, err), 0.1) == [pytest.approx(0.4)]

    def test_never_above(self):
        t = np.linspace(0, 1, 11)
        assert settling_time(fake_trace(t, 0.0 * t), 0.1) == [0.0]

    def test_not_settled(self):
        t = np.linspace(0, 1, 11)
        err = np.where(t < 0.95, 0.0, 1.0)
        assert settling_time(fake_trace(t, err), 0.1) == [NOT_SETTLED]

    def test_re_excursion_counts_last_crossing(self):
        t = np.linspace(0, 1, 11)
        err = np.zeros_like(t)
        err[2] = 1.0
        err[7] = 1.0
        assert settling_time(fake_trace(t, err), 0.1) == [pytest.approx(0.8)]

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            settling_time(fake_trace([0.0, 1.0], [0.0, 0.0]), 0.0)

    @settings(deadline=None, max_examples=60)
    @given(st.integers(0, 2 ** 12))
    def test_monotone_in_threshold(self, seed):
        rng = np.random.default_rng(seed)
        t = np.linspace(0, 1, 50)
        err = np.abs(rng.normal(size=50))
        tr = fake_trace(t, err)
        small = settling_time(tr, 0.5)[0]
        large = settling_time(tr, 1.5)[0]
        to_num = lambda v: 2.0 if v == NOT_SETTLED else v
        assert to_num(large) <= to_num(small)


class TestOmegaRadii:
    def test_ratio_invariant(self):
        r = omega_radii(0.5, 1.0, 1.0, 1.0 / 3.0, 3.0, vartheta=0.5,
                        lambda_min=0.25)
        assert r.omega_z == pytest.approx(r.omega_e / 0.25)

    def test_nondecreasing_in_c(self):
        rs = [omega_radii(c, 1.0, 1.0, 1.0 / 3.0, 3.0, 0.5, 1.0).omega_e
              for c in (0.1, 0.5, 2.0, 10.0)]
        assert all(a <= b + 1e-12 for a, b in zip(rs, rs[1:]))

    def test_input_validation(self):
        with pytest.raises(ValueError):
            omega_radii(1.0, 1.0, 1.0, 1 / 3, 3.0, vartheta=1.5, lambda_min=1.0)
        with pytest.raises(ValueError):
            omega_radii(-1.0, 1.0, 1.0, 1 / 3, 3.0, vartheta=0.5, lambda_min=1.0)


class TestAggregateGains:
    def test_formula(self):
        gains = ControllerGains.uniform(2, StepGains(k=50.0, kp=1.0, kq=1.0))
        kp, kq = aggregate_kp_kq(gains, 4)
        assert kp == pytest.approx(2.0 ** (2.0 / 3.0))
        # 2^((q+1)/2) (nN)^(1-(q+1)/2) kq_min = 4 * 8^(-1) * 1
        assert kq == pytest.approx(0.5)


class TestTruthOracle:
    def test_zero_couplings(self):
        topo = Topology(adjacency=np.zeros((1, 1)), leader_weights=[1.0])
        leader = builtin_model("example1_leader")
        follower = builtin_model("example1_follower")
        # layer-1 nonlinearity and disturbances vanish: F = -b x02, D = 0
        F, D = truth_oracle_F1([0.0, 0.7], [[0.0, 0.0]], topo, leader,
                               [follower], agent=0, t=0.0)
        assert F == pytest.approx(-0.7)
        assert D == pytest.approx(0.0)

    def test_neighbor_velocity_coupling(self):
        adj = np.array([[0.0, 0.0], [1.0, 0.0]])
        topo = Topology(adjacency=adj, leader_weights=[1.0, 0.0])
        follower = builtin_model("example1_follower")
        leader = builtin_model("example1_leader")
        states = [[0.0, 2.0], [0.0, 0.0]]
        F, D = truth_oracle_F1([0.0, 0.0], states, topo, leader,
                               [follower, follower], agent=1, t=0.0)
        assert F == pytest.approx(-2.0)  # -a_21 * x_12
        assert D == pytest.approx(0.0)


class TestEnvelope:
    def test_decreasing_series(self):
        assert monotone_envelope_fraction(np.array([3.0, 2.0, 1.0])) == 1.0

    def test_growing_series(self):
        assert monotone_envelope_fraction(np.array([1.0, 2.0, 3.0])) == 0.0
