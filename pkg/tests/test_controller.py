import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftconsensus.adaptation import (ControllerGains, StepGains, StepWeights,
                                    signed_pow)
from ftconsensus.controller import (AgentController, ControllerError,
                                    assemble_chi, consensus_error,
                                    virtual_control_step1,
                                    virtual_control_stepj)
from ftconsensus.rbfnet import activations, uniform_basis
from ftconsensus.topology import Topology, build_laplacian


def make_controller(g=1.0, n_steps=2, M=3, Mt=3):
    gains = ControllerGains.uniform(n_steps, StepGains(k=2.0, kp=1.0, kq=1.0))
    bases_ca = [uniform_basis(M, -2, 2, 1.0) for _ in range(n_steps)]
    bases_theta = []
    for j in range(1, n_steps + 1):
        dim = 1 if j == 1 else j + (j - 1) * (2 * M + Mt + 1)
        bases_theta.append(uniform_basis(Mt, -2, 2, 1.0, dim=dim))
    return AgentController(g, gains, bases_ca, bases_theta)


def zero_weights(n_steps=2, M=3, Mt=3):
    return [StepWeights.zeros(M, Mt) for _ in range(n_steps)]


class TestConsensusError:
    def test_neighbors_only(self):
        e = consensus_error(1.0, [(0.5, 0.2), (2.0, -1.0)])
        assert e == pytest.approx(0.5 * 0.8 + 2.0 * 2.0)

    def test_with_leader(self):
        e = consensus_error(1.0, [], leader_link=(1.0, 0.25))
        assert e == pytest.approx(0.75)

    def test_rejects_negative_weight(self):
        with pytest.raises(ControllerError):
            consensus_error(0.0, [(-1.0, 0.0)])

    def test_pinned_needs_leader_output(self):
        with pytest.raises(ControllerError):
            consensus_error(0.0, [], leader_link=(1.0, None))

    @settings(deadline=None, max_examples=40)
    @given(st.integers(0, 2 ** 12))
    def test_matches_pinned_laplacian(self, seed):
        """Edge-wise errors equal ltilde applied to the tracking errors."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        adj = (rng.uniform(size=(n, n)) < 0.5) * rng.uniform(0.1, 2.0, (n, n))
        np.fill_diagonal(adj, 0.0)
        b = rng.uniform(0.0, 2.0, n)
        topo = Topology(adjacency=adj, leader_weights=b)
        y = rng.normal(size=n)
        y0 = rng.normal()
        e = np.array([
            consensus_error(
                y[i],
                [(adj[i, l], y[l]) for l in range(n) if adj[i, l] > 0],
                leader_link=(b[i], y0),
            )
            for i in range(n)
        ])
        ltilde = build_laplacian(topo).ltilde
        assert np.allclose(e, ltilde @ (y - y0), atol=1e-12)


class TestVirtualControls:
    def test_step1_formula(self):
        gains = ControllerGains.uniform(1, StepGains(k=2.0, kp=1.0, kq=1.0))
        basis = uniform_basis(3, -2, 2, 1.0)
        w = StepWeights(critic=[0.0, 0.0, 0.0], actor=[0.1, 0.2, 0.3],
                        theta=[0.4, 0.5, 0.6], dist=0.7)
        e, g, x1 = 0.5, 2.0, 0.3
        S = activations(basis, [e])
        phi = activations(basis, [x1])
        expected = (
            -(2.0 / g) * e - (w.actor @ S) / g
            + (-signed_pow(e, 1 / 3) - e**3 - w.theta @ phi - 0.7) / g
        )
        got = virtual_control_step1(e, w, g, gains, basis, basis, x1)
        assert got == pytest.approx(expected)

    def test_step1_requires_positive_indegree(self):
        gains = ControllerGains.uniform(1, StepGains(k=2.0, kp=1.0, kq=1.0))
        basis = uniform_basis(3, -2, 2, 1.0)
        with pytest.raises(ControllerError):
            virtual_control_step1(0.0, StepWeights.zeros(3, 3), 0.0, gains,
                                  basis, basis, 0.0)

    def test_stepj_formula_zero_weights(self):
        gains = ControllerGains.uniform(2, StepGains(k=2.0, kp=1.0, kq=1.0))
        basis = uniform_basis(3, -2, 2, 1.0)
        chi_basis = uniform_basis(3, -2, 2, 1.0, dim=9)
        z, z_prev = 0.5, 0.25
        got = virtual_control_stepj(z, StepWeights.zeros(3, 3), np.zeros(9),
                                    z_prev, gains, 2, basis, chi_basis)
        assert got == pytest.approx(-2 * z - signed_pow(z, 1 / 3) - z**3 - z_prev)

    def test_stepj_rejects_step_one(self):
        gains = ControllerGains.uniform(1, StepGains(k=2.0, kp=1.0, kq=1.0))
        basis = uniform_basis(3, -2, 2, 1.0)
        with pytest.raises(ControllerError):
            virtual_control_stepj(0.0, StepWeights.zeros(3, 3), np.zeros(1),
                                  0.0, gains, 1, basis, basis)


class TestAssembleChi:
    def test_dimension(self):
        M = Mt = 3
        w = zero_weights(2)
        chi = assemble_chi([0.1, 0.2], w[:1])
        assert chi.shape == (2 + (2 * M + Mt + 1),)

    def test_ordering(self):
        w = [StepWeights(critic=[1.0], actor=[2.0], theta=[3.0], dist=4.0),
             StepWeights(critic=[5.0], actor=[6.0], theta=[7.0], dist=8.0)]
        chi = assemble_chi([0.1, 0.2, 0.3], w)
        assert np.allclose(chi, [0.1, 0.2, 0.3, 1, 5, 2, 6, 3, 7, 4, 8])

    def test_empty_weights(self):
        chi = assemble_chi([0.5], [])
        assert np.allclose(chi, [0.5])


class TestAgentController:
    def test_cascade_chains_virtual_errors(self):
        ctl = make_controller(g=1.0)
        x = np.array([0.4, -0.3])
        cas = ctl.control(x, zero_weights(), [], leader_output=0.1,
                          leader_weight=1.0)
        assert cas.e == pytest.approx(0.3)
        assert cas.z[0] == pytest.approx(0.3)
        assert cas.z[1] == pytest.approx(x[1] - cas.alpha[0])
        assert cas.u == cas.alpha[-1]

    def test_unpinned_z1_is_nan_without_leader(self):
        ctl = make_controller(g=0.5)
        cas = ctl.control(np.zeros(2), zero_weights(), [(0.5, 1.0)])
        assert np.isnan(cas.z[0])
        assert cas.e == pytest.approx(-0.5)

    def test_learning_signal_selection(self):
        ctl = make_controller()
        cas = ctl.control(np.array([0.2, 0.0]), zero_weights(), [],
                          leader_output=0.0, leader_weight=1.0)
        assert ctl.learning_signal(cas, 1) == cas.e
        assert ctl.learning_signal(cas, 2) == cas.z[1]

    def test_state_shape_checked(self):
        ctl = make_controller()
        with pytest.raises(ControllerError):
            ctl.control(np.zeros(3), zero_weights(), [], leader_output=0.0,
                        leader_weight=1.0)

    def test_weight_count_checked(self):
        ctl = make_controller()
        with pytest.raises(ControllerError):
            ctl.control(np.zeros(2), zero_weights()[:1], [], leader_output=0.0,
                        leader_weight=1.0)
