import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftconsensus.topology import (SINGULAR_VALUE_TOL, Topology, TopologyError,
                                  build_laplacian, check_assumptions)


def chain_topology():
    # leader -> 1 -> 2 -> 3
    adj = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
    ])
    return Topology(adjacency=adj, leader_weights=np.array([1.0, 0.0, 0.0]))


class TestTopologyValidation:
    def test_rejects_negative_weights(self):
        with pytest.raises(TopologyError):
            Topology(adjacency=[[0.0, -1.0], [0.0, 0.0]],
                     leader_weights=[1.0, 0.0])

    def test_rejects_self_loops(self):
        with pytest.raises(TopologyError):
            Topology(adjacency=[[1.0, 0.0], [0.0, 0.0]],
                     leader_weights=[1.0, 0.0])

    def test_rejects_negative_pinning(self):
        with pytest.raises(TopologyError):
            Topology(adjacency=np.zeros((2, 2)), leader_weights=[1.0, -0.5])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(TopologyError):
            Topology(adjacency=np.zeros((2, 3)), leader_weights=[1.0, 0.0])

    def test_in_degree(self):
        topo = chain_topology()
        assert np.allclose(topo.in_degree, [1.0, 1.0, 1.0])


class TestLaplacian:
    def test_chain_values(self):
        bundle = build_laplacian(chain_topology())
        expected_l = np.array([
            [0.0, 0.0, 0.0],
            [-1.0, 1.0, 0.0],
            [0.0, -1.0, 1.0],
        ])
        assert np.array_equal(bundle.laplacian, expected_l)
        assert np.array_equal(bundle.ltilde, expected_l + np.diag([1.0, 0, 0]))

    def test_row_sums_zero(self):
        rng = np.random.default_rng(7)
        adj = rng.uniform(0, 2, size=(5, 5))
        np.fill_diagonal(adj, 0.0)
        bundle = build_laplacian(Topology(adjacency=adj, leader_weights=np.ones(5)))
        assert np.max(np.abs(bundle.laplacian.sum(axis=1))) < 1e-12

    def test_min_singular_value_positive_when_rooted(self):
        bundle = build_laplacian(chain_topology())
        assert bundle.min_singular_value > SINGULAR_VALUE_TOL

    def test_identity_graph(self):
        # isolated pinned followers: ltilde is the pinning diagonal
        topo = Topology(adjacency=np.zeros((2, 2)), leader_weights=[2.0, 3.0])
        bundle = build_laplacian(topo)
        assert np.array_equal(bundle.ltilde, np.diag([2.0, 3.0]))
        assert bundle.min_singular_value == pytest.approx(2.0)


class TestAssumptions:
    def test_chain_passes(self):
        report = check_assumptions(chain_topology())
        assert report.all_pass
        assert report.unreachable == ()

    def test_disconnected_fails(self):
        topo = Topology(adjacency=np.zeros((2, 2)), leader_weights=[1.0, 0.0])
        report = check_assumptions(topo)
        assert not report.all_pass
        assert not report.all_reachable
        assert report.unreachable == (1,)

    def test_no_pinning_fails(self):
        adj = np.array([[0.0, 1.0], [1.0, 0.0]])
        report = check_assumptions(Topology(adjacency=adj, leader_weights=[0.0, 0.0]))
        assert not report.leader_pinned
        assert not report.all_pass

    @settings(deadline=None, max_examples=50)
    @given(st.integers(2, 6), st.integers(0, 2 ** 12), st.floats(0.1, 5.0))
    def test_rooted_graphs_are_invertible(self, n, seed, scale):
        """Random graphs that pass reachability have invertible ltilde."""
        rng = np.random.default_rng(seed)
        adj = (rng.uniform(size=(n, n)) < 0.4) * rng.uniform(0.1, scale, (n, n))
        np.fill_diagonal(adj, 0.0)
        b = (rng.uniform(size=n) < 0.5) * rng.uniform(0.1, scale, n)
        report = check_assumptions(Topology(adjacency=adj, leader_weights=b))
        if report.leader_pinned and report.all_reachable:
            assert report.min_singular_value > SINGULAR_VALUE_TOL
