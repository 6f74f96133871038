"""Communication graph of the leader-follower network.

The followers exchange outputs over a weighted directed graph with
adjacency matrix ``A = [a_il]`` (``a_il > 0`` means follower ``i`` hears
follower ``l``).  Pinning weights ``b_i >= 0`` couple individual followers
directly to the leader.  The in-degree Laplacian ``L = diag(row sums) - A``
and the pinned Laplacian ``L_tilde = L + diag(b)`` tie the consensus error
``e`` to the tracking error ``z1`` through ``e = L_tilde @ z1``; consensus
is achievable exactly when ``L_tilde`` is invertible, which holds whenever
the graph contains a spanning tree rooted at the leader.
"""

from dataclasses import dataclass, field

import numpy as np

# Invertibility floor for the smallest singular value of L_tilde
# (double-precision noise with margin).
SINGULAR_VALUE_TOL = 1e-12


class TopologyError(ValueError):
    """Raised for structurally invalid communication graphs."""


@dataclass(frozen=True)
class Topology:
    """Weighted directed follower graph plus leader pinning weights."""

    adjacency: np.ndarray
    leader_weights: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=float)
        b = np.asarray(self.leader_weights, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise TopologyError(f"adjacency must be square, got shape {adj.shape}")
        if b.shape != (adj.shape[0],):
            raise TopologyError(
                f"leader_weights length {b.shape} does not match {adj.shape[0]} followers"
            )
        if np.any(adj < 0):
            raise TopologyError("adjacency weights must be non-negative")
        if np.any(np.diag(adj) != 0):
            raise TopologyError("adjacency diagonal must be zero (no self-loops)")
        if np.any(b < 0):
            raise TopologyError("leader pinning weights must be non-negative")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "leader_weights", b)

    @property
    def n_followers(self) -> int:
        return self.adjacency.shape[0]

    @property
    def in_degree(self) -> np.ndarray:
        """g_i = sum_l a_il + b_i, the total information in-flow per follower."""
        return self.adjacency.sum(axis=1) + self.leader_weights


@dataclass(frozen=True)
class LaplacianBundle:
    """Laplacian quantities derived from a :class:`Topology`."""

    laplacian: np.ndarray
    ltilde: np.ndarray
    in_degree: np.ndarray
    min_singular_value: float


def build_laplacian(topology: Topology) -> LaplacianBundle:
    """Compute L = D - A, L_tilde = L + diag(b), and the smallest singular value.

    The smallest singular value (rather than eigenvalue) of L_tilde is used so
    the quantity stays real and non-negative for directed (non-symmetric)
    graphs.
    """
    adj = topology.adjacency
    laplacian = np.diag(adj.sum(axis=1)) - adj
    ltilde = laplacian + np.diag(topology.leader_weights)
    sigma = float(np.linalg.svd(ltilde, compute_uv=False)[-1]) if adj.size else 0.0
    return LaplacianBundle(
        laplacian=laplacian,
        ltilde=ltilde,
        in_degree=topology.in_degree,
        min_singular_value=sigma,
    )


@dataclass(frozen=True)
class TopologyReport:
    """Per-check validation result for the structural graph assumptions."""

    leader_pinned: bool
    all_reachable: bool
    ltilde_invertible: bool
    min_singular_value: float
    unreachable: tuple = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return self.leader_pinned and self.all_reachable and self.ltilde_invertible


def _reachable_from_leader(topology: Topology) -> np.ndarray:
    """BFS over directed edges l -> i (a_il > 0) from the virtual leader node."""
    n = topology.n_followers
    reached = np.zeros(n, dtype=bool)
    frontier = [i for i in range(n) if topology.leader_weights[i] > 0]
    reached[frontier] = True
    while frontier:
        nxt = []
        for l in frontier:
            for i in range(n):
                if topology.adjacency[i, l] > 0 and not reached[i]:
                    reached[i] = True
                    nxt.append(i)
        frontier = nxt
    return reached


def check_assumptions(topology: Topology) -> TopologyReport:
    """Validate the spanning-tree-rooted-at-leader assumption.

    Checks (a) at least one follower is pinned (sum b_i > 0), (b) every
    follower is reachable from the leader through directed edges, and (c)
    L_tilde is numerically invertible.
    """
    pinned = bool(topology.leader_weights.sum() > 0)
    reached = _reachable_from_leader(topology)
    bundle = build_laplacian(topology)
    return TopologyReport(
        leader_pinned=pinned,
        all_reachable=bool(reached.all()),
        ltilde_invertible=bundle.min_singular_value > SINGULAR_VALUE_TOL,
        min_singular_value=bundle.min_singular_value,
        unreachable=tuple(int(i) for i in np.flatnonzero(~reached)),
    )
