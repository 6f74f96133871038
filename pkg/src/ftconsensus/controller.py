"""Distributed backstepping control cascade of one follower.

Each follower sees only its own full state, its own adaptation weights,
the outputs of its graph neighbors, and (when pinned) the leader output.
Step 1 shapes the consensus error e_i; every later step j shapes the
virtual error z_ij = x_ij - alpha_i(j-1); the layer-n policy is the
actual control input.  Virtual-control derivatives are never computed
analytically: the terms they would contribute are folded into the
unknown function that the theta-network estimates from the truncated
input chi_ij.
"""

from dataclasses import dataclass

import numpy as np

from .adaptation import ControllerGains, StepWeights, signed_pow
from .rbfnet import RbfBasis, activations


class ControllerError(ValueError):
    """Raised for structurally impossible controller evaluations."""


def consensus_error(own_output: float, neighbor_outputs, leader_link=None) -> float:
    """e_i = sum_l a_il (y_i - y_l) + b_i (y_i - y_0).

    ``neighbor_outputs`` is an iterable of (weight, output) pairs;
    ``leader_link`` is (b_i, y_0) or None for unpinned followers.
    """
    e = 0.0
    for a, y_l in neighbor_outputs:
        if a < 0:
            raise ControllerError("neighbor weights must be non-negative")
        e += a * (own_output - y_l)
    if leader_link is not None:
        b, y0 = leader_link
        if b > 0 and y0 is None:
            raise ControllerError("pinned follower requires the leader output")
        if b > 0:
            e += b * (own_output - y0)
    return e


def virtual_control_step1(e: float, weights: StepWeights, g: float,
                          gains: ControllerGains, basis_ca: RbfBasis,
                          basis_theta: RbfBasis, x1: float) -> float:
    """alpha_i1 = optimal part + fixed-time part, both scaled by 1/g_i."""
    if g <= 0:
        raise ControllerError("step 1 requires positive in-degree g_i")
    gn = gains.step(1)
    S = activations(basis_ca, np.array([e]))
    phi = activations(basis_theta, np.array([x1]))
    v_opt = -(gn.k / g) * e - (weights.actor @ S) / g
    h = (
        -gn.kp * signed_pow(e, gains.p)
        - gn.kq * signed_pow(e, gains.q)
        - weights.theta @ phi
        - weights.dist
    ) / g
    return float(v_opt + h)


def virtual_control_stepj(z: float, weights: StepWeights, chi: np.ndarray,
                          z_prev_r: float, gains: ControllerGains, step: int,
                          basis_ca: RbfBasis, basis_theta: RbfBasis) -> float:
    """alpha_ij for j >= 2; for j = n this is the actual input u_i.

    ``z_prev_r`` is the coupling cancellation term: g_i * e_i when j = 2,
    z_i(j-1) when j >= 3.
    """
    if step < 2:
        raise ControllerError("use virtual_control_step1 for the first step")
    gn = gains.step(step)
    S = activations(basis_ca, np.array([z]))
    phi = activations(basis_theta, chi)
    return float(
        -gn.k * z
        - weights.actor @ S
        - gn.kp * signed_pow(z, gains.p)
        - gn.kq * signed_pow(z, gains.q)
        - weights.theta @ phi
        - weights.dist
        - z_prev_r
    )


def assemble_chi(own_states, prior_weights) -> np.ndarray:
    """Truncated estimator input of step j: the first j own states followed
    by critic, actor, theta weights and the disturbance estimate of every
    prior step, in that order."""
    parts = [np.asarray(own_states, dtype=float).ravel()]
    for w in prior_weights:
        parts.append(np.asarray(w.critic, dtype=float).ravel())
    for w in prior_weights:
        parts.append(np.asarray(w.actor, dtype=float).ravel())
    for w in prior_weights:
        parts.append(np.asarray(w.theta, dtype=float).ravel())
    for w in prior_weights:
        parts.append(np.array([w.dist]))
    return np.concatenate(parts) if parts else np.empty(0)


@dataclass(frozen=True)
class ControlCascade:
    """Full per-tick record of one follower's backstepping stack."""

    e: float
    z: tuple       # z_i1 .. z_in  (z_i1 = y_i - y_0 requires leader output)
    alpha: tuple   # alpha_i1 .. alpha_in
    u: float


class AgentController:
    """Per-agent controller: static topology info, gains, and bases.

    ``bases_ca[j-1]`` is the scalar-input critic/actor basis of step j;
    ``bases_theta[j-1]`` the estimator basis (input x_i1 at step 1, the
    truncated input chi_ij at step j >= 2).
    """

    def __init__(self, g: float, gains: ControllerGains, bases_ca, bases_theta):
        if len(bases_ca) != len(bases_theta):
            raise ControllerError("need one critic/actor and one theta basis per step")
        self.g = float(g)
        self.gains = gains
        self.bases_ca = tuple(bases_ca)
        self.bases_theta = tuple(bases_theta)
        self.n_steps = len(bases_ca)

    def control(self, x, weights, neighbor_outputs, leader_output=None,
                leader_weight: float = 0.0) -> ControlCascade:
        """Run the cascade e_i -> alpha_i1 -> z_i2 -> ... -> u_i.

        Reads nothing from the network beyond neighbor outputs and, if
        pinned, the leader output.
        """
        x = np.asarray(x, dtype=float)
        n = self.n_steps
        if x.shape != (n,):
            raise ControllerError(f"state has shape {x.shape}, expected ({n},)")
        if len(weights) != n:
            raise ControllerError(f"need {n} StepWeights, got {len(weights)}")

        link = (leader_weight, leader_output) if leader_weight > 0 else None
        e = consensus_error(float(x[0]), neighbor_outputs, link)

        z = np.empty(n)
        alpha = np.empty(n)
        z[0] = (x[0] - leader_output) if leader_output is not None else np.nan
        alpha[0] = virtual_control_step1(
            e, weights[0], self.g, self.gains,
            self.bases_ca[0], self.bases_theta[0], float(x[0]),
        )
        for j in range(2, n + 1):
            z[j - 1] = x[j - 1] - alpha[j - 2]
            z_prev_r = self.g * e if j == 2 else z[j - 2]
            chi = assemble_chi(x[:j], weights[: j - 1])
            alpha[j - 1] = virtual_control_stepj(
                float(z[j - 1]), weights[j - 1], chi, float(z_prev_r),
                self.gains, j, self.bases_ca[j - 1], self.bases_theta[j - 1],
            )
        return ControlCascade(e=e, z=tuple(z), alpha=tuple(alpha), u=float(alpha[-1]))

    def learning_signal(self, cascade: ControlCascade, step: int) -> float:
        """Adaptation error signal: e_i at step 1, z_ij at later steps."""
        return cascade.e if step == 1 else cascade.z[step - 1]
