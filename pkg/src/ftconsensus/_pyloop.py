"""Pure-Python simulation kernel.

Readable fallback built directly from the reference modules (controller
cascade, adaptation laws, plant dynamics).  The compiled kernel must
match this loop bit-for-bit up to floating-point associativity; a parity
test holds the two together.
"""

import numpy as np

from . import adaptation, dynamics
from .controller import AgentController
from .simulate import (DIVERGENCE_GUARD, IntegrationError, SimulationConfig,
                       StateLayout, make_bases, rk4_step)


class _System:
    """Derivative and logging closures over a prepared configuration."""

    def __init__(self, config: SimulationConfig, layout: StateLayout):
        self.config = config
        self.layout = layout
        bases_ca, bases_theta = make_bases(config)
        topo = config.topology
        self.adj = topo.adjacency
        self.b = topo.leader_weights
        g = topo.in_degree
        self.controllers = [
            AgentController(g[i], config.gains, bases_ca, bases_theta)
            for i in range(layout.N)
        ]
        self.neighbors = [
            [(float(self.adj[i, l]), l) for l in range(layout.N) if self.adj[i, l] > 0]
            for i in range(layout.N)
        ]

    def leader_output(self, t: float, v: np.ndarray) -> float:
        if self.layout.n_leader:
            return float(v[0])
        return self.config.leader_path.output(t)

    def cascades(self, t: float, v: np.ndarray):
        """Evaluate every follower's cascade against a synchronous output snapshot."""
        layout = self.layout
        y0 = self.leader_output(t, v)
        outputs = [float(v[layout.follower_slice(i)][0]) for i in range(layout.N)]
        result = []
        for i in range(layout.N):
            x = v[layout.follower_slice(i)]
            weights = [layout.get_weights(v, i, j) for j in range(1, layout.n + 1)]
            cas = self.controllers[i].control(
                x, weights,
                [(a, outputs[l]) for a, l in self.neighbors[i]],
                leader_output=y0, leader_weight=float(self.b[i]),
            )
            result.append((cas, weights))
        return y0, result

    def derivative(self, t: float, v: np.ndarray) -> np.ndarray:
        config, layout = self.config, self.layout
        dv = np.zeros_like(v)
        y0, cascades = self.cascades(t, v)

        for i in range(layout.N):
            cas, weights = cascades[i]
            x = v[layout.follower_slice(i)]
            model = config.follower_models[i]
            dv[layout.follower_slice(i)] = dynamics.derivative(
                model, dynamics.AgentState(x), cas.u, t
            )
            for j in range(1, layout.n + 1):
                err = self.controllers[i].learning_signal(cas, j)
                w = weights[j - 1]
                S = _step_activations(self.controllers[i], cas, x, w, weights, j)
                o = layout.weight_offset(i, j)
                M, Mt = layout.M, layout.Mt
                dv[o:o + M] = adaptation.critic_rate(w, S[0], err, config.gains, j)
                dv[o + M:o + 2 * M] = adaptation.actor_rate(w, S[0], config.gains, j)
                dv[o + 2 * M:o + 2 * M + Mt] = adaptation.theta_rate(
                    w.theta, S[1], err, config.gains, j
                )
                dv[o + 2 * M + Mt] = adaptation.dist_rate(w.dist, err, config.gains, j)

        if layout.n_leader:
            model = config.leader_model
            state = dynamics.AgentState(v[: layout.n_leader])
            if config.leader_mode == "active":
                kp, kd = config.pd_gains
                u0 = dynamics.pd_leader_control(model, state, config.leader_path,
                                                t, kp=kp, kd=kd)
            else:
                u0 = 0.0
            dv[: layout.n_leader] = dynamics.derivative(model, state, u0, t)
        return dv

    def log(self, row: int, t: float, v: np.ndarray, trace):
        layout = self.layout
        y0, cascades = self.cascades(t, v)
        trace.t[row] = t
        trace.y0[row] = y0
        for i in range(layout.N):
            cas, weights = cascades[i]
            trace.y[row, i] = v[layout.follower_slice(i)][0]
            trace.e[row, i] = cas.e
            trace.z[row, i, :] = cas.z
            trace.alpha[row, i, :] = cas.alpha
            trace.u[row, i] = cas.u
            for j in range(layout.n):
                w = weights[j]
                trace.wc_norm[row, i, j] = np.linalg.norm(w.critic)
                trace.wa_norm[row, i, j] = np.linalg.norm(w.actor)
                trace.th_norm[row, i, j] = np.linalg.norm(w.theta)
                trace.dh[row, i, j] = w.dist


def _step_activations(controller, cas, x, w, weights, j):
    """Critic/actor and estimator activations of step j for the rate laws."""
    from .controller import assemble_chi
    from .rbfnet import activations

    if j == 1:
        S = activations(controller.bases_ca[0], np.array([cas.e]))
        phi = activations(controller.bases_theta[0], np.array([x[0]]))
    else:
        S = activations(controller.bases_ca[j - 1], np.array([cas.z[j - 1]]))
        chi = assemble_chi(x[:j], weights[: j - 1])
        phi = activations(controller.bases_theta[j - 1], chi)
    return S, phi


def run_python(config: SimulationConfig, layout: StateLayout, v0: np.ndarray,
               nsteps: int, rec: np.ndarray, trace) -> None:
    system = _System(config, layout)
    v = v0.copy()
    rec_set = {int(i): r for r, i in enumerate(rec)}
    dt = config.dt
    for step in range(nsteps + 1):
        t = step * dt
        _check_guard(v, t, layout)
        if step in rec_set:
            system.log(rec_set[step], t, v, trace)
        if step < nsteps:
            v = rk4_step(system.derivative, v, t, dt)


def _check_guard(v: np.ndarray, t: float, layout: StateLayout):
    bad = ~np.isfinite(v) | (np.abs(v) > DIVERGENCE_GUARD)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise IntegrationError(
            f"state diverged at t = {t:.6g}: component {layout.describe(idx)} "
            f"= {v[idx]:.3g}",
            t=t, component=layout.describe(idx),
        )
