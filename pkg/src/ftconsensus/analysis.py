"""Post-processing: settling times, fixed-time bounds, convergence radii,
Lyapunov diagnostics, and simulator-side truth oracles for the estimators."""

import math
from dataclasses import dataclass

import numpy as np

NOT_SETTLED = "not settled"


@dataclass(frozen=True)
class FixedTimeBound:
    """Settling-time bound 1/(kp(1-p)) + 1/(kq(q-1)) and its inputs."""

    t_max: float
    k_p_eff: float
    k_q_eff: float
    p: float
    q: float


@dataclass(frozen=True)
class ConvergenceRadii:
    omega_e: float
    omega_z: float
    c_aggregate: float
    vartheta: float


def tmax_bound(k_p: float, k_q: float, p: float, q: float) -> FixedTimeBound:
    """Settling-time upper bound of a flow dV <= -k_p V^p - k_q V^q.

    Exponents are explicit because the aggregated analysis admits two
    parameterizations: the raw (p, q) of the feedback powers and the
    Lyapunov-level ((p+1)/2, (q+1)/2).
    """
    if k_p <= 0 or k_q <= 0:
        raise ValueError("gains must be positive")
    if not (p < 1 < q):
        raise ValueError("need p < 1 < q")
    t = 1.0 / (k_p * (1.0 - p)) + 1.0 / (k_q * (q - 1.0))
    return FixedTimeBound(t_max=t, k_p_eff=k_p, k_q_eff=k_q, p=p, q=q)


def aggregate_kp_kq(gains, n_agents: int) -> tuple:
    """Network-level (k_p, k_q) built from the per-step feedback gains.

    k_p = 2^((p+1)/2) min kp_ik and
    k_q = 2^((q+1)/2) (nN)^(1-(q+1)/2) min kq_ik.
    """
    p, q = gains.p, gains.q
    nN = gains.n_steps * n_agents
    kp_min = min(g.kp for g in gains.steps)
    kq_min = min(g.kq for g in gains.steps)
    k_p = 2.0 ** ((p + 1.0) / 2.0) * kp_min
    k_q = 2.0 ** ((q + 1.0) / 2.0) * nN ** (1.0 - (q + 1.0) / 2.0) * kq_min
    return k_p, k_q


def settling_time(trace, threshold: float):
    """Per-agent first time after which |y_i - y_0| stays below threshold.

    Returns a list with one entry per follower: a float, or the string
    "not settled" when the error re-exceeds the threshold to the end of
    the horizon.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    err = np.abs(trace.tracking_error)
    out = []
    for i in range(err.shape[1]):
        above = err[:, i] >= threshold
        if not above.any():
            out.append(float(trace.t[0]))
            continue
        last = int(np.flatnonzero(above)[-1])
        if last == len(trace.t) - 1:
            out.append(NOT_SETTLED)
        else:
            out.append(float(trace.t[last + 1]))
    return out


def omega_radii(c: float, k_p: float, k_q: float, p: float, q: float,
                vartheta: float, lambda_min: float) -> ConvergenceRadii:
    """Terminal neighborhood radii for the consensus and tracking errors."""
    if not 0 < vartheta < 1:
        raise ValueError("vartheta must lie in (0, 1)")
    if k_p <= 0 or k_q <= 0 or lambda_min <= 0:
        raise ValueError("gains and lambda_min must be positive")
    if c < 0:
        raise ValueError("aggregate constant must be non-negative")
    inner = min(
        (c / ((1.0 - vartheta) * k_p)) ** p,
        (c / ((1.0 - vartheta) * k_q)) ** q,
    )
    omega_e = math.sqrt(2.0 * inner)
    return ConvergenceRadii(omega_e=omega_e, omega_z=omega_e / lambda_min,
                            c_aggregate=c, vartheta=vartheta)


def lyapunov_diagnostic(trace, proxy_ideal=None) -> np.ndarray:
    """Candidate network Lyapunov series V(t) built from trace quantities.

    Ideal weights are unknowable; the gaps use a proxy (default: the
    trace-final weight norms), so the series is a soft diagnostic, not a
    certificate.  Uses the recorded norms rather than raw weight vectors,
    which upper-envelopes the same decay behavior.
    """
    gains = trace.config.gains
    R, N, n = trace.z.shape
    if proxy_ideal is None:
        proxy_ideal = {
            "wc": trace.wc_norm[-1], "wa": trace.wa_norm[-1],
            "th": trace.th_norm[-1], "dh": trace.dh[-1],
        }
    V = 0.5 * np.sum(trace.e**2, axis=1)
    V += 0.5 * np.nansum(trace.z[:, :, 1:] ** 2, axis=(1, 2))
    for j in range(n):
        g = gains.step(j + 1)
        V += 0.5 / g.gamma_c * np.sum((trace.wc_norm[:, :, j] - proxy_ideal["wc"][:, j]) ** 2, axis=1)
        V += 0.5 / g.gamma_a * np.sum((trace.wa_norm[:, :, j] - proxy_ideal["wa"][:, j]) ** 2, axis=1)
        V += 0.5 / g.gamma_th * np.sum((trace.th_norm[:, :, j] - proxy_ideal["th"][:, j]) ** 2, axis=1)
        V += 0.5 / g.gamma_d * np.sum((trace.dh[:, :, j] - proxy_ideal["dh"][:, j]) ** 2, axis=1)
    return V


def monotone_envelope_fraction(series: np.ndarray) -> float:
    """Fraction of samples where the running maximum stops growing."""
    run_max = np.maximum.accumulate(series)
    return float(np.mean(series[1:] <= run_max[:-1] + 1e-12))


def truth_oracle_F1(leader_state, follower_states, topology, leader_model,
                    follower_models, agent: int, t: float) -> tuple:
    """Simulator-side ground truth of the lumped step-1 unknowns.

    F_i1 = g_i f_i1 - sum_l a_il (x_l2 + f_l1) - b_i (x_02 + f_01) and
    D_i1 = g_i d_i1 - sum_l a_il d_l1 - b_i d_01.  Test-only: controllers
    never see these quantities.
    """
    adj = topology.adjacency
    b = topology.leader_weights
    g = topology.in_degree
    i = agent
    xs = np.asarray(follower_states, dtype=float)

    def f1(model, x):
        return model.layer_value(1, x)

    def d1(model, t):
        return model.disturbances[0](t)

    F = g[i] * f1(follower_models[i], xs[i])
    D = g[i] * d1(follower_models[i], t)
    for l in range(adj.shape[0]):
        if adj[i, l] > 0:
            F -= adj[i, l] * (xs[l][1] + f1(follower_models[l], xs[l]))
            D -= adj[i, l] * d1(follower_models[l], t)
    if b[i] > 0:
        x0 = np.asarray(leader_state, dtype=float)
        F -= b[i] * (x0[1] + f1(leader_model, x0))
        D -= b[i] * d1(leader_model, t)
    return float(F), float(D)


def summarize(trace, threshold: float = 0.1) -> dict:
    """Settling-time and bound summary for the JSON sidecar."""
    from .topology import build_laplacian

    gains = trace.config.gains
    k_p, k_q = aggregate_kp_kq(gains, trace.y.shape[1])
    bound = tmax_bound(k_p, k_q, gains.p, gains.q)
    bundle = build_laplacian(trace.config.topology)
    return {
        "settling_threshold": threshold,
        "settling_times": settling_time(trace, threshold),
        "tmax_bound": bound.t_max,
        "aggregate_k_p": k_p,
        "aggregate_k_q": k_q,
        "lambda_min_ltilde": bundle.min_singular_value,
        "final_max_tracking_error": float(np.max(np.abs(trace.tracking_error[-1]))),
    }
