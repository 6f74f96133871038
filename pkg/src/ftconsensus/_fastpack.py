"""Adapter between :mod:`simulate` and the compiled kernel."""

import numpy as np

from . import _packed
from .adaptation import P_EXPONENT, Q_EXPONENT
from .simulate import (DIVERGENCE_GUARD, IntegrationError, SimulationConfig,
                       StateLayout, make_bases)


def _state_tuple(t: "_packed.PackedStateTerms"):
    return (t.ptr, t.coef, t.u, t.mu, t.trig, t.v, t.a, t.ph, t.mt)


def _time_tuple(t: "_packed.PackedTimeTerms"):
    return (t.ptr, t.coef, t.mu, t.trig, t.a, t.ph, t.mt)


def build_kernel_params(config: SimulationConfig, layout: StateLayout) -> dict:
    bases_ca, bases_theta = make_bases(config)
    n, M, Mt = layout.n, layout.M, layout.Mt

    fterms, dterms = _packed.pack_models(config.follower_models, n)
    if layout.n_leader:
        lf, ld = _packed.pack_models([config.leader_model], layout.n_leader)
    else:
        lf = _packed.PackedStateTerms.from_layers([()])
        ld = _packed.PackedTimeTerms.from_signals([])
    rterms = _packed.pack_reference(config.leader_path)

    gains = _packed.pack_gains(config.gains)
    gain_order = ("k", "kp", "kq", "sigma_1c", "sigma_2c", "sigma_3c",
                  "sigma_1a", "sigma_2a", "sigma_3a", "sigma_1th", "sigma_2th",
                  "sigma_1d", "sigma_2d", "gamma_c", "gamma_a", "gamma_th",
                  "gamma_d")

    mode = {"passive": 0, "active": 1, "reference": 2}[config.leader_mode]
    th_dim = np.array([b.input_dim for b in bases_theta], dtype=np.int32)
    return {
        "N": layout.N, "n": n, "M": M, "Mt": Mt, "nl": layout.n_leader,
        "leader_mode": mode, "dt": config.dt,
        "p": config.gains.p, "q": config.gains.q,
        "guard": DIVERGENCE_GUARD,
        "pd_kp": float(config.pd_gains[0]), "pd_kd": float(config.pd_gains[1]),
        "A": np.ascontiguousarray(config.topology.adjacency),
        "b": np.ascontiguousarray(config.topology.leader_weights),
        "g": np.ascontiguousarray(config.topology.in_degree),
        "fterms": _state_tuple(fterms), "dterms": _time_tuple(dterms),
        "lfterms": _state_tuple(lf), "ldterms": _time_tuple(ld),
        "rterms": _time_tuple(rterms),
        "ca_c": np.ascontiguousarray(np.stack([b.centers[:, 0] for b in bases_ca])),
        "ca_w": np.ascontiguousarray(np.stack([b.widths for b in bases_ca])),
        "th_c": np.ascontiguousarray(np.stack([b.centers[:, 0] for b in bases_theta])),
        "th_w": np.ascontiguousarray(np.stack([b.widths for b in bases_theta])),
        "th_dim": th_dim,
        "gains": tuple(gains[name] for name in gain_order),
        "weights_base": layout.weights_base, "block": layout.block,
        "size": layout.size, "chi_max": int(th_dim.max()),
    }


def run_compiled(config: SimulationConfig, layout: StateLayout, v0: np.ndarray,
                 nsteps: int, rec: np.ndarray, trace) -> None:
    from . import _fastloop

    record = {
        "t": trace.t, "y0": trace.y0, "y": trace.y, "e": trace.e,
        "u": trace.u, "z": trace.z, "alpha": trace.alpha,
        "wc": trace.wc_norm, "wa": trace.wa_norm, "th": trace.th_norm,
        "dh": trace.dh,
    }
    net = _fastloop.Net(build_kernel_params(config, layout), record)
    v = v0.copy()
    failure = net.run(v, nsteps, np.ascontiguousarray(rec, dtype=np.int64))
    if failure is not None:
        t, idx = failure
        raise IntegrationError(
            f"state diverged at t = {t:.6g}: component {layout.describe(idx)}",
            t=t, component=layout.describe(int(idx)),
        )
