"""Flat-array description of a configured closed-loop system.

Both simulation kernels (the Cython extension and the pure-Python
fallback) consume the same packed tables built here, so a parity test on
the two kernels exercises one shared system description.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import Signal, StrictFeedbackModel

_TRIG_CODE = {None: 0, "sin": 1, "cos": 2}


@dataclass
class PackedTimeTerms:
    """Row-indexed tables of time-signal terms (CSR-style)."""

    ptr: np.ndarray   # (rows+1,) int32
    coef: np.ndarray
    mu: np.ndarray    # int32, polynomial power of t
    trig: np.ndarray  # int32, 0 none / 1 sin / 2 cos
    a: np.ndarray
    ph: np.ndarray
    mt: np.ndarray    # int32, trig exponent

    @classmethod
    def from_signals(cls, signals) -> "PackedTimeTerms":
        ptr = [0]
        cols = {k: [] for k in ("coef", "mu", "trig", "a", "ph", "mt")}
        for sig in signals:
            for term in sig.terms:
                cols["coef"].append(term.coef)
                cols["mu"].append(term.power)
                cols["trig"].append(_TRIG_CODE[term.trig])
                cols["a"].append(term.freq)
                cols["ph"].append(term.phase)
                cols["mt"].append(term.trig_power)
            ptr.append(len(cols["coef"]))
        return cls(
            ptr=np.asarray(ptr, dtype=np.int32),
            coef=np.asarray(cols["coef"], dtype=float),
            mu=np.asarray(cols["mu"], dtype=np.int32),
            trig=np.asarray(cols["trig"], dtype=np.int32),
            a=np.asarray(cols["a"], dtype=float),
            ph=np.asarray(cols["ph"], dtype=float),
            mt=np.asarray(cols["mt"], dtype=np.int32),
        )


@dataclass
class PackedStateTerms:
    """Row-indexed tables of layer-nonlinearity terms."""

    ptr: np.ndarray
    coef: np.ndarray
    u: np.ndarray     # int32, 1-based polynomial state index, 0 none
    mu: np.ndarray    # int32
    trig: np.ndarray  # int32
    v: np.ndarray     # int32, 1-based trig-argument state index
    a: np.ndarray
    ph: np.ndarray
    mt: np.ndarray

    @classmethod
    def from_layers(cls, layer_lists) -> "PackedStateTerms":
        ptr = [0]
        cols = {k: [] for k in ("coef", "u", "mu", "trig", "v", "a", "ph", "mt")}
        for terms in layer_lists:
            for term in terms:
                cols["coef"].append(term.coef)
                cols["u"].append(term.var)
                cols["mu"].append(term.power)
                cols["trig"].append(_TRIG_CODE[term.trig])
                cols["v"].append(term.trig_var)
                cols["a"].append(term.freq)
                cols["ph"].append(term.phase)
                cols["mt"].append(term.trig_power)
            ptr.append(len(cols["coef"]))
        return cls(
            ptr=np.asarray(ptr, dtype=np.int32),
            coef=np.asarray(cols["coef"], dtype=float),
            u=np.asarray(cols["u"], dtype=np.int32),
            mu=np.asarray(cols["mu"], dtype=np.int32),
            trig=np.asarray(cols["trig"], dtype=np.int32),
            v=np.asarray(cols["v"], dtype=np.int32),
            a=np.asarray(cols["a"], dtype=float),
            ph=np.asarray(cols["ph"], dtype=float),
            mt=np.asarray(cols["mt"], dtype=np.int32),
        )


def pack_models(models, n_layers: int) -> tuple:
    """(state-term tables of f_ik, time-term tables of d_ik) over all agents."""
    layer_lists, dist_signals = [], []
    for model in models:
        assert isinstance(model, StrictFeedbackModel)
        for k in range(n_layers):
            layer_lists.append(model.layer_fns[k])
            dist_signals.append(model.disturbances[k])
    return PackedStateTerms.from_layers(layer_lists), PackedTimeTerms.from_signals(dist_signals)


def pack_reference(path) -> PackedTimeTerms:
    """Path output plus first and second derivative as three signal rows."""
    if path is None:
        zero = Signal()
        return PackedTimeTerms.from_signals([zero, zero, zero])
    return PackedTimeTerms.from_signals([path.output, path.rate, path.accel])


def pack_gains(gains) -> dict:
    """Per-step gain vectors keyed by field name."""
    names = ("k", "kp", "kq", "sigma_1c", "sigma_2c", "sigma_3c",
             "sigma_1a", "sigma_2a", "sigma_3a", "sigma_1th", "sigma_2th",
             "sigma_1d", "sigma_2d", "gamma_c", "gamma_a", "gamma_th", "gamma_d")
    return {
        name: np.array([getattr(g, name) for g in gains.steps], dtype=float)
        for name in names
    }
