"""Strict-feedback plant dynamics for the leader and the followers.

Each agent is a cascade of ``n`` scalar layers

    xdot_k = x_{k+1} + f_k(x_1..x_k) + d_k(t)      (k < n)
    xdot_n = u + f_n(x_1..x_n) + d_n(t)

with output ``y = x_1``.  Layer nonlinearities are represented as sums of
closed-form terms ``coef * x_u^m * trig(a*x_v + phase)^m_t`` so that both
the reference evaluator here and the compiled simulation kernel walk the
same tables.  Disturbances and reference paths are time signals of the
analogous form ``coef * t^m * trig(a*t + phase)^m_t``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

_TRIG = {None: 0, "sin": 1, "cos": 2}


class DimensionError(ValueError):
    """Raised on state-vector / layer-count mismatches."""


@dataclass(frozen=True)
class StateTerm:
    """One closed-form term of a layer nonlinearity f_k(x_1..x_k).

    Evaluates to ``coef * x[var]^power * trig(freq*x[trig_var] + phase)^trig_power``
    where ``var``/``trig_var`` are 1-based state indices and 0 disables the
    corresponding factor.
    """

    coef: float
    var: int = 0
    power: int = 1
    trig: str | None = None
    trig_var: int = 0
    freq: float = 1.0
    phase: float = 0.0
    trig_power: int = 1

    def __post_init__(self):
        if self.trig not in _TRIG:
            raise ValueError(f"trig must be None, 'sin' or 'cos', got {self.trig!r}")
        if self.trig is not None and self.trig_var < 1:
            raise ValueError("trig terms need a 1-based trig_var state index")

    def max_state_index(self) -> int:
        return max(self.var, self.trig_var if self.trig else 0)

    def __call__(self, x) -> float:
        v = self.coef
        if self.var:
            v *= x[self.var - 1] ** self.power
        if self.trig:
            fn = math.sin if self.trig == "sin" else math.cos
            v *= fn(self.freq * x[self.trig_var - 1] + self.phase) ** self.trig_power
        return v


@dataclass(frozen=True)
class TimeTerm:
    """One closed-form term of a time signal: ``coef * t^power * trig(freq*t + phase)^trig_power``."""

    coef: float
    power: int = 0
    trig: str | None = None
    freq: float = 1.0
    phase: float = 0.0
    trig_power: int = 1

    def __post_init__(self):
        if self.trig not in _TRIG:
            raise ValueError(f"trig must be None, 'sin' or 'cos', got {self.trig!r}")
        if self.power < 0:
            raise ValueError("polynomial power must be non-negative")

    def __call__(self, t: float) -> float:
        v = self.coef * t**self.power
        if self.trig:
            fn = math.sin if self.trig == "sin" else math.cos
            v *= fn(self.freq * t + self.phase) ** self.trig_power
        return v

    def derivative_terms(self) -> tuple:
        """Product-rule expansion; only trig_power in {0, 1} is supported."""
        if self.trig is not None and self.trig_power != 1:
            raise NotImplementedError("derivative of trig powers > 1 not needed")
        out = []
        if self.power > 0:
            out.append(replace(self, coef=self.coef * self.power, power=self.power - 1))
        if self.trig == "sin":
            out.append(replace(self, coef=self.coef * self.freq, trig="cos"))
        elif self.trig == "cos":
            out.append(replace(self, coef=-self.coef * self.freq, trig="sin"))
        return tuple(out)


@dataclass(frozen=True)
class Signal:
    """Sum of :class:`TimeTerm`; supports exact differentiation."""

    terms: tuple = ()

    def __call__(self, t: float) -> float:
        return sum(term(t) for term in self.terms)

    def derivative(self) -> "Signal":
        out = []
        for term in self.terms:
            out.extend(term.derivative_terms())
        return Signal(tuple(out))

    def bound(self, horizon: float, samples: int = 4001) -> float:
        """Dense-sampling estimate of sup |signal| over [0, horizon]."""
        ts = np.linspace(0.0, horizon, samples)
        return float(max(abs(self(t)) for t in ts))


ZERO_SIGNAL = Signal()


@dataclass(frozen=True)
class ReferenceSignal:
    """Analytic leader path: output plus its first two derivatives."""

    output: Signal
    rate: Signal
    accel: Signal

    @classmethod
    def from_output(cls, output: Signal) -> "ReferenceSignal":
        d1 = output.derivative()
        return cls(output=output, rate=d1, accel=d1.derivative())


@dataclass(frozen=True)
class StrictFeedbackModel:
    """Layer nonlinearities and disturbance signals of one agent."""

    layer_fns: tuple          # per layer: tuple of StateTerm
    disturbances: tuple       # per layer: Signal
    name: str = ""
    disturbance_bounds: tuple = field(default=None)      # per layer: |d_k| bound
    disturbance_rate_bounds: tuple = field(default=None)  # per layer: |d_k'| bound

    def __post_init__(self):
        if len(self.layer_fns) != len(self.disturbances):
            raise DimensionError("layer_fns and disturbances must have equal length")
        for k, terms in enumerate(self.layer_fns, start=1):
            for term in terms:
                if term.max_state_index() > k:
                    raise DimensionError(
                        f"layer {k} of {self.name or 'model'} reads state "
                        f"{term.max_state_index()}: violates strict-feedback structure"
                    )

    @property
    def n_layers(self) -> int:
        return len(self.layer_fns)

    def layer_value(self, k: int, x) -> float:
        """f_k evaluated on the first k states (1-based k)."""
        return sum(term(x) for term in self.layer_fns[k - 1])

    def estimated_bounds(self, horizon: float) -> tuple:
        """(|d_k| bounds, |d_k'| bounds); declared values win over sampling."""
        d_bounds = self.disturbance_bounds
        r_bounds = self.disturbance_rate_bounds
        if d_bounds is None:
            d_bounds = tuple(sig.bound(horizon) for sig in self.disturbances)
        if r_bounds is None:
            r_bounds = tuple(sig.derivative().bound(horizon) for sig in self.disturbances)
        return d_bounds, r_bounds


@dataclass(frozen=True)
class AgentState:
    """Layer states of one agent; the output is always the first state."""

    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))

    @property
    def output(self) -> float:
        return float(self.x[0])


def derivative(model: StrictFeedbackModel, state: AgentState, control: float, t: float) -> np.ndarray:
    """Evaluate the strict-feedback cascade xdot for one agent."""
    n = model.n_layers
    x = state.x
    if x.shape != (n,):
        raise DimensionError(f"state has shape {x.shape}, model expects ({n},)")
    dx = np.empty(n)
    for k in range(1, n + 1):
        drive = x[k] if k < n else control
        dx[k - 1] = drive + model.layer_value(k, x) + model.disturbances[k - 1](t)
    return dx


def _example2_layers(i: int) -> tuple:
    """Example-2 follower nonlinearities for agent i (1-based)."""
    a = [1.5, -0.8, 0.6, -1.3][i - 1]
    b = [-0.8, 0.4, -0.7, 0.8][i - 1]
    c = [0.7, 1.4, -1.5, -1.2][i - 1]
    d = [0.5, -0.6, 1.1, -1.9][i - 1]
    layer1 = (
        StateTerm(coef=-a, trig="cos", trig_var=1, trig_power=2),
        StateTerm(coef=b, trig="sin", trig_var=1),
    )
    layer2 = (
        StateTerm(coef=-c, var=2, trig="sin", trig_var=1),
        StateTerm(coef=d, trig="cos", trig_var=2),
    )
    return (layer1, layer2)


def builtin_model(name: str, index: int | None = None):
    """Return a shipped model (or reference signal) by name.

    Known names: ``example1_leader``, ``example1_follower``,
    ``example2_follower`` (index 1..4), ``example3_follower`` (index 1..4),
    ``example2_leader_reference``.  An index suffix like
    ``example2_follower_3`` is also accepted.
    """
    if index is None:
        for prefix in ("example2_follower", "example3_follower"):
            if name.startswith(prefix + "_"):
                name, index = prefix, int(name[len(prefix) + 1:])

    if name == "example1_leader":
        return StrictFeedbackModel(
            layer_fns=((), (StateTerm(coef=50.0, trig="sin", trig_var=2),)),
            disturbances=(ZERO_SIGNAL, Signal((TimeTerm(coef=1.0, trig="cos"),))),
            name=name,
        )
    if name == "example1_follower":
        return StrictFeedbackModel(
            layer_fns=((), (StateTerm(coef=50.0, trig="sin", trig_var=2),)),
            disturbances=(
                ZERO_SIGNAL,
                Signal((TimeTerm(coef=2.0, trig="sin"), TimeTerm(coef=2.0))),
            ),
            name=name,
        )
    if name == "example2_follower":
        if index is None or not 1 <= index <= 4:
            raise KeyError("example2_follower requires index 1..4")
        return StrictFeedbackModel(
            layer_fns=_example2_layers(index),
            disturbances=(ZERO_SIGNAL, ZERO_SIGNAL),
            name=f"{name}_{index}",
        )
    if name == "example3_follower":
        if index is None or not 1 <= index <= 4:
            raise KeyError("example3_follower requires index 1..4")
        return StrictFeedbackModel(
            layer_fns=_example2_layers(index),
            disturbances=(
                Signal((TimeTerm(coef=1.0, trig="sin"),)),
                Signal((TimeTerm(coef=1.0, trig="cos", freq=0.5),)),
            ),
            name=f"{name}_{index}",
        )
    if name == "example2_leader_reference":
        return ReferenceSignal.from_output(Signal((TimeTerm(coef=2.0, trig="cos", freq=0.6),)))
    if name == "example1_leader_path":
        # Desired path for the active-leader scenario of Example 1.
        return ReferenceSignal.from_output(
            Signal((TimeTerm(coef=10.0, trig="sin", freq=2.0 * math.pi / 5.0),))
        )
    raise KeyError(f"unknown builtin model {name!r}")


def pd_leader_control(model: StrictFeedbackModel, state: AgentState,
                      path: ReferenceSignal, t: float,
                      kp: float = 20.0, kd: float = 10.0) -> float:
    """Computed-torque law driving a 2-layer leader onto an analytic path.

    Feedback linearization of the last layer plus PD feedback on the path
    error; the followers never see this input.
    """
    if model.n_layers != 2:
        raise DimensionError("PD leader law is defined for 2-layer leaders")
    x = state.x
    err = path.output(t) - x[0]
    err_rate = path.rate(t) - x[1]
    return path.accel(t) + kd * err_rate + kp * err - model.layer_value(2, x)
