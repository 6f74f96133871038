"""Closed-loop co-integration of plant states and adaptation weights.

The whole network (leader states, follower states, and every agent's
critic/actor/estimator weights) is flattened into one real vector and
integrated with classical fixed-step RK4.  Disturbances are evaluated at
the RK4 substage times.  Two kernels implement the same loop: a Cython
extension for speed and a pure-Python fallback built directly from the
reference modules; ``kernel="auto"`` picks the compiled one when present.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _packed
from .adaptation import ControllerGains, StepWeights
from .controller import AgentController
from .dynamics import ReferenceSignal, StrictFeedbackModel
from .rbfnet import uniform_basis
from .topology import Topology, build_laplacian, check_assumptions

try:
    from . import _fastloop
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build
    _fastloop = None
    HAVE_COMPILED = False

DIVERGENCE_GUARD = 1e9


class IntegrationError(RuntimeError):
    """Integration failure with the offending time and state component."""

    def __init__(self, message: str, t: float = math.nan, component: str = ""):
        super().__init__(message)
        self.t = t
        self.component = component


@dataclass(frozen=True)
class BasisSpec:
    """Neuron count, center range, and width of one network role."""

    neurons: int = 3
    lo: float = -2.0
    hi: float = 2.0
    width: float = 1.0


@dataclass(frozen=True)
class SimulationConfig:
    topology: Topology
    follower_models: tuple
    gains: ControllerGains
    leader_model: StrictFeedbackModel | None = None
    leader_mode: str = "passive"            # passive | active | reference
    leader_path: ReferenceSignal | None = None
    basis_ca: BasisSpec = field(default_factory=BasisSpec)
    basis_theta: BasisSpec = field(default_factory=BasisSpec)
    dt: float = 1e-3
    horizon: float = 5.0
    stride: int = 10
    x0_leader: tuple = ()
    x0_followers: tuple = ()
    ic_scale: float = 1.0
    pd_gains: tuple = (20.0, 10.0)
    name: str = ""
    raw: dict | None = None

    def __post_init__(self):
        if self.dt <= 0 or self.dt >= self.horizon:
            raise ValueError("need 0 < dt < horizon")
        if self.stride < 1:
            raise ValueError("record stride must be >= 1")
        if self.leader_mode not in ("passive", "active", "reference"):
            raise ValueError(f"unknown leader mode {self.leader_mode!r}")
        if self.leader_mode == "reference":
            if self.leader_path is None:
                raise ValueError("reference leader mode needs a leader_path")
        elif self.leader_model is None:
            raise ValueError("dynamic leader modes need a leader_model")
        if self.leader_mode == "active" and self.leader_path is None:
            raise ValueError("active leader mode needs a leader_path")
        n = self.follower_models[0].n_layers
        for m in self.follower_models:
            if m.n_layers != n:
                raise ValueError("all followers must share the layer count")
        if len(self.follower_models) != self.topology.n_followers:
            raise ValueError("one model per follower required")
        if self.gains.n_steps != n:
            raise ValueError("gains must cover every backstepping step")

    @property
    def n_followers(self) -> int:
        return self.topology.n_followers

    @property
    def n_layers(self) -> int:
        return self.follower_models[0].n_layers


class StateLayout:
    """Index map of the flat simulation vector.

    Order: leader states (dynamic leader only), follower states row-major,
    then per agent and step the block [critic(M), actor(M), theta(Mt), dist].
    """

    def __init__(self, n_followers: int, n_layers: int, n_neurons: int,
                 n_theta: int, leader_layers: int):
        self.N = n_followers
        self.n = n_layers
        self.M = n_neurons
        self.Mt = n_theta
        self.n_leader = leader_layers
        self.block = 2 * n_neurons + n_theta + 1
        self.weights_base = leader_layers + n_followers * n_layers
        self.size = self.weights_base + n_followers * n_layers * self.block

    def follower_slice(self, i: int) -> slice:
        start = self.n_leader + i * self.n
        return slice(start, start + self.n)

    def weight_offset(self, i: int, step: int) -> int:
        """Start of the weight block of agent i (0-based), step (1-based)."""
        return self.weights_base + (i * self.n + step - 1) * self.block

    def get_weights(self, v: np.ndarray, i: int, step: int) -> StepWeights:
        o = self.weight_offset(i, step)
        M, Mt = self.M, self.Mt
        return StepWeights(
            critic=v[o:o + M].copy(),
            actor=v[o + M:o + 2 * M].copy(),
            theta=v[o + 2 * M:o + 2 * M + Mt].copy(),
            dist=float(v[o + 2 * M + Mt]),
        )

    def set_weights(self, v: np.ndarray, i: int, step: int, w: StepWeights):
        o = self.weight_offset(i, step)
        M, Mt = self.M, self.Mt
        v[o:o + M] = w.critic
        v[o + M:o + 2 * M] = w.actor
        v[o + 2 * M:o + 2 * M + Mt] = w.theta
        v[o + 2 * M + Mt] = w.dist

    def describe(self, idx: int) -> str:
        """Human-readable name of one flat-vector component."""
        if idx < self.n_leader:
            return f"leader x{idx + 1}"
        if idx < self.weights_base:
            rel = idx - self.n_leader
            return f"follower {rel // self.n + 1} x{rel % self.n + 1}"
        rel = idx - self.weights_base
        agent, within = divmod(rel, self.n * self.block)
        step, w = divmod(within, self.block)
        M, Mt = self.M, self.Mt
        if w < M:
            part = f"critic[{w}]"
        elif w < 2 * M:
            part = f"actor[{w - M}]"
        elif w < 2 * M + Mt:
            part = f"theta[{w - 2 * M}]"
        else:
            part = "dist"
        return f"follower {agent + 1} step {step + 1} {part}"


@dataclass(frozen=True)
class SystemState:
    """Structured view of the flat vector; round-trips losslessly."""

    leader: np.ndarray
    followers: np.ndarray       # (N, n)
    weights: tuple              # N tuples of n StepWeights
    t: float = 0.0

    def to_vector(self, layout: StateLayout) -> np.ndarray:
        v = np.empty(layout.size)
        v[: layout.n_leader] = self.leader
        for i in range(layout.N):
            v[layout.follower_slice(i)] = self.followers[i]
            for j in range(1, layout.n + 1):
                layout.set_weights(v, i, j, self.weights[i][j - 1])
        return v

    @classmethod
    def from_vector(cls, layout: StateLayout, v: np.ndarray, t: float = 0.0) -> "SystemState":
        followers = np.stack([v[layout.follower_slice(i)].copy() for i in range(layout.N)])
        weights = tuple(
            tuple(layout.get_weights(v, i, j) for j in range(1, layout.n + 1))
            for i in range(layout.N)
        )
        return cls(leader=v[: layout.n_leader].copy(), followers=followers,
                   weights=weights, t=t)


@dataclass
class SimulationTrace:
    """Time-indexed record of a run; all series share the time grid."""

    t: np.ndarray
    y0: np.ndarray
    y: np.ndarray          # (R, N)
    e: np.ndarray          # (R, N)
    z: np.ndarray          # (R, N, n)
    alpha: np.ndarray      # (R, N, n)
    u: np.ndarray          # (R, N)
    wc_norm: np.ndarray    # (R, N, n)
    wa_norm: np.ndarray
    th_norm: np.ndarray
    dh: np.ndarray         # raw disturbance estimates
    config: SimulationConfig
    kernel: str = ""

    @property
    def tracking_error(self) -> np.ndarray:
        """z_i1 = y_i - y_0 per follower."""
        return self.y - self.y0[:, None]

    def columns(self) -> dict:
        """Documented flat column naming for CSV export."""
        N, n = self.y.shape[1], self.z.shape[2]
        cols = {"t": self.t, "y0": self.y0}
        for i in range(N):
            cols[f"y{i + 1}"] = self.y[:, i]
        for i in range(N):
            cols[f"e{i + 1}"] = self.e[:, i]
        for i in range(N):
            for j in range(n):
                cols[f"z{i + 1}{j + 1}"] = self.z[:, i, j]
        for i in range(N):
            for j in range(n):
                cols[f"a{i + 1}{j + 1}"] = self.alpha[:, i, j]
        for i in range(N):
            cols[f"u{i + 1}"] = self.u[:, i]
        for name, arr in (("wc", self.wc_norm), ("wa", self.wa_norm),
                          ("th", self.th_norm), ("dh", self.dh)):
            for i in range(N):
                for j in range(n):
                    cols[f"{name}{i + 1}{j + 1}"] = arr[:, i, j]
        return cols

    def to_csv(self, path):
        cols = self.columns()
        data = np.column_stack(list(cols.values()))
        header = ",".join(cols.keys())
        np.savetxt(path, data, delimiter=",", header=header, comments="",
                   fmt="%.15g")

    def assert_finite(self):
        for name in ("y0", "y", "e", "z", "u"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise IntegrationError(f"trace series {name} contains non-finite entries")


def rk4_step(derivative_fn, state: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step of a pure derivative."""
    k1 = derivative_fn(t, state)
    k2 = derivative_fn(t + dt / 2.0, state + (dt / 2.0) * k1)
    k3 = derivative_fn(t + dt / 2.0, state + (dt / 2.0) * k2)
    k4 = derivative_fn(t + dt, state + dt * k3)
    out = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise IntegrationError(
            f"non-finite derivative at t = {t:.6g}, component {bad}",
            t=t, component=str(bad),
        )
    return out


def make_bases(config: SimulationConfig) -> tuple:
    """Per-step critic/actor bases (scalar input) and estimator bases.

    The estimator input is x_i1 at step 1 and the truncated input chi_ij
    at step j >= 2, whose dimension grows with the prior-step weights;
    centers sit on the diagonal of the input hypercube.
    """
    n = config.n_layers
    ca, th = config.basis_ca, config.basis_theta
    M, Mt = ca.neurons, th.neurons
    bases_ca = [uniform_basis(M, ca.lo, ca.hi, ca.width) for _ in range(n)]
    bases_theta = []
    for j in range(1, n + 1):
        dim = 1 if j == 1 else j + (j - 1) * (2 * M + Mt + 1)
        bases_theta.append(uniform_basis(Mt, th.lo, th.hi, th.width, dim=dim))
    return tuple(bases_ca), tuple(bases_theta)


def make_layout(config: SimulationConfig) -> StateLayout:
    leader_layers = 0 if config.leader_mode == "reference" else config.leader_model.n_layers
    return StateLayout(config.n_followers, config.n_layers,
                       config.basis_ca.neurons, config.basis_theta.neurons,
                       leader_layers)


def initial_vector(config: SimulationConfig, layout: StateLayout) -> np.ndarray:
    v = np.zeros(layout.size)
    if layout.n_leader:
        x0l = np.asarray(config.x0_leader, dtype=float)
        if x0l.shape != (layout.n_leader,):
            raise ValueError(f"x0_leader must have {layout.n_leader} entries")
        v[: layout.n_leader] = x0l
    x0f = np.asarray(config.x0_followers, dtype=float)
    if x0f.shape != (layout.N, layout.n):
        raise ValueError(f"x0_followers must have shape ({layout.N}, {layout.n})")
    x0f = x0f.copy()
    x0f[:, 0] *= config.ic_scale
    for i in range(layout.N):
        v[layout.follower_slice(i)] = x0f[i]
    return v


def record_indices(nsteps: int, stride: int) -> np.ndarray:
    idx = list(range(0, nsteps + 1, stride))
    if idx[-1] != nsteps:
        idx.append(nsteps)
    return np.asarray(idx, dtype=np.int64)


def _allocate_trace(config: SimulationConfig, n_records: int) -> SimulationTrace:
    N, n = config.n_followers, config.n_layers
    R = n_records
    return SimulationTrace(
        t=np.zeros(R), y0=np.zeros(R), y=np.zeros((R, N)), e=np.zeros((R, N)),
        z=np.zeros((R, N, n)), alpha=np.zeros((R, N, n)), u=np.zeros((R, N)),
        wc_norm=np.zeros((R, N, n)), wa_norm=np.zeros((R, N, n)),
        th_norm=np.zeros((R, N, n)), dh=np.zeros((R, N, n)), config=config,
    )


def select_kernel(kernel: str = "auto") -> str:
    if kernel == "auto":
        return "compiled" if HAVE_COMPILED else "python"
    if kernel == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel requested but the extension is not built")
    if kernel not in ("compiled", "python"):
        raise ValueError(f"unknown kernel {kernel!r}")
    return kernel


def simulate(config: SimulationConfig, kernel: str = "auto") -> SimulationTrace:
    """Integrate the coupled network ODE and return the recorded trace."""
    report = check_assumptions(config.topology)
    if not report.all_pass:
        raise ValueError(f"topology assumptions violated: {report}")
    kernel = select_kernel(kernel)
    layout = make_layout(config)
    v0 = initial_vector(config, layout)
    nsteps = int(round(config.horizon / config.dt))
    rec = record_indices(nsteps, config.stride)
    trace = _allocate_trace(config, len(rec))
    trace.kernel = kernel

    if kernel == "compiled":
        from ._fastpack import run_compiled
        run_compiled(config, layout, v0, nsteps, rec, trace)
    else:
        from ._pyloop import run_python
        run_python(config, layout, v0, nsteps, rec, trace)
    trace.assert_finite()
    return trace


def batch_simulate(configs, kernel: str = "auto") -> list:
    """Run independent simulations; per-config failures are reported in place."""
    results = []
    for cfg in configs:
        try:
            results.append(simulate(cfg, kernel=kernel))
        except (IntegrationError, ValueError) as exc:
            results.append(exc)
    return results


def sweep_ic_scale(config: SimulationConfig, scales, kernel: str = "auto") -> list:
    return batch_simulate(
        [replace(config, ic_scale=float(s)) for s in scales], kernel=kernel
    )
