"""YAML configuration loading for the simulator and CLI.

A config file has five sections:

``topology``
    ``adjacency`` (N x N, ``adjacency[i][l] > 0`` means follower ``i``
    hears follower ``l``) and ``leader_weights`` (length N pinning
    gains).

``models``
    ``followers`` — list of model specs, one per follower; ``leader`` —
    optional model spec; ``leader_mode`` — ``passive`` (leader input is
    zero), ``active`` (leader tracks ``leader_path`` with a PD law), or
    ``reference`` (no leader plant, followers track the analytic
    ``leader_path`` directly).  A model spec is either the name of a
    builtin (see :func:`ftconsensus.dynamics.builtin_model`) or a mapping
    with ``layers`` (list per layer of state-term mappings with keys
    ``coef``, ``var``, ``power``, ``trig``, ``trig_var``, ``freq``,
    ``phase``, ``trig_power``) and ``disturbances`` (list per layer of
    time-term lists with keys ``coef``, ``power``, ``trig``, ``freq``,
    ``phase``).  ``leader_path`` is a builtin name or ``{terms: [...]}``
    of time terms.

``gains``
    ``base`` — mapping of :class:`ftconsensus.adaptation.StepGains`
    fields applied at every backstepping step; ``per_step`` — optional
    mapping of step index to field overrides; optional exponents ``p``
    and ``q``.

``bases``
    ``critic_actor`` and ``estimator`` — each with ``neurons``, ``lo``,
    ``hi``, ``width``.

``sim``
    ``dt``, ``horizon``, ``stride``, ``x0_leader``, ``x0_followers``,
    ``ic_scale``, ``pd_gains``.

Overrides use dotted paths: ``--set sim.dt=5e-4``,
``--set gains.base.k=40``.  Values parse as YAML scalars.
"""

import copy
import importlib.resources
import pathlib

import yaml

from .adaptation import ControllerGains, StepGains
from .dynamics import (ReferenceSignal, Signal, StateTerm, StrictFeedbackModel,
                       TimeTerm, builtin_model)
from .simulate import BasisSpec, SimulationConfig
from .topology import Topology

SECTIONS = ("topology", "models", "gains", "bases", "sim")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def shipped_config_path(name: str) -> pathlib.Path:
    """Filesystem path of a packaged example config (name without suffix)."""
    ref = importlib.resources.files("ftconsensus") / "configs" / f"{name}.yaml"
    if not ref.is_file():
        raise ConfigError(f"no shipped config named {name!r}")
    return pathlib.Path(str(ref))


def list_shipped_configs() -> list:
    root = importlib.resources.files("ftconsensus") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_raw(path) -> dict:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    unknown = set(data) - set(SECTIONS) - {"name"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return data


def apply_overrides(data: dict, overrides) -> dict:
    """Return a deep copy of data with ``key.path=value`` strings applied."""
    out = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        dotted, _, raw = item.partition("=")
        keys = dotted.strip().split(".")
        if not all(keys):
            raise ConfigError(f"bad override path {dotted!r}")
        node = out
        for k in keys[:-1]:
            nxt = node.get(k) if isinstance(node, dict) else None
            if not isinstance(nxt, dict):
                nxt = {}
                node[k] = nxt
            node = nxt
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"bad override value {raw!r}: {exc}") from exc
        if isinstance(value, str):
            # YAML 1.1 reads exponents without a dot ("5e-4") as strings
            try:
                value = float(value)
            except ValueError:
                pass
        node[keys[-1]] = value
    return out


def _state_term(spec: dict) -> StateTerm:
    try:
        return StateTerm(**spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad state term {spec!r}: {exc}") from exc


def _time_term(spec: dict) -> TimeTerm:
    try:
        return TimeTerm(**spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad time term {spec!r}: {exc}") from exc


def _signal(specs) -> Signal:
    return Signal(tuple(_time_term(s) for s in specs or ()))


def build_model(spec):
    """Resolve a model spec (builtin name or inline mapping)."""
    if isinstance(spec, str):
        try:
            model = builtin_model(spec)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        if not isinstance(model, StrictFeedbackModel):
            raise ConfigError(f"{spec!r} is a reference path, not a plant model")
        return model
    if not isinstance(spec, dict) or "layers" not in spec:
        raise ConfigError(f"model spec must be a builtin name or a mapping with layers, got {spec!r}")
    layers = tuple(tuple(_state_term(t) for t in layer or ()) for layer in spec["layers"])
    dists = spec.get("disturbances")
    if dists is None:
        dists = [[] for _ in layers]
    if len(dists) != len(layers):
        raise ConfigError("need one disturbance list per layer")
    return StrictFeedbackModel(
        layer_fns=layers,
        disturbances=tuple(_signal(d) for d in dists),
        name=spec.get("name", "inline"),
    )


def build_reference(spec) -> ReferenceSignal:
    if isinstance(spec, str):
        try:
            ref = builtin_model(spec)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        if not isinstance(ref, ReferenceSignal):
            raise ConfigError(f"{spec!r} is a plant model, not a reference path")
        return ref
    if not isinstance(spec, dict) or "terms" not in spec:
        raise ConfigError(f"reference spec must be a builtin name or {{terms: [...]}}, got {spec!r}")
    return ReferenceSignal.from_output(_signal(spec["terms"]))


def build_gains(section: dict, n_steps: int) -> ControllerGains:
    base_spec = section.get("base")
    if not isinstance(base_spec, dict):
        raise ConfigError("gains section needs a base mapping")
    try:
        base = StepGains(**base_spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad gains: {exc}") from exc
    per_step = section.get("per_step") or {}
    try:
        overrides = {int(j): dict(v) for j, v in per_step.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad per_step gains: {exc}") from exc
    kwargs = {}
    for name in ("p", "q"):
        if name in section:
            kwargs[name] = float(section[name])
    try:
        gains = ControllerGains.uniform(n_steps, base, overrides)
        if kwargs:
            gains = ControllerGains(steps=gains.steps, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad gains: {exc}") from exc
    return gains


def _basis(spec) -> BasisSpec:
    try:
        return BasisSpec(**(spec or {}))
    except TypeError as exc:
        raise ConfigError(f"bad basis spec {spec!r}: {exc}") from exc


def build_config(data: dict) -> SimulationConfig:
    """Turn a parsed config mapping into a validated SimulationConfig."""
    for section in SECTIONS:
        if section not in data:
            raise ConfigError(f"missing config section {section!r}")

    topo_spec = data["topology"]
    try:
        topology = Topology(adjacency=topo_spec["adjacency"],
                            leader_weights=topo_spec["leader_weights"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad topology: {exc}") from exc

    models = data["models"]
    followers = tuple(build_model(s) for s in models.get("followers", ()))
    if not followers:
        raise ConfigError("models.followers must list at least one model")
    leader_mode = models.get("leader_mode", "passive")
    leader_model = build_model(models["leader"]) if models.get("leader") else None
    leader_path = build_reference(models["leader_path"]) if models.get("leader_path") else None

    bases = data["bases"]
    sim = data["sim"]
    try:
        return SimulationConfig(
            topology=topology,
            follower_models=followers,
            gains=build_gains(data["gains"], followers[0].n_layers),
            leader_model=leader_model,
            leader_mode=leader_mode,
            leader_path=leader_path,
            basis_ca=_basis(bases.get("critic_actor")),
            basis_theta=_basis(bases.get("estimator")),
            dt=float(sim.get("dt", 1e-3)),
            horizon=float(sim.get("horizon", 5.0)),
            stride=int(sim.get("stride", 10)),
            x0_leader=tuple(sim.get("x0_leader", ())),
            x0_followers=tuple(tuple(row) for row in sim.get("x0_followers", ())),
            ic_scale=float(sim.get("ic_scale", 1.0)),
            pd_gains=tuple(sim.get("pd_gains", (20.0, 10.0))),
            name=str(data.get("name", "")),
            raw=data,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path, overrides=None) -> SimulationConfig:
    """Load, override, and validate a config file in one call."""
    return build_config(apply_overrides(load_raw(path), overrides))
