"""Distributed fixed-time leader-follower consensus for strict-feedback
nonlinear multi-agent systems, with actor-critic adaptive backstepping.

Public surface: topology construction and checks, plant models, the
controller cascade and adaptation laws, the closed-loop simulator with
compiled and pure-Python kernels, post-run analysis, algebraic
inequality oracles, and YAML configuration loading.
"""

__version__ = "0.1.0"

from .adaptation import (ControllerGains, StepGains, StepWeights,
                         signed_pow, validate_gains)
from .analysis import (ConvergenceRadii, FixedTimeBound, omega_radii,
                       settling_time, tmax_bound)
from .config import ConfigError, load_config, shipped_config_path
from .controller import AgentController, consensus_error
from .dynamics import (ReferenceSignal, Signal, StateTerm,
                       StrictFeedbackModel, TimeTerm, builtin_model)
from .rbfnet import RbfBasis, activations, uniform_basis
from .simulate import (HAVE_COMPILED, IntegrationError, SimulationConfig,
                       SimulationTrace, batch_simulate, simulate,
                       sweep_ic_scale)
from .topology import (LaplacianBundle, Topology, build_laplacian,
                       check_assumptions)

__all__ = [
    "AgentController", "ConfigError", "ControllerGains", "ConvergenceRadii",
    "FixedTimeBound", "HAVE_COMPILED", "IntegrationError", "LaplacianBundle",
    "RbfBasis", "ReferenceSignal", "Signal", "SimulationConfig",
    "SimulationTrace", "StateTerm", "StepGains", "StepWeights",
    "StrictFeedbackModel", "TimeTerm", "Topology", "activations",
    "batch_simulate", "build_laplacian", "builtin_model", "check_assumptions",
    "consensus_error", "load_config", "omega_radii", "settling_time",
    "shipped_config_path", "signed_pow", "simulate", "sweep_ic_scale",
    "tmax_bound", "uniform_basis", "validate_gains",
]
