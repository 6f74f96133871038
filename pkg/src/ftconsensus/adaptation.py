"""Fixed-time adaptation laws for the critic, actor, and estimator weights.

Every law combines a learning term driven by the step's error signal with
two dissipative feedback terms raised to the odd-ratio powers p = 1/3 and
q = 3.  The low power dominates near the origin and the high power far
from it, which is what makes the isolated flows settle in a time bounded
independently of the initial weights.  Fractional powers of negative
numbers are taken sign-preserving throughout: x^r := sgn(x) |x|^r.
"""

from dataclasses import dataclass, field, replace

import numpy as np

P_EXPONENT = 1.0 / 3.0
Q_EXPONENT = 3.0

# Constant from the quartic-power algebraic bound used in the stability
# analysis; the actor/critic q-gain ratio condition divides by 8 * 172.
LEMMA5_CONSTANT = 172.0


def signed_pow(x, r: float):
    """Sign-preserving power sgn(x) * |x|^r, element-wise on arrays."""
    x = np.asarray(x, dtype=float)
    out = np.sign(x) * np.abs(x) ** r
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class StepWeights:
    """Adapted quantities of one backstepping step of one agent."""

    critic: np.ndarray
    actor: np.ndarray
    theta: np.ndarray
    dist: float = 0.0

    def __post_init__(self):
        for name in ("critic", "actor", "theta"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @classmethod
    def zeros(cls, n_neurons: int, n_theta: int) -> "StepWeights":
        return cls(np.zeros(n_neurons), np.zeros(n_neurons), np.zeros(n_theta), 0.0)


@dataclass(frozen=True)
class StepGains:
    """Controller and adaptation gains of one backstepping step.

    Names transliterate the usual symbols: k is the linear feedback gain,
    kp/kq the fixed-time feedback gains, sigma_* the adaptation leakage
    gains, gamma_* the (scalar-times-identity) learning rates, and mu_d
    the free analysis constant entering the sigma_2d condition.
    """

    k: float
    kp: float
    kq: float
    sigma_1c: float = 1.0
    sigma_2c: float = 1.0
    sigma_3c: float = 1.0
    sigma_1a: float = 1.0
    sigma_2a: float = 1.0
    sigma_3a: float = 1.0
    sigma_1th: float = 1.0
    sigma_2th: float = 1.0
    sigma_1d: float = 1.0
    sigma_2d: float = 1.0
    gamma_c: float = 1.0
    gamma_a: float = 1.0
    gamma_th: float = 1.0
    gamma_d: float = 1.0
    mu_d: float = 1.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            try:
                value = float(getattr(self, name))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"gain {name} must be a number") from exc
            object.__setattr__(self, name, value)
            if value <= 0:
                raise ValueError(f"gain {name} must be strictly positive")


@dataclass(frozen=True)
class ControllerGains:
    """Per-step gains (uniform across agents) plus the global exponents."""

    steps: tuple  # tuple of StepGains, one per backstepping step
    p: float = P_EXPONENT
    q: float = Q_EXPONENT

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.q <= 1:
            raise ValueError("q must exceed 1")

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def step(self, j: int) -> StepGains:
        """Gains of backstepping step j (1-based)."""
        return self.steps[j - 1]

    @classmethod
    def uniform(cls, n_steps: int, base: StepGains, overrides: dict | None = None) -> "ControllerGains":
        """Same gains at every step, with optional per-step field overrides."""
        steps = []
        for j in range(1, n_steps + 1):
            g = base
            if overrides and j in overrides:
                g = replace(base, **overrides[j])
            steps.append(g)
        return cls(steps=tuple(steps))


def _check_dims(S, w):
    S = np.asarray(S, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    if S.shape != w.shape:
        raise ValueError(f"activation/weight length mismatch: {S.shape} vs {w.shape}")
    return S, w


def critic_rate(weights: StepWeights, S, error: float, gains: ControllerGains, step: int) -> np.ndarray:
    """Critic weight flow: learning on -S*error plus leakage and fixed-time terms."""
    g = gains.step(step)
    S, wc = _check_dims(S, weights.critic)
    return g.gamma_c * (
        -S * error
        - g.sigma_1c * S * (S @ wc)
        - g.sigma_2c * signed_pow(wc, gains.p)
        - g.sigma_3c * signed_pow(wc, gains.q)
    )


def actor_rate(weights: StepWeights, S, gains: ControllerGains, step: int) -> np.ndarray:
    """Actor weight flow: gradient descent on the actor-critic gap."""
    g = gains.step(step)
    S, wa = _check_dims(S, weights.actor)
    delta = wa - np.asarray(weights.critic, dtype=float).ravel()
    return -g.gamma_a * (
        g.sigma_1a * S * (S @ delta)
        + g.sigma_2a * signed_pow(delta, gains.p)
        + g.sigma_3a * signed_pow(delta, gains.q)
    )


def theta_rate(theta, features, error: float, gains: ControllerGains, step: int) -> np.ndarray:
    """Uncertainty-estimator weight flow."""
    g = gains.step(step)
    phi, th = _check_dims(features, theta)
    return g.gamma_th * (
        error * phi
        - g.sigma_1th * signed_pow(th, gains.p)
        - g.sigma_2th * signed_pow(th, gains.q)
    )


def dist_rate(dist_est: float, error: float, gains: ControllerGains, step: int) -> float:
    """Disturbance-estimator flow."""
    g = gains.step(step)
    return g.gamma_d * (
        error
        - g.sigma_1d * signed_pow(dist_est, gains.p)
        - g.sigma_2d * signed_pow(dist_est, gains.q)
    )


@dataclass(frozen=True)
class GainCondition:
    """One sufficient-condition check with its actual numbers echoed."""

    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class GainReport:
    step: int
    conditions: tuple

    @property
    def warnings(self) -> tuple:
        return tuple(c for c in self.conditions if not c.passed)

    @property
    def all_pass(self) -> bool:
        return not self.warnings


def validate_gains(gains: ControllerGains, step: int) -> GainReport:
    """Check the sufficient gain conditions of one step.

    Violations are warnings, not errors: the shipped Example-1 gains
    violate several strict inequalities yet converge in simulation (the
    conditions are sufficiency-only).
    """
    g = gains.step(step)
    ratio = g.sigma_3c / (8.0 * LEMMA5_CONSTANT)
    mu_floor = 2.0 / g.mu_d**4
    conditions = (
        GainCondition(
            "k_gt_3_over_2",
            g.k > 1.5,
            f"k = {g.k} (needs > 1.5)",
        ),
        GainCondition(
            "sigma_1c_gt_sigma_1a_gt_1",
            g.sigma_1c > g.sigma_1a > 1.0,
            f"sigma_1c = {g.sigma_1c}, sigma_1a = {g.sigma_1a} (needs sigma_1c > sigma_1a > 1)",
        ),
        GainCondition(
            "sigma_2c_gt_2sigma_2a",
            g.sigma_2c > 2.0 * g.sigma_2a > 0.0,
            f"sigma_2c = {g.sigma_2c}, 2*sigma_2a = {2.0 * g.sigma_2a}",
        ),
        GainCondition(
            "sigma_3a_lt_sigma_3c_over_1376",
            0.0 < g.sigma_3a < ratio,
            f"sigma_3a = {g.sigma_3a} (needs < sigma_3c/1376 = {ratio:.6g})",
        ),
        GainCondition(
            "sigma_2d_gt_2_over_mu4",
            g.sigma_2d > mu_floor,
            f"sigma_2d = {g.sigma_2d} (needs > 2/mu_d^4 = {mu_floor:.6g})",
        ),
    )
    return GainReport(step=step, conditions=conditions)
