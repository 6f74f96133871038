"""Computable predicates for the algebraic inequalities behind the design.

Each check evaluates both sides of one inequality and returns an
:class:`InequalityWitness` carrying the numbers; the property-test suite
hammers these with randomized inputs.  All fractional powers route
through :func:`ftconsensus.adaptation.signed_pow` so the lemma semantics
match the controller arithmetic exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .adaptation import signed_pow

SLACK_TOL = 1e-9


@dataclass(frozen=True)
class InequalityWitness:
    """Both sides of an inequality lhs <= rhs, with the inputs echoed."""

    lhs: float
    rhs: float
    inputs: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        scale = max(1.0, abs(self.lhs), abs(self.rhs))
        return self.slack >= -SLACK_TOL * scale


def lemma2_check(values, p: float) -> InequalityWitness:
    """Power-sum comparison for non-negative entries.

    For 0 < p <= 1:  (sum v)^p <= sum v^p.
    For p > 1:       n^(1-p) (sum v)^p <= sum v^p.
    """
    v = np.asarray(values, dtype=float).ravel()
    if p <= 0:
        raise ValueError("exponent must be positive")
    if (v < 0).any():
        raise ValueError("values must be non-negative")
    total = float(v.sum())
    power_sum = float(np.sum(v**p))
    if p <= 1:
        lhs = total**p
    else:
        lhs = len(v) ** (1.0 - p) * total**p if len(v) else 0.0
    return InequalityWitness(lhs=lhs, rhs=power_sum,
                             inputs={"values": v, "p": p})


def young_check(a: float, b: float, p: float, q: float, c: float) -> InequalityWitness:
    """Young's inequality: ab <= (c^p/p)|a|^p + (1/(c^q q))|b|^q."""
    if p <= 1 or q <= 1:
        raise ValueError("exponents must exceed 1")
    if abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
        raise ValueError("exponents must be conjugate: 1/p + 1/q = 1")
    if c <= 0:
        raise ValueError("scaling constant must be positive")
    rhs = (c**p / p) * abs(a) ** p + (1.0 / (c**q * q)) * abs(b) ** q
    return InequalityWitness(lhs=a * b, rhs=rhs,
                             inputs={"a": a, "b": b, "p": p, "q": q, "c": c})


def _pair(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def lemma4_check(a, b) -> InequalityWitness:
    """-a.(a+b)^(1/3) <= -1/2 sum a^(4/3) + sum b^(4/3).

    Cube roots are sign-preserving and x^(4/3) is the fourth power of the
    signed cube root, hence non-negative for every real x.
    """
    a, b = _pair(a, b)
    lhs = float(-a @ signed_pow(a + b, 1.0 / 3.0))
    rhs = float(-0.5 * np.sum(signed_pow(a, 1.0 / 3.0) ** 4)
                + np.sum(signed_pow(b, 1.0 / 3.0) ** 4))
    return InequalityWitness(lhs=lhs, rhs=rhs, inputs={"a": a, "b": b})


def lemma5_check(a, b) -> InequalityWitness:
    """-a.(a+b)^3 <= -1/8 sum a^4 + 172 sum b^4."""
    a, b = _pair(a, b)
    lhs = float(-a @ (a + b) ** 3)
    rhs = float(-0.125 * np.sum(a**4) + 172.0 * np.sum(b**4))
    return InequalityWitness(lhs=lhs, rhs=rhs, inputs={"a": a, "b": b})
