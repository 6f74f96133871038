"""Gaussian radial-basis feature maps with linear-in-weights outputs.

The critic, actor, and the uncertainty/disturbance estimators all share
this structure: a fixed set of Gaussian centers and widths producing
activations ``s_m = exp(-||x - v_m||^2 / sigma_m^2)`` in (0, 1], combined
linearly by an adapted weight vector.
"""

from dataclasses import dataclass

import numpy as np


class BasisError(ValueError):
    """Raised for invalid basis geometry or input dimension mismatch."""


@dataclass(frozen=True)
class RbfBasis:
    """Gaussian centers (M, dim) and strictly positive widths (M,)."""

    centers: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        widths = np.asarray(self.widths, dtype=float).ravel()
        if centers.shape[0] != widths.shape[0]:
            raise BasisError(
                f"{centers.shape[0]} centers but {widths.shape[0]} widths"
            )
        if centers.shape[0] < 1:
            raise BasisError("basis needs at least one neuron")
        if np.any(widths <= 0):
            raise BasisError("widths must be strictly positive")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "widths", widths)

    @property
    def n_neurons(self) -> int:
        return self.centers.shape[0]

    @property
    def input_dim(self) -> int:
        return self.centers.shape[1]


def uniform_basis(n_neurons: int, lo: float, hi: float, width: float, dim: int = 1) -> RbfBasis:
    """Centers uniformly spaced on [lo, hi]; for dim > 1 they sit on the
    diagonal of the input hypercube with a shared width."""
    if n_neurons == 1:
        vals = np.array([(lo + hi) / 2.0])
    else:
        vals = np.linspace(lo, hi, n_neurons)
    centers = np.repeat(vals[:, None], dim, axis=1)
    return RbfBasis(centers=centers, widths=np.full(n_neurons, float(width)))


def activations(basis: RbfBasis, x) -> np.ndarray:
    """Gaussian activations exp(-||x - v_m||^2 / sigma_m^2), each in (0, 1]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (basis.input_dim,):
        raise BasisError(
            f"input has shape {x.shape}, basis expects ({basis.input_dim},)"
        )
    sq = np.sum((basis.centers - x) ** 2, axis=1)
    return np.exp(-sq / basis.widths**2)


def output(basis: RbfBasis, weights, x) -> float:
    """Network output w^T s(x)."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != basis.n_neurons:
        raise BasisError(
            f"weight vector length {w.shape[0]} != {basis.n_neurons} neurons"
        )
    return float(w @ activations(basis, x))
