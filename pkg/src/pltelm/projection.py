"""The frozen random hidden layer of a single-hidden-layer network."""

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, EmptyChunkError
from .linalg import as_matrix


class Activation(str, enum.Enum):
    SIGMOID = "sigmoid"
    SINE = "sine"
    HARDLIMIT = "hardlimit"

    @property
    def code(self):
        return _KERNEL_CODES[self]


_KERNEL_CODES = {
    Activation.SIGMOID: kernels.SIGMOID,
    Activation.SINE: kernels.SINE,
    Activation.HARDLIMIT: kernels.HARDLIMIT,
}


@dataclass(frozen=True, eq=False)
class RandomProjection:
    """Input weights (one row per hidden neuron), biases and activation.

    The arrays are marked read-only at construction.
    """

    weights: np.ndarray
    biases: np.ndarray
    activation: Activation
    seed: int

    @property
    def input_dim(self):
        return self.weights.shape[1]

    @property
    def hidden_count(self):
        return self.weights.shape[0]


def init_projection(n, hidden_count, activation=Activation.SIGMOID, seed=0):
    """Draw weights then biases i.i.d. uniform on [-1, 1].

    The generator is numpy's PCG64 (``np.random.default_rng(seed)``), so a
    given ``(n, hidden_count, seed)`` always yields the same layer.
    """
    if n < 1 or hidden_count < 1:
        raise DimensionError(f"need n >= 1 and P >= 1, got n={n}, P={hidden_count}")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-1.0, 1.0, size=(hidden_count, n))
    biases = rng.uniform(-1.0, 1.0, size=hidden_count)
    weights.setflags(write=False)
    biases.setflags(write=False)
    return RandomProjection(weights, biases, Activation(activation), int(seed))


def hidden_matrix(proj, xs):
    """Hidden-layer output H (one row per input row)."""
    xs = as_matrix(xs, "inputs")
    if xs.shape[0] == 0:
        raise EmptyChunkError("no input rows")
    if xs.shape[1] != proj.input_dim:
        raise DimensionError(
            f"input has {xs.shape[1]} features, projection expects {proj.input_dim}"
        )
    return kernels.hidden_layer(xs, proj.weights, proj.biases, proj.activation.code)


def hidden_row(proj, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected a single feature vector, got shape {x.shape}")
    return hidden_matrix(proj, x[None, :])
