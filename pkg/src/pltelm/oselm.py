"""Online-sequential ELM: initial block solve plus chunk-wise RLS updates."""

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .elm import distinct_in_order, encode_targets
from .errors import (
    EmptyChunkError,
    InsufficientDataError,
    NonFiniteError,
    SingularError,
    UnknownClassError,
)
from .linalg import PIVOT_TOL, invert, matmul, transpose
from .projection import RandomProjection, hidden_matrix


@dataclass(frozen=True, eq=False)
class OnlineState:
    """Snapshot of an online learner.

    ``m`` tracks ``(H^T H)^-1`` over every hidden row seen. ``last_h`` is the
    hidden output of the most recent chunk (or of the initial block).
    ``hidden_sum`` is the column sum of all hidden rows seen so far.
    ``weight_updates`` counts samples times output neurons updated.
    """

    projection: RandomProjection
    beta: np.ndarray
    m: np.ndarray
    classes: tuple
    last_h: np.ndarray
    hidden_sum: np.ndarray
    samples_seen: int
    weight_updates: int


def init_online(proj, xs, labels):
    labels = list(labels)
    classes = distinct_in_order(labels)
    if len(classes) < 2:
        raise InsufficientDataError(
            f"initial block must contain at least 2 classes, got {len(classes)}"
        )
    if len(labels) < proj.hidden_count:
        raise InsufficientDataError(
            f"initial block of {len(labels)} samples is smaller than P={proj.hidden_count}"
        )
    h0 = hidden_matrix(proj, xs)
    h0t = transpose(h0)
    m0 = invert(matmul(h0t, h0))
    beta0 = matmul(matmul(m0, h0t), encode_targets(labels, classes))
    n0 = len(labels)
    return OnlineState(
        projection=proj,
        beta=beta0,
        m=m0,
        classes=tuple(classes),
        last_h=h0,
        hidden_sum=h0.sum(axis=0),
        samples_seen=n0,
        weight_updates=n0 * len(classes),
    )


def rls_update(state, h, targets):
    """Apply one RLS step given a precomputed hidden block and encoded targets."""
    m_new, beta_new, status = kernels.rls_step(state.m, state.beta, h, targets, PIVOT_TOL)
    if status:
        raise SingularError("I + h M h^T is singular to working precision")
    if not (np.isfinite(m_new).all() and np.isfinite(beta_new).all()):
        raise NonFiniteError("RLS update produced NaN or Inf")
    b = h.shape[0]
    return replace(
        state,
        beta=beta_new,
        m=m_new,
        last_h=h,
        hidden_sum=state.hidden_sum + h.sum(axis=0),
        samples_seen=state.samples_seen + b,
        weight_updates=state.weight_updates + b * len(state.classes),
    )


def update_chunk(state, xs, labels):
    """RLS update on a chunk whose labels are all already registered."""
    labels = list(labels)
    if not labels:
        raise EmptyChunkError("cannot update on an empty chunk")
    unknown = [c for c in distinct_in_order(labels) if c not in state.classes]
    if unknown:
        raise UnknownClassError(
            f"labels {unknown!r} are not registered; route new classes through the PLT learner"
        )
    h = hidden_matrix(state.projection, xs)
    return rls_update(state, h, encode_targets(labels, state.classes))
