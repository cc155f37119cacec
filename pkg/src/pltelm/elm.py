"""Batch ELM training and the prediction rule shared by all learners.

Targets use a +1/-1 encoding: +1 in the column of the sample's class and -1
everywhere else. Prediction takes the argmax of ``h(x) @ beta``; ties go to
the lowest class index.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EmptyChunkError, InsufficientDataError, UnknownClassError
from .linalg import matmul, pseudo_inverse
from .projection import RandomProjection, hidden_matrix


def distinct_in_order(labels):
    """Distinct labels in first-appearance order."""
    return list(dict.fromkeys(labels))


def encode_targets(labels, classes):
    index = {c: j for j, c in enumerate(classes)}
    t = -np.ones((len(labels), len(classes)))
    for i, label in enumerate(labels):
        try:
            t[i, index[label]] = 1.0
        except KeyError:
            raise UnknownClassError(f"label {label!r} is not in the class registry") from None
    return t


@dataclass(frozen=True, eq=False)
class BatchModel:
    projection: RandomProjection
    beta: np.ndarray
    classes: tuple

    def __post_init__(self):
        if self.beta.shape != (self.projection.hidden_count, len(self.classes)):
            raise DimensionError(
                f"beta shape {self.beta.shape} does not match "
                f"P={self.projection.hidden_count}, m={len(self.classes)}"
            )


def train_batch(proj, xs, labels):
    """Solve ``beta = H^+ T`` on the whole training set at once."""
    labels = list(labels)
    classes = distinct_in_order(labels)
    if len(classes) < 2:
        raise InsufficientDataError(f"need at least 2 distinct labels, got {len(classes)}")
    h = hidden_matrix(proj, xs)
    if h.shape[0] < proj.hidden_count:
        raise InsufficientDataError(
            f"{h.shape[0]} samples is fewer than {proj.hidden_count} hidden neurons"
        )
    beta = matmul(pseudo_inverse(h), encode_targets(labels, classes))
    return BatchModel(proj, beta, tuple(classes))


def scores(beta, proj, xs):
    """Raw output ``H @ beta`` for a batch of inputs (one row per input)."""
    return matmul(hidden_matrix(proj, xs), beta)


def predict(beta, proj, x, classes):
    """Return ``(label, scores)`` for one feature vector."""
    if beta.shape[1] != len(classes):
        raise DimensionError(f"beta has {beta.shape[1]} columns for {len(classes)} classes")
    s = scores(beta, proj, np.asarray(x, dtype=np.float64)[None, :])[0]
    # np.argmax returns the first maximum, which is the lowest-index tie-break.
    return classes[int(np.argmax(s))], s


def predict_many(model, xs):
    s = scores(model.beta, model.projection, xs)
    classes = list(model.classes)
    return [classes[j] for j in np.argmax(s, axis=1)]


def accuracy(model, xs, labels):
    """Fraction of correct predictions; labels unknown to ``model`` count as wrong.

    ``model`` is anything with ``beta``, ``projection`` and ``classes``.
    """
    labels = list(labels)
    if not labels:
        raise EmptyChunkError("accuracy needs a non-empty test set")
    predicted = predict_many(model, xs)
    return sum(p == t for p, t in zip(predicted, labels)) / len(labels)
