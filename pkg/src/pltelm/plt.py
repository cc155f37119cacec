"""Progressive learning: grow the output layer when unseen classes arrive.

When a chunk carries labels outside the registry, ``beta`` is widened by ``c``
columns computed as ``-M @ h^T @ J`` (``J`` all ones, ``h`` the previous
chunk's hidden output). Existing columns are copied untouched. The chunk is
then learned with the ordinary RLS step over the widened registry.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .elm import distinct_in_order, encode_targets
from .errors import DuplicateClassError, EmptyChunkError, PltError
from .linalg import matmul, ones, rect_identity, transpose, zeros
from .oselm import OnlineState, init_online, rls_update
from .projection import hidden_matrix

LAST_CHUNK = "last-chunk"
CUMULATIVE = "cumulative"
DELTA_MODES = (LAST_CHUNK, CUMULATIVE)


def detect_new_classes(state, labels):
    known = set(state.classes)
    return [c for c in distinct_in_order(labels) if c not in known]


def delta_beta(state, c, mode=LAST_CHUNK):
    """The ``P x c`` block appended to ``beta`` for ``c`` new classes.

    ``last-chunk`` uses the previous chunk's hidden output, as published.
    ``cumulative`` uses every hidden row seen, which reproduces the column a
    from-scratch OS-ELM would hold had the classes been registered (with all
    past targets at -1) from the first sample.
    """
    if mode == LAST_CHUNK:
        h = state.last_h
        return -matmul(matmul(state.m, transpose(h)), ones(h.shape[0], c))
    if mode == CUMULATIVE:
        return -matmul(matmul(state.m, state.hidden_sum[:, None]), ones(1, c))
    raise ValueError(f"unknown delta mode {mode!r}; expected one of {DELTA_MODES}")


def _check_new(state, new_labels):
    new_labels = list(new_labels)
    if not new_labels:
        raise ValueError("recalibration needs at least one new label")
    if len(set(new_labels)) != len(new_labels):
        raise DuplicateClassError(f"new labels {new_labels!r} contain duplicates")
    clash = [c for c in new_labels if c in state.classes]
    if clash:
        raise DuplicateClassError(f"labels {clash!r} are already registered")
    return new_labels


def recalibrate(state, new_labels, mode=LAST_CHUNK):
    """Widen ``beta`` to ``[beta | delta]`` and extend the registry. ``M`` is kept."""
    new_labels = _check_new(state, new_labels)
    delta = delta_beta(state, len(new_labels), mode)
    return replace(
        state,
        beta=np.hstack([state.beta, delta]),
        classes=state.classes + tuple(new_labels),
    )


def recalibrate_padded(state, new_labels, mode=LAST_CHUNK):
    """Same result as :func:`recalibrate`, built as ``beta @ I_(m, m+c) + [0 | delta]``."""
    new_labels = _check_new(state, new_labels)
    p, m = state.beta.shape
    c = len(new_labels)
    padded = matmul(state.beta, rect_identity(m, m + c))
    correction = np.hstack([zeros(p, m), delta_beta(state, c, mode)])
    return replace(state, beta=padded + correction, classes=state.classes + tuple(new_labels))


@dataclass(frozen=True)
class RecalibrationEvent:
    sample_index: int  # 1-based stream position of the first new-class sample
    labels: tuple
    c: int


@dataclass(frozen=True)
class WeightCalcReport:
    oselm_units: int
    plt_units: int
    percent_saved: float


@dataclass
class PltModel:
    """Mutable progressive learner wrapping an :class:`OnlineState`."""

    state: OnlineState
    mode: str = LAST_CHUNK
    log: list = field(default_factory=list)

    @classmethod
    def start(cls, proj, xs, labels, mode=LAST_CHUNK):
        if mode not in DELTA_MODES:
            raise ValueError(f"unknown delta mode {mode!r}; expected one of {DELTA_MODES}")
        return cls(init_online(proj, xs, labels), mode)

    @property
    def beta(self):
        return self.state.beta

    @property
    def projection(self):
        return self.state.projection

    @property
    def classes(self):
        return self.state.classes

    def learn_chunk(self, xs, labels):
        labels = list(labels)
        if not labels:
            raise EmptyChunkError("cannot learn from an empty chunk")
        new = detect_new_classes(self.state, labels)
        state = self.state
        if new:
            first = min(labels.index(c) for c in new)
            index = state.samples_seen + first + 1
            if self.log and index <= self.log[-1].sample_index:
                raise PltError("recalibration indices must be strictly increasing")
            state = recalibrate(state, new, self.mode)
            self.log.append(RecalibrationEvent(index, tuple(new), len(new)))
        h = hidden_matrix(state.projection, xs)
        self.state = rls_update(state, h, encode_targets(labels, state.classes))
        if self.state.beta.shape[1] != len(self.state.classes):
            raise PltError("output width diverged from the class registry")
        return self


def learn_chunk(model, xs, labels):
    return model.learn_chunk(xs, labels)


def weight_calc_report(model, static_class_count):
    """Compare accrued weight updates with a fixed-width OS-ELM over the same samples."""
    state = model.state if isinstance(model, PltModel) else model
    oselm = state.samples_seen * static_class_count
    plt = state.weight_updates
    saved = 100.0 * float(1 - Fraction(plt, oselm)) if oselm else 0.0
    return WeightCalcReport(oselm, plt, saved)


def closed_form_saving(phase_lengths, phase_widths, total_classes):
    """Percent saved from phase lengths and active class counts alone."""
    samples = sum(phase_lengths)
    saved = sum(b * (total_classes - m) for b, m in zip(phase_lengths, phase_widths))
    return 100.0 * float(Fraction(saved, samples * total_classes))
