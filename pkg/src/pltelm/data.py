"""Datasets, normalization, splits and class-introduction schedules."""

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    DimensionError,
    EmptyDatasetError,
    ParseError,
    ScheduleError,
    SplitError,
)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    name: str
    features: np.ndarray
    labels: tuple
    feature_bounds: np.ndarray = None  # shape (n, 2): per-column (min, max)

    def __post_init__(self):
        if self.features.ndim != 2:
            raise DimensionError(f"features must be 2-D, got shape {self.features.shape}")
        if len(self.labels) != self.features.shape[0]:
            raise DimensionError(
                f"{len(self.labels)} labels for {self.features.shape[0]} feature rows"
            )

    def __len__(self):
        return len(self.labels)

    @property
    def classes(self):
        return list(dict.fromkeys(self.labels))

    def subset(self, indices, name=None):
        indices = np.asarray(indices, dtype=np.intp)
        return replace(
            self,
            name=name or self.name,
            features=self.features[indices],
            labels=tuple(self.labels[i] for i in indices),
        )


def load_csv(path, has_header=False, label_column=-1, name=None):
    """Read a comma-separated file; labels stay verbatim text.

    ``has_header=None`` sniffs the first non-blank line: it is taken as a
    header when any of its feature cells fails to parse as a number.
    """
    path = Path(path)
    rows, labels = [], []
    width = None
    skip_header = has_header
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            if skip_header is None:
                skip_header = _looks_like_header(record, label_column)
            if skip_header:
                skip_header = False
                continue
            if width is None:
                width = len(record)
                if width < 2:
                    raise ParseError("need at least one feature column and a label", lineno)
            elif len(record) != width:
                raise ParseError(f"expected {width} fields, found {len(record)}", lineno)
            col = label_column % width
            label = record[col].strip()
            try:
                values = [float(cell) for i, cell in enumerate(record) if i != col]
            except ValueError as exc:
                raise ParseError(f"non-numeric feature ({exc})", lineno) from None
            rows.append(values)
            labels.append(label)
    if not rows:
        raise EmptyDatasetError(f"{path} contains no data rows")
    features = np.array(rows, dtype=np.float64)
    if not np.isfinite(features).all():
        raise ParseError("features must be finite")
    return LabeledDataset(name or path.stem, features, tuple(labels))


def _looks_like_header(record, label_column):
    col = label_column % len(record)
    for i, cell in enumerate(record):
        if i == col:
            continue
        try:
            float(cell)
        except ValueError:
            return True
    return False


def save_csv(ds, path, header=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [label])


def fit_bounds(features):
    return np.column_stack([features.min(axis=0), features.max(axis=0)])


def apply_bounds(features, bounds):
    """Map each column affinely so its stored (min, max) goes to (-1, 1).

    Constant columns map to 0.
    """
    features = np.asarray(features, dtype=np.float64)
    lo, hi = bounds[:, 0], bounds[:, 1]
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = 2.0 * (features - lo) / safe - 1.0
    return np.where(span > 0, out, 0.0)


def invert_bounds(features, bounds):
    lo, hi = bounds[:, 0], bounds[:, 1]
    span = hi - lo
    return np.where(span > 0, (features + 1.0) * span / 2.0 + lo, lo)


def normalize(ds, bounds=None):
    """Scale features to [-1, 1] using ``bounds`` or bounds fitted on ``ds``."""
    bounds = fit_bounds(ds.features) if bounds is None else np.asarray(bounds, dtype=np.float64)
    return replace(ds, features=apply_bounds(ds.features, bounds), feature_bounds=bounds)


def denormalize(ds):
    if ds.feature_bounds is None:
        raise ValueError("dataset carries no normalization bounds")
    return replace(ds, features=invert_bounds(ds.features, ds.feature_bounds), feature_bounds=None)


# --- schedules -------------------------------------------------------------


@dataclass(frozen=True)
class Phase:
    start: int
    end: int  # inclusive; None on the last phase means "through the end of the data"
    classes: tuple


@dataclass(frozen=True)
class Schedule:
    phases: tuple
    init_block: int = None
    name: str = "schedule"

    def __post_init__(self):
        if not self.phases:
            raise ScheduleError("schedule has no phases")
        if self.phases[0].start != 1:
            raise ScheduleError(f"first phase must start at 1, got {self.phases[0].start}")
        prev = None
        for i, ph in enumerate(self.phases, start=1):
            if not ph.classes:
                raise ScheduleError(f"phase {i} allows no classes")
            if ph.end is None:
                if i != len(self.phases):
                    raise ScheduleError(f"only the last phase may omit 'end' (phase {i})")
            elif ph.end < ph.start:
                raise ScheduleError(f"phase {i} ends ({ph.end}) before it starts ({ph.start})")
            if prev is not None:
                if ph.start != prev.end + 1:
                    raise ScheduleError(
                        f"phase {i} starts at {ph.start}, expected {prev.end + 1}"
                    )
                if not set(prev.classes) <= set(ph.classes):
                    raise ScheduleError(f"phase {i} drops classes allowed in phase {i - 1}")
            prev = ph
        if self.init_block is not None:
            first_end = self.phases[0].end
            if self.init_block < 1 or (first_end is not None and self.init_block > first_end):
                raise ScheduleError(
                    f"init_block {self.init_block} must lie within the first phase"
                )

    @property
    def classes(self):
        return list(self.phases[-1].classes)

    @property
    def length(self):
        """Total stream length, or None when the last phase is open-ended."""
        return self.phases[-1].end

    def introductions(self):
        """``(start, new classes)`` for every phase that adds classes."""
        out = []
        for prev, ph in zip(self.phases, self.phases[1:]):
            new = [c for c in ph.classes if c not in prev.classes]
            if new:
                out.append((ph.start, new))
        return out

    @classmethod
    def single_introduction(cls, old, new, point, total=None, init_block=None, name=None):
        """Two-phase schedule where ``new`` classes first appear at ``point``."""
        if point < 2:
            raise ScheduleError(f"introduction point {point} must be >= 2")
        if total is not None and point > total:
            raise ScheduleError(f"introduction point {point} exceeds stream length {total}")
        phases = (
            Phase(1, point - 1, tuple(old)),
            Phase(point, total, tuple(old) + tuple(c for c in new if c not in old)),
        )
        return cls(phases, init_block, name or f"introduce-at-{point}")

    def to_dict(self):
        return {
            "name": self.name,
            "init_block": self.init_block,
            "phases": [
                {"start": p.start, "end": p.end, "classes": list(p.classes)} for p in self.phases
            ],
        }


def schedule_from_dict(doc, name=None):
    try:
        phases = tuple(
            Phase(int(p["start"]), None if p.get("end") is None else int(p["end"]),
                  tuple(str(c) for c in p["classes"]))
            for p in doc["phases"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScheduleError(f"malformed schedule document: {exc}") from None
    init = doc.get("init_block")
    return Schedule(phases, None if init is None else int(init), doc.get("name") or name or "schedule")


def load_schedule(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScheduleError(f"{path}: cannot read schedule ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"{path}: invalid JSON ({exc})") from None
    return schedule_from_dict(doc, name=path.stem)


def save_schedule(schedule, path):
    Path(path).write_text(json.dumps(schedule.to_dict(), indent=2) + "\n", encoding="utf-8")


# --- streams ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Stream:
    features: np.ndarray
    labels: tuple
    source_indices: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.labels)


def build_stream(ds, schedule, seed, recycle=False):
    """Order ``ds`` so every phase only shows its allowed classes.

    Every phase opens with one sample of each class it introduces, in schedule
    order (the first phase introduces all of its classes), so a class first
    appears exactly at the start of the phase that allows it. The rest of the phase is a seeded shuffle drawn from
    the unused samples of the allowed classes. An open-ended last phase takes
    every remaining allowed sample.

    With ``recycle`` a phase that runs out of unused samples re-draws from
    already used samples of its allowed classes instead of failing.
    """
    rng = np.random.default_rng(seed)
    labels = np.asarray(ds.labels, dtype=object)
    present = set(ds.labels)
    for i, ph in enumerate(schedule.phases, start=1):
        missing = [c for c in ph.classes if c not in present]
        if missing:
            raise ScheduleError(f"phase {i} allows classes {missing!r} absent from {ds.name}")

    used = np.zeros(len(ds), dtype=bool)
    order = []
    prev_classes = ()
    for i, ph in enumerate(schedule.phases, start=1):
        allowed = np.isin(labels, list(ph.classes))
        new = [c for c in ph.classes if c not in prev_classes]
        head = []
        for c in new:
            pool = np.flatnonzero((labels == c) & ~used)
            if pool.size == 0:
                if not recycle:
                    raise ScheduleError(f"phase {i}: no unused sample of new class {c!r}")
                pool = np.flatnonzero(labels == c)
            pick = int(rng.choice(pool))
            used[pick] = True
            head.append(pick)
        pool = np.flatnonzero(allowed & ~used)
        if ph.end is None:
            demand = pool.size
        else:
            demand = ph.end - ph.start + 1 - len(head)
        if demand < 0:
            raise ScheduleError(f"phase {i} is shorter than its {len(head)} new classes")
        if demand <= pool.size:
            body = rng.permutation(pool)[:demand]
        elif recycle:
            deficit = demand - pool.size
            reuse_pool = np.flatnonzero(allowed)
            reps = -(-deficit // reuse_pool.size)
            reuse = np.concatenate([rng.permutation(reuse_pool) for _ in range(reps)])[:deficit]
            body = rng.permutation(np.concatenate([pool, reuse]))
        else:
            raise ScheduleError(
                f"phase {i} ({ph.start}-{ph.end}) needs {demand + len(head)} samples of "
                f"{list(ph.classes)!r}, only {pool.size + len(head)} available"
            )
        used[body] = True
        order.extend(head)
        order.extend(int(j) for j in body)
        prev_classes = ph.classes
    idx = np.asarray(order, dtype=np.intp)
    return Stream(ds.features[idx], tuple(ds.labels[j] for j in idx), idx)


# --- splits ----------------------------------------------------------------


def split(ds, test_fraction=0.2, seed=0, stratified=True):
    """Hold out ``test_fraction`` of ``ds``; stratified keeps every class in the test set."""
    if not 0.0 < test_fraction < 1.0:
        raise SplitError(f"test_fraction must lie strictly between 0 and 1, got {test_fraction}")
    rng = np.random.default_rng(seed)
    labels = np.asarray(ds.labels, dtype=object)
    test = []
    if stratified:
        for c in ds.classes:
            members = np.flatnonzero(labels == c)
            if members.size < 2:
                raise SplitError(f"class {c!r} has a single sample; cannot stratify")
            k = min(max(1, int(round(members.size * test_fraction))), members.size - 1)
            test.extend(rng.permutation(members)[:k])
    else:
        k = min(max(1, int(round(len(ds) * test_fraction))), len(ds) - 1)
        test.extend(rng.permutation(len(ds))[:k])
    mask = np.zeros(len(ds), dtype=bool)
    mask[np.asarray(test, dtype=np.intp)] = True
    return (
        ds.subset(np.flatnonzero(~mask), f"{ds.name}-train"),
        ds.subset(np.flatnonzero(mask), f"{ds.name}-test"),
    )


def kfold(ds, k, seed=0):
    """Stratified k-fold partition as a list of ``(train, test)`` pairs."""
    if k < 2:
        raise SplitError(f"need at least 2 folds, got {k}")
    if k > len(ds):
        raise SplitError(f"{k} folds requested for {len(ds)} samples")
    rng = np.random.default_rng(seed)
    labels = np.asarray(ds.labels, dtype=object)
    dealt = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in ds.classes])
    fold_of = np.empty(len(ds), dtype=np.intp)
    fold_of[dealt] = np.arange(len(ds)) % k
    return [
        (
            ds.subset(np.flatnonzero(fold_of != f), f"{ds.name}-fold{f}-train"),
            ds.subset(np.flatnonzero(fold_of == f), f"{ds.name}-fold{f}-test"),
        )
        for f in range(k)
    ]
