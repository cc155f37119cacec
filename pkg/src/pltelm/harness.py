"""Experiment driver: learning curves, consistency, cross-validation,
weight-calculation accounting and timing-of-introduction studies."""

import csv
import math
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import data, kernels
from .data import LabeledDataset, Phase, Schedule
from .errors import ConfigError, PltError, ScheduleError
from .plt import LAST_CHUNK, PltModel, closed_form_saving, weight_calc_report
from .projection import Activation, hidden_matrix, init_projection

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fmt(v):
    """Floats in every output file carry 6 significant digits."""
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: object  # path or LabeledDataset
    schedule: object = None  # path, Schedule, or None for "all classes from the start"
    hidden: int = None  # default: 20 when n <= 4, else 60
    activation: str = "sigmoid"
    chunk: int = 1
    init: int = None  # default: schedule.init_block, else max(hidden, 30)
    seed: int = 0
    trials: int = 10
    folds: int = 10
    test_fraction: float = 0.2
    out: str = None
    delta: str = LAST_CHUNK
    stream_length: int = None  # closes an open-ended last phase
    recycle: bool = False
    label_column: int = -1


@dataclass
class Resolved:
    dataset: LabeledDataset
    schedule: Schedule
    hidden: int
    init: int
    config: ExperimentConfig


def resolve(cfg):
    """Load inputs and fill defaults; raises ConfigError on inconsistent settings."""
    ds = cfg.dataset
    if not isinstance(ds, LabeledDataset):
        ds = data.load_csv(cfg.dataset, has_header=None, label_column=cfg.label_column)
    sched = cfg.schedule
    if sched is None:
        sched = Schedule((Phase(1, None, tuple(ds.classes)),), None, "all-classes")
    elif not isinstance(sched, Schedule):
        sched = data.load_schedule(sched)
    if cfg.stream_length is not None:
        sched = with_length(sched, cfg.stream_length)
    hidden = cfg.hidden or (20 if ds.features.shape[1] <= 4 else 60)
    init = cfg.init or sched.init_block or max(hidden, 30)
    if cfg.chunk < 1:
        raise ConfigError(f"chunk size must be >= 1, got {cfg.chunk}")
    if cfg.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
    if init < hidden:
        raise ConfigError(f"initial block ({init}) must be at least the hidden count ({hidden})")
    try:
        Activation(cfg.activation)
    except ValueError:
        raise ConfigError(f"unknown activation {cfg.activation!r}") from None
    return Resolved(ds, sched, hidden, init, cfg)


def with_length(schedule, length):
    last = schedule.phases[-1]
    if last.end is not None:
        if last.end != length:
            raise ScheduleError(f"schedule ends at {last.end}, stream length {length} requested")
        return schedule
    return replace(schedule, phases=schedule.phases[:-1] + (replace(last, end=length),))


# --- single run ------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    samples: int
    overall: float
    per_class: dict


@dataclass
class RunResult:
    tag: str
    seed: int
    points: list
    classes: list  # curve column order: registry order, then never-learned test classes
    events: list
    report: object  # WeightCalcReport
    breakdown: list  # [(samples, output width)] in stream order
    static_classes: int
    model: PltModel = field(repr=False, default=None)

    @property
    def final_accuracy(self):
        return self.points[-1].overall if self.points else float("nan")


def _evaluate(h_test, beta, registry, test_labels, test_classes):
    predicted = np.argmax(kernels.matmul(h_test, beta), axis=1)
    truth = np.array([registry.index(t) if t in registry else -1 for t in test_labels])
    correct = predicted == truth
    per_class = {}
    for c in test_classes:
        mask = np.array([t == c for t in test_labels])
        per_class[c] = float(correct[mask].mean())
    return float(correct.mean()), per_class


def run_stream(res, train, test, seed, tag="run"):
    """Normalize, build the scheduled stream, train PLT chunk by chunk.

    When ``test`` is given, accuracy is recorded after the initial block and
    after every chunk.
    """
    cfg = res.config
    train_n = data.normalize(train)
    stream = data.build_stream(train_n, res.schedule, seed, recycle=cfg.recycle)
    if res.init > len(stream):
        raise ConfigError(f"initial block ({res.init}) exceeds stream length ({len(stream)})")
    proj = init_projection(train.features.shape[1], res.hidden, cfg.activation, seed)
    model = PltModel.start(proj, stream.features[: res.init], stream.labels[: res.init], cfg.delta)

    h_test = None
    test_labels = test_classes = None
    if test is not None:
        test_n = data.normalize(test, train_n.feature_bounds)
        h_test = hidden_matrix(proj, test_n.features)
        test_labels = list(test_n.labels)
        test_classes = [c for c in res.schedule.classes if c in set(test_labels)]
        test_classes += [c for c in dict.fromkeys(test_labels) if c not in test_classes]

    points = []

    def record():
        if h_test is not None:
            registry = list(model.classes)
            overall, per_class = _evaluate(h_test, model.beta, registry, test_labels, test_classes)
            points.append(CurvePoint(model.state.samples_seen, overall, per_class))

    widths = [(res.init, len(model.classes))]
    record()
    for start in range(res.init, len(stream), cfg.chunk):
        stop = min(start + cfg.chunk, len(stream))
        model.learn_chunk(stream.features[start:stop], stream.labels[start:stop])
        widths.append((stop - start, len(model.classes)))
        record()

    breakdown = []
    for count, width in widths:
        if breakdown and breakdown[-1][1] == width:
            breakdown[-1] = (breakdown[-1][0] + count, width)
        else:
            breakdown.append((count, width))
    static = len(res.schedule.classes)
    classes = list(model.classes)
    if test_classes:
        classes += [c for c in test_classes if c not in classes]
    return RunResult(
        tag=tag,
        seed=seed,
        points=points,
        classes=classes,
        events=list(model.log),
        report=weight_calc_report(model, static),
        breakdown=breakdown,
        static_classes=static,
        model=model,
    )


# --- experiments -----------------------------------------------------------


@dataclass
class ExperimentResult:
    kind: str
    runs: list
    summary: dict = field(default_factory=dict)
    table: list = None  # rows for report.csv when the experiment is not run-shaped


def run_learning_curve(cfg, tag="curve"):
    res = cfg if isinstance(cfg, Resolved) else resolve(cfg)
    c = res.config
    train, test = data.split(res.dataset, c.test_fraction, c.seed, stratified=True)
    run = run_stream(res, train, test, c.seed, tag)
    return ExperimentResult("curve", [run], {"final_accuracy": run.final_accuracy})


def _mean_std(values):
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def run_consistency(cfg, seeds=None):
    """Repeat the learning curve with seeds ``seed, seed+1, ...``."""
    res = resolve(cfg)
    c = res.config
    if c.trials < 2:
        raise ConfigError("consistency needs at least 2 trials")
    seeds = list(seeds) if seeds is not None else [c.seed + t for t in range(c.trials)]
    runs = []
    for t, s in enumerate(seeds):
        trial = replace(res, config=replace(c, seed=s))
        runs.extend(run_learning_curve(trial, tag=f"trial{t}").runs)
    mean, std = _mean_std([r.final_accuracy for r in runs])
    return ExperimentResult("consistency", runs, {"mean": mean, "std": std})


def run_crossval(cfg):
    res = resolve(cfg)
    c = res.config
    if not 2 <= c.folds <= len(res.dataset):
        raise ConfigError(f"folds must lie in 2..{len(res.dataset)}, got {c.folds}")
    runs = [
        run_stream(res, train, test, c.seed, tag=f"fold{f}")
        for f, (train, test) in enumerate(data.kfold(res.dataset, c.folds, c.seed))
    ]
    mean, std = _mean_std([r.final_accuracy for r in runs])
    return ExperimentResult("crossval", runs, {"mean": mean, "std": std, "folds": c.folds})


def accounting_dataset(schedule, seed=0, n_features=4):
    """Separable Gaussian blobs with enough rows of every class to fill ``schedule``."""
    if schedule.length is None:
        raise ScheduleError("accounting without a dataset needs a schedule with an explicit end")
    rng = np.random.default_rng(seed)
    classes = schedule.classes
    per_class = schedule.length
    centers = rng.uniform(-3.0, 3.0, size=(len(classes), n_features))
    feats = np.vstack([ctr + rng.normal(0.0, 0.5, size=(per_class, n_features)) for ctr in centers])
    labels = tuple(c for c in classes for _ in range(per_class))
    return LabeledDataset(f"{schedule.name}-synthetic", feats, labels)


def _formula(breakdown):
    return " + ".join(f"({n} * {w})" for n, w in breakdown) if len(breakdown) > 1 else (
        f"{breakdown[0][0]} * {breakdown[0][1]}"
    )


def reduction_record(name, run, schedule):
    rep = run.report
    widths = [len(ph.classes) for ph in schedule.phases]
    lengths = [ph.end - ph.start + 1 for ph in schedule.phases] if schedule.length else None
    closed = closed_form_saving(lengths, widths, run.static_classes) if lengths else None
    return {
        "dataset": name,
        "oselm_calculations": f"{rep.oselm_units // run.static_classes} * {run.static_classes}",
        "oselm_units": rep.oselm_units,
        "introduction_points": " ".join(str(e.sample_index) for e in run.events),
        "plt_calculations": _formula(run.breakdown),
        "plt_units": rep.plt_units,
        "percent_saved": f"{rep.percent_saved:.2f}",
        "closed_form_percent": "" if closed is None else f"{closed:.2f}",
    }


def run_reduction_report(cfg, schedules=None):
    """Table of weight calculations saved against a fixed-width OS-ELM.

    Runs the learner over each schedule. Without a dataset, each schedule is
    filled with synthetic samples (only the labels matter for the counts).
    """
    if schedules is None:
        if cfg.schedule is None:
            raise ConfigError("the reduction report needs a schedule")
        schedules = [cfg.schedule]
    rows, runs = [], []
    for sched in schedules:
        if not isinstance(sched, Schedule):
            sched = data.load_schedule(sched)
        if cfg.dataset is None:
            ds = accounting_dataset(sched, cfg.seed)
            sub = replace(cfg, dataset=ds, schedule=sched, hidden=cfg.hidden or 10)
            res = resolve(sub)
            # Counts depend only on which width each sample is learned at, so
            # any chunk size dividing the init block and every phase gives the
            # same units; the largest such one keeps the run short.
            lengths = [ph.end - ph.start + 1 for ph in sched.phases]
            aligned = math.gcd(res.init, *lengths)
            if aligned % cfg.chunk == 0:
                res = replace(res, config=replace(res.config, chunk=aligned))
            run = run_stream(res, ds, None, cfg.seed, tag=sched.name)
            name = sched.name
        else:
            sub = replace(cfg, schedule=sched)
            run = run_learning_curve(sub, tag=sched.name).runs[0]
            res = resolve(sub)
            name = res.dataset.name
        runs.append(run)
        rows.append(reduction_record(name, run, res.schedule))
    return ExperimentResult("reduce", runs, {}, rows)


def run_timing_study(cfg, points=(6, 71, 131)):
    """One learning curve per introduction point of the new class(es).

    Old classes are those of the base schedule's first phase (or every class
    but the last when no schedule is given); the rest are introduced at each
    point. All runs share the split, projection and seed.
    """
    res = resolve(cfg)
    c = res.config
    base = res.schedule
    if len(base.phases) > 1:
        old = list(base.phases[0].classes)
        new = [x for x in base.classes if x not in old]
    else:
        old, new = list(res.dataset.classes[:-1]), [res.dataset.classes[-1]]
    total = c.stream_length
    runs = []
    for p in points:
        sched = Schedule.single_introduction(old, new, int(p), total, base.init_block)
        sub = replace(c, dataset=res.dataset, schedule=sched, stream_length=None)
        r = resolve(sub)
        runs.extend(run_learning_curve(r, tag=f"p{p}").runs)
    finals = [r.final_accuracy for r in runs]
    spread = max(finals) - min(finals)
    return ExperimentResult("timing", runs, {"points": list(points), "spread": spread})


# --- outputs ---------------------------------------------------------------


def _write_rows(path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise PltError(f"cannot write {path}: {exc}") from exc


def write_curve(run, path):
    header = ["samples", "overall"] + list(run.classes)
    rows = [
        [p.samples, p.overall] + [p.per_class.get(c, 0.0) for c in run.classes]
        for p in run.points
    ]
    _write_rows(path, header, rows)


def write_events(run, path):
    rows = [[e.sample_index, e.c, " ".join(e.labels)] for e in run.events]
    _write_rows(path, ["sample_index", "c", "labels"], rows)


def _run_row(run):
    rep = run.report
    return [run.tag, run.seed, run.points[-1].samples if run.points else "",
            run.final_accuracy, len(run.events), rep.oselm_units, rep.plt_units,
            rep.percent_saved]


RUN_HEADER = ["run", "seed", "samples", "final_accuracy", "recalibrations",
              "oselm_units", "plt_units", "percent_saved"]


def emit_outputs(result, outdir):
    """Write curve/events/report CSVs and an SVG rendering into ``outdir``."""
    from .svg import line_chart

    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise PltError(f"cannot create {outdir}: {exc}") from exc
    written = []

    if result.table is not None:
        header = list(result.table[0].keys()) if result.table else []
        _write_rows(outdir / "report.csv", header, [list(r.values()) for r in result.table])
        return [outdir / "report.csv"]

    runs = [r for r in result.runs if r.points]
    single = len(result.runs) == 1
    for run in result.runs:
        suffix = "" if single else f"_{run.tag}"
        if run.points:
            write_curve(run, outdir / f"curve{suffix}.csv")
            written.append(outdir / f"curve{suffix}.csv")
        write_events(run, outdir / f"events{suffix}.csv")
        written.append(outdir / f"events{suffix}.csv")

    rows = [_run_row(r) for r in result.runs]
    for key in ("mean", "std"):
        if key in result.summary:
            rows.append([key, "", "", result.summary[key], "", "", "", ""])
    _write_rows(outdir / "report.csv", RUN_HEADER, rows)
    written.append(outdir / "report.csv")

    if runs:
        if single:
            run = runs[0]
            series = {"overall": ([p.samples for p in run.points], [p.overall for p in run.points])}
            for c in run.classes:
                series[c] = ([p.samples for p in run.points], [p.per_class[c] for p in run.points])
            markers = [e.sample_index for e in run.events]
        else:
            series = {
                r.tag: ([p.samples for p in r.points], [p.overall for p in r.points]) for r in runs
            }
            markers = []
        svg = line_chart(series, title=f"{result.kind}: testing accuracy",
                         x_label="samples processed", y_label="testing accuracy",
                         markers=markers)
        (outdir / "curve.svg").write_text(svg, encoding="utf-8")
        written.append(outdir / "curve.svg")
    return written
