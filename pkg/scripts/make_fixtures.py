"""Regenerate the bundled CSV datasets and schedule files.

    python scripts/make_fixtures.py

iris.csv is the UCI iris data as shipped with scikit-learn. characters.csv is
synthetic: five Gaussian clusters (A-E) in 17 dimensions, 1000 rows each.
"""

from pathlib import Path

import numpy as np

from pltelm.data import LabeledDataset, Phase, Schedule, save_csv, save_schedule

OUT = Path(__file__).resolve().parent.parent / "src" / "pltelm" / "fixtures"


def iris():
    from sklearn.datasets import load_iris

    raw = load_iris()
    names = [str(n) for n in raw.target_names]
    labels = tuple(names[t] for t in raw.target)
    return LabeledDataset("iris", raw.data.astype(np.float64), labels)


def characters(per_class=1000, n_features=17, seed=2024):
    rng = np.random.default_rng(seed)
    letters = "ABCDE"
    centers = rng.normal(0.0, 1.0, size=(len(letters), n_features))
    scales = rng.uniform(0.8, 1.2, size=(len(letters), n_features))
    rows, labels = [], []
    for center, scale, letter in zip(centers, scales, letters):
        rows.append(center + scale * rng.normal(0.0, 0.9, size=(per_class, n_features)))
        labels.extend([letter] * per_class)
    features = np.round(np.vstack(rows), 6)
    return LabeledDataset("characters", features, tuple(labels))


def schedules():
    iris3 = ("setosa", "versicolor", "virginica")
    out = {
        "iris_table2": Schedule(
            (Phase(1, 50, iris3[:2]), Phase(51, None, iris3)), None, "iris_table2"
        ),
        "char_table10": Schedule(
            (Phase(1, 800, ("A", "B")), Phase(801, 1600, ("A", "B", "C")),
             Phase(1601, 3096, ("A", "B", "C", "D"))), 100, "char_table10"
        ),
        "char_table11": Schedule(
            (Phase(1, 800, ("A", "B")), Phase(801, 1600, ("A", "B", "C")),
             Phase(1601, 2000, ("A", "B", "C", "D")),
             Phase(2001, 3850, ("A", "B", "C", "D", "E"))), 100, "char_table11"
        ),
        "char_table13": Schedule(
            (Phase(1, 800, ("A", "B")), Phase(801, 2000, ("A", "B", "C", "D")),
             Phase(2001, 3850, ("A", "B", "C", "D", "E"))), 100, "char_table13"
        ),
    }
    # Weight-calculation accounting schedules, one per dataset row.
    rows = {
        "iris": (150, 51, 3),
        "waveform": (3000, 1501, 3),
        "balance": (1100, 351, 3),
        "wine": (120, 71, 3),
        "satellite": (4500, 3001, 6),
        "digit": (4000, 3001, 10),
    }
    for name, (total, point, m) in rows.items():
        classes = tuple(f"c{i}" for i in range(m))
        out[f"reduce_{name}"] = Schedule(
            (Phase(1, point - 1, classes[:-1]), Phase(point, total, classes)),
            None,
            f"reduce_{name}",
        )
    return out


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for ds in (iris(), characters()):
        n = ds.features.shape[1]
        save_csv(ds, OUT / f"{ds.name}.csv", header=[f"f{i + 1}" for i in range(n)] + ["label"])
    for name, sched in schedules().items():
        save_schedule(sched, OUT / f"{name}.json")


if __name__ == "__main__":
    main()
