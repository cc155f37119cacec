"""Time the numba kernels against the numpy fallback and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Kernel timings run in-process against both backends. The end-to-end rows run
``pltelm curve`` in a subprocess per backend (``PLTELM_DISABLE_NUMBA``) and
compare the written curve files byte for byte.
"""

import argparse
import filecmp
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from pltelm.harness import FIXTURES
from pltelm.kernels import SIGMOID, numba_backend, numpy_backend


def best_of(fn, repeat):
    fn()  # warm-up (numba compiles or loads its cache here)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(rng):
    p, n, rows = 60, 17, 400
    a = rng.normal(size=(rows, p))
    b = rng.normal(size=(p, 5))
    g = rng.normal(size=(p, p))
    spd = g @ g.T + p * np.eye(p)
    x = rng.uniform(-1, 1, size=(rows, n))
    w = rng.uniform(-1, 1, size=(p, n))
    bias = rng.uniform(-1, 1, size=p)
    m = np.linalg.inv(spd)
    beta = rng.normal(size=(p, 5))
    h = rng.uniform(0, 1, size=(50, p))
    t = np.where(rng.random((50, 5)) < 0.2, 1.0, -1.0)
    return {
        f"matmul {rows}x{p} @ {p}x5": lambda k: k.matmul(a, b),
        f"gauss_jordan_inverse {p}x{p}": lambda k: k.gauss_jordan_inverse(spd, 1e-12)[0],
        f"hidden_layer {rows}x{n} -> {p}": lambda k: k.hidden_layer(x, w, bias, SIGMOID),
        f"rls_step P={p} b=50": lambda k: k.rls_step(m, beta, h, t, 1e-12)[1],
    }


def end_to_end(name, args, repeat):
    row = {}
    outputs = {}
    with tempfile.TemporaryDirectory() as tmp:
        for label, flag in (("numba", "0"), ("numpy", "1")):
            env = dict(os.environ, PLTELM_DISABLE_NUMBA=flag)
            out = Path(tmp) / label
            cmd = [sys.executable, "-m", "pltelm", "curve", *args, "--out", str(out)]
            subprocess.run(cmd, env=env, check=True, capture_output=True)  # warm cache

            def once():
                subprocess.run(cmd, env=env, check=True, capture_output=True)

            row[label] = best_of(once, repeat)
            outputs[label] = out
        same = all(
            filecmp.cmp(outputs["numba"] / f, outputs["numpy"] / f, shallow=False)
            for f in ("curve.csv", "events.csv")
        )
    return name, row["numba"], row["numpy"], same


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    rows = []
    for name, case in kernel_cases(rng).items():
        fast = best_of(lambda: case(numba_backend), args.repeat)
        slow = best_of(lambda: case(numpy_backend), args.repeat)
        same = np.array_equal(case(numba_backend), case(numpy_backend)) or np.allclose(
            case(numba_backend), case(numpy_backend), rtol=1e-12, atol=1e-12
        )
        rows.append((name, fast, slow, same))

    if not args.skip_end_to_end:
        rows.append(end_to_end("curve iris P=20 b=1", [
            "--dataset", str(FIXTURES / "iris.csv"),
            "--schedule", str(FIXTURES / "iris_table2.json"),
        ], max(1, args.repeat // 2)))
        rows.append(end_to_end("curve characters P=60 b=50", [
            "--dataset", str(FIXTURES / "characters.csv"),
            "--schedule", str(FIXTURES / "char_table11.json"), "--chunk", "50",
        ], max(1, args.repeat // 2)))

    print(f"{'case':34s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}  agree")
    for name, fast, slow, same in rows:
        print(f"{name:34s} {fast:10.5f} {slow:10.5f} {slow / fast:8.1f}x  {same}")
    return 0 if all(r[3] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
