"""Throughput of the compiled kernels against the numpy fallback.

    python benchmarks/bench_backends.py [--horizon N] [--reps R]

Reports urn steps per second for a single long path (``draw_path``) and for
a batch of replicates (``batch_counts``), and checks both backends return
identical results.
"""

import argparse
import time

import numpy as np

from polyurn import _backend
from polyurn.model import build_model


def _timed(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(name, model, horizon, reps, repeat, seed=1):
    k = _backend.get(name)
    args = (model.alpha, model.tau, model.S, model.c, model.m)
    ck = np.array([horizon], dtype=np.int64)
    t_path, (draws, _) = _timed(lambda: k.draw_path(*args, horizon, seed, 0, 0), repeat)
    t_batch, X = _timed(lambda: k.batch_counts(*args, horizon, seed, 0, reps, ck), repeat)
    return {
        "path": horizon / t_path,
        "batch": horizon * reps / t_batch,
        "draws": np.asarray(draws),
        "X": np.asarray(X),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=10**5)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--path-horizon", type=int, default=10**5,
                    help="length of the single-path benchmark")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    model = build_model(2, 1, 1, 2, 1, 1)
    results = {}
    print(f"model {model.label()}, batch {args.reps} x {args.horizon}, path {args.path_horizon}")
    print(f"{'backend':10} {'path steps/s':>14} {'batch steps/s':>14}")
    for name in _backend.available():
        r = bench(name, model, args.horizon, args.reps, args.repeat)
        p = bench(name, model, args.path_horizon, 1, args.repeat)
        r["path"], r["draws"] = p["path"], p["draws"]
        results[name] = r
        print(f"{name:10} {r['path']:14.3e} {r['batch']:14.3e}")
    if len(results) == 2:
        c, py = results["compiled"], results["python"]
        same = np.array_equal(c["X"], py["X"]) and np.array_equal(c["draws"], py["draws"])
        print(f"speedup: path {c['path'] / py['path']:.1f}x, batch {c['batch'] / py['batch']:.1f}x")
        print(f"identical outputs: {same}")


if __name__ == "__main__":
    main()
