"""Time the compiled histogram kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 50000] [--d 10] [--repeat 3]

Reports per-kernel timings and a full boosted fit, and checks that both
backends produce identical trees.
"""

import argparse
import time

import numpy as np

from fairlabel.classify import ClassifierSpec, fit_matrix
from fairlabel.classify._kernels import available_backends, load_backend
from fairlabel.classify.trees import apply_bins, compute_bin_edges


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--rounds", type=int, default=50)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the python fallback is available")

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.n, args.d))
    y = (X[:, 0] * X[:, 1] + 0.3 * rng.normal(size=args.n) > 0).astype(np.int8)
    edges = compute_bin_edges(X, 255)
    bins = apply_bins(X, edges)
    rows = np.arange(args.n, dtype=np.int64)
    grad, hess = rng.normal(size=args.n), rng.random(args.n)
    n_bins = np.array([len(e) + 1 for e in edges], dtype=np.int32)
    spec = ClassifierSpec(kind="gbt", n_rounds=args.rounds)

    timings, models = {}, {}
    for name in backends:
        kern = load_backend(name)
        hist = kern.build_histogram(bins, rows, grad, hess, 256)
        t_hist = best_of(lambda: kern.build_histogram(bins, rows, grad, hess, 256), args.repeat)
        t_split = best_of(lambda: kern.best_split(hist, n_bins, 1.0, 1.0, 0.0), args.repeat)
        t_fit = best_of(lambda: models.__setitem__(name, fit_matrix(spec, X, y, kern=kern)), 1)
        t_pred = best_of(lambda: models[name].raw_score(X, kern=kern), args.repeat)
        timings[name] = (t_hist, t_split, t_fit, t_pred)

    print(f"n={args.n} d={args.d} rounds={args.rounds}")
    print(f"{'backend':<8} {'histogram':>11} {'best_split':>11} {'gbt fit':>9} {'predict':>9}")
    for name, (h, s, f, p) in timings.items():
        print(f"{name:<8} {h * 1e3:9.2f}ms {s * 1e3:9.2f}ms {f:8.2f}s {p * 1e3:7.1f}ms")
    if len(timings) == 2:
        cy, py = timings["cython"], timings["python"]
        print("speedup  " + "  ".join(f"{p / c:9.1f}x" for c, p in zip(cy, py)))
        same = np.array_equal(models["cython"].raw_score(X), models["python"].raw_score(X))
        print(f"identical scores across backends: {same}")


if __name__ == "__main__":
    main()
