#!/usr/bin/env python3
"""Compare the compiled and pure-python backends primitive by primitive.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --sizes 500 1000 2000 --repeats 7

For every backend primitive this times both implementations on the same
inputs and prints a python/compiled ratio, plus one end-to-end row for
the full normalized-dependence estimate (pairwise distances, median
bandwidth, RBF map, centering, statistic) at d=512, the configuration
the quadratic-scaling budget is stated for. Ratios below 1 mean the
numpy path is faster; expect that for BLAS-shaped work like
pairwise_sq_dists and the elementwise reductions, and expect the
compiled path to win on centering and the permutation gather.
"""

import argparse
import time

import numpy as np

from kerndep import _backend
from kerndep.hsic import hsic_normalized
from kerndep.kernels import KernelSpec, RBF, gram


def timed(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def primitive_cases(n, rng):
    x = rng.standard_normal((n, 64))
    d2 = _backend.pairwise_sq_dists(x)
    g = _backend.rbf_from_sq_dists(d2, 1.0)
    k = _backend.center(g)
    l = _backend.center(_backend.rbf_from_sq_dists(d2 * 0.5, 1.3))
    perm = rng.permutation(n)
    return [
        ("pairwise_sq_dists", lambda: _backend.pairwise_sq_dists(x)),
        ("rbf_from_sq_dists", lambda: _backend.rbf_from_sq_dists(d2, 1.0)),
        ("rbf_inplace", lambda: _backend.rbf_from_sq_dists_inplace(d2.copy(), 1.0)),
        ("center", lambda: _backend.center(g)),
        ("centered_stats", lambda: _backend.centered_stats(g, g)),
        ("max_abs", lambda: _backend.max_abs(g)),
        ("max_asym", lambda: _backend.max_asym(g)),
        ("sum_product", lambda: _backend.sum_product(k, l)),
        ("fro_norm", lambda: _backend.fro_norm(k)),
        ("permuted_sum_product", lambda: _backend.permuted_sum_product(k, l, perm)),
    ]


def full_estimate(x, y):
    spec = KernelSpec(RBF)
    return hsic_normalized(gram(x, spec), gram(y, spec)).value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 2000])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    available = _backend.available_backends()
    if "compiled" not in available:
        raise SystemExit(f"compiled backend not built; available: {available}")

    print(f"backends: {available}, default {_backend.backend_name()}")
    header = f"{'primitive':<22}{'n':>6}{'compiled':>12}{'python':>12}{'py/comp':>9}"
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(0)
    for n in args.sizes:
        cases = primitive_cases(n, rng)
        rows = {}
        for backend in ("compiled", "python"):
            previous = _backend.select(backend)
            try:
                for name, fn in cases:
                    rows.setdefault(name, {})[backend] = timed(
                        fn, repeats=args.repeats)
            finally:
                _backend.select(previous)
        for name, by_backend in rows.items():
            ratio = by_backend["python"] / by_backend["compiled"]
            print(f"{name:<22}{n:>6}{by_backend['compiled']*1e3:>10.2f}ms"
                  f"{by_backend['python']*1e3:>10.2f}ms{ratio:>9.2f}")
        print()

    print("full normalized estimate, d=512 (gram + gram + statistic):")
    for n in args.sizes:
        x = rng.standard_normal((n, 512))
        y = rng.standard_normal((n, 512))
        line = f"{'hsic_normalized':<22}{n:>6}"
        for backend in ("compiled", "python"):
            previous = _backend.select(backend)
            try:
                full_estimate(x, y)
                line += f"{timed(full_estimate, x, y, repeats=args.repeats)*1e3:>10.2f}ms"
            finally:
                _backend.select(previous)
        print(line)


if __name__ == "__main__":
    main()
