#!/usr/bin/env python3
"""Benchmark the compiled alignment kernels against the pure-Python fallback.

Run after `pip install -e .`:

    python3 benchmarks/bench_kernels.py [--sizes 50,200,800] [--repeat 5]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time
from array import array

from codemix.metrics import _pykernels

try:
    from codemix.metrics import _ckernels
except ImportError:
    _ckernels = None


def time_call(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def bench_lcs(size, repeat, rng):
    a = [rng.randrange(size // 2 + 1) for _ in range(size)]
    b = [rng.randrange(size // 2 + 1) for _ in range(size)]
    rows = []
    py_best, _ = time_call(lambda: _pykernels.lcs_length_ids(a, b), repeat)
    rows.append(("lcs", size, "python", py_best, 1.0))
    if _ckernels is not None:
        aa, bb = array("q", a), array("q", b)
        c_best, _ = time_call(lambda: _ckernels.lcs_length_ids(aa, bb), repeat)
        rows.append(("lcs", size, "cython", c_best, py_best / c_best))
        assert _ckernels.lcs_length_ids(aa, bb) == _pykernels.lcs_length_ids(a, b)
    return rows


def bench_align(size, repeat, rng):
    n_stages = 3
    hyp = [rng.randrange(-1, size // 2 + 1) for _ in range(n_stages * size)]
    ref = [rng.randrange(-1, size // 2 + 1) for _ in range(n_stages * size)]
    rows = []
    py_best, _ = time_call(
        lambda: _pykernels.greedy_align_ids(hyp, ref, n_stages, size, size), repeat)
    rows.append(("align", size, "python", py_best, 1.0))
    if _ckernels is not None:
        ah, ar = array("q", hyp), array("q", ref)
        c_best, _ = time_call(
            lambda: _ckernels.greedy_align_ids(ah, ar, n_stages, size, size), repeat)
        rows.append(("align", size, "cython", c_best, py_best / c_best))
        assert (_ckernels.greedy_align_ids(ah, ar, n_stages, size, size)
                == _pykernels.greedy_align_ids(hyp, ref, n_stages, size, size))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,200,800",
                        help="comma-separated sequence lengths")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _ckernels is None:
        print("note: compiled kernels unavailable, timing pure Python only")
    rng = random.Random(args.seed)
    rows = []
    for size in (int(s) for s in args.sizes.split(",")):
        rows.extend(bench_lcs(size, args.repeat, rng))
        rows.extend(bench_align(size, args.repeat, rng))

    print(f"{'kernel':<8}{'size':>6}  {'backend':<8}{'best (ms)':>12}{'speedup':>10}")
    for kernel, size, backend, best, speedup in rows:
        print(f"{kernel:<8}{size:>6}  {backend:<8}{best * 1e3:>12.3f}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
