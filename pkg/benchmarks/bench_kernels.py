#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from execaware._kernels import _pure  # noqa: E402

try:
    from execaware._kernels import _core
except ImportError:
    _core = None


def timeit(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    rng = random.Random(0)
    line_nos = [rng.randint(1, 400) for _ in range(2_000_000)]
    x = [rng.uniform(0, 10) for _ in range(20_000)]
    y = [rng.uniform(0, 10) for _ in range(20_000)]
    doubled = sorted(rng.randint(1, 40) * 2 for _ in range(60))
    cap = sum(doubled) // 2
    return [
        ("line_counts (2M steps)", "line_counts", (line_nos,)),
        ("a12_counts (20k x 20k)", "a12_counts", (x, y)),
        ("signed_rank_tail (n=60)", "signed_rank_tail_count", (doubled, cap)),
    ]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled core not built; run: python setup.py build_ext --inplace")
        return 1

    print(f"{'workload':<26} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for label, name, call_args in workloads():
        pure_fn = getattr(_pure, name)
        core_fn = getattr(_core, name)
        assert pure_fn(*call_args) == core_fn(*call_args), f"{name} results differ"
        pure_s = timeit(pure_fn, *call_args, repeats=args.repeats)
        core_s = timeit(core_fn, *call_args, repeats=args.repeats)
        print(f"{label:<26} {pure_s * 1e3:>8.1f}ms {core_s * 1e3:>8.1f}ms "
              f"{pure_s / core_s:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
