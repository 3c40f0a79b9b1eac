#!/usr/bin/env python3
"""Benchmark the compiled pair-hopping kernels against the NumPy fallback.

Times the Hamiltonian matrix-vector product (the hot loop of the exact
diagonalization path) and one full ground-state solve per backend.

Usage:
    python benchmarks/bench_kernels.py [--sizes 10 12 14 16] [--repeats 5]
"""

import argparse
import time

import numpy as np

from pairent import _kernels_py, kernels
from pairent.exactdiag import build_paired_basis, ground_state
from pairent.model import uniform_spec

try:
    from pairent import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def time_matvec(impl, masks, diag, g, table, n_levels, repeats):
    rng = np.random.default_rng(0)
    vec = rng.standard_normal(masks.size)
    out = np.empty_like(vec)
    impl.pair_hop_matvec(masks, diag, g, vec, out, table, n_levels)  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.pair_hop_matvec(masks, diag, g, vec, out, table, n_levels)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+", default=[10, 12, 14, 16])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.insert(0, ("cython", _kernels_cy))
    else:
        print("compiled kernels not built; timing the fallback only\n")

    print(f"{'L':>4} {'dim':>9}", *(f"{name + ' (ms)':>14}" for name, _ in backends),
          f"{'speedup':>9}" if len(backends) == 2 else "")
    for n_levels in args.sizes:
        m = n_levels // 2
        spec = uniform_spec(n_levels, 1.0)
        basis = build_paired_basis(n_levels, m)
        diag = kernels.diagonal_energies(basis.masks, spec.level_set.levels)
        times = [time_matvec(impl, basis.masks, diag, spec.g, basis.rank_table,
                             n_levels, args.repeats)
                 for _, impl in backends]
        row = [f"{n_levels:>4} {basis.dim:>9}"]
        row += [f"{1e3 * t:>14.3f}" for t in times]
        if len(times) == 2:
            row.append(f"{times[1] / times[0]:>9.1f}x")
        print(*row)

    largest = max(args.sizes)
    spec = uniform_spec(largest, 1.0)
    t0 = time.perf_counter()
    energy, _ = ground_state(spec)
    print(f"\nground state at L={largest}, lambda=1 "
          f"({kernels.BACKEND} backend): E = {energy:.12f} "
          f"in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
