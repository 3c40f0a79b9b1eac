"""Hot kernels for the paired-sector Hamiltonian, with backend selection.

The pair-hopping matrix-vector product dominates the cost of the exact
diagonalization path. A compiled Cython implementation is used when the
extension module built from ``_kernels.pyx`` is importable; otherwise a
vectorized NumPy fallback takes over. Set ``PAIRENT_KERNELS=python`` or
``PAIRENT_KERNELS=cython`` to force a backend (the latter raises if the
extension is missing).

Basis states are occupation bitmasks stored as uint64, enumerated in
increasing numeric order; level j corresponds to bit j. Lookup of a mask's
position uses the combinadic rank, evaluated bytewise from a precomputed
table so the compiled kernel never searches.
"""

from __future__ import annotations

import os
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels_py

_requested = os.environ.get("PAIRENT_KERNELS", "").strip().lower()
if _requested not in ("", "cython", "python"):
    raise ImportError(f"PAIRENT_KERNELS must be 'cython' or 'python', got {_requested!r}")

_impl = None
if _requested in ("", "cython"):
    try:
        from . import _kernels as _impl  # compiled extension
    except ImportError:
        _impl = None
    if _impl is None and _requested == "cython":
        raise ImportError("PAIRENT_KERNELS=cython but the compiled extension is not built")
if _impl is not None:
    BACKEND = "cython"
else:
    _impl = _kernels_py
    BACKEND = "python"


def basis_dimension(n_levels: int, n_pairs: int) -> int:
    return comb(n_levels, n_pairs)


def build_masks(n_levels: int, n_pairs: int) -> np.ndarray:
    """All n_levels-bit masks with popcount n_pairs, numerically ascending."""
    if n_levels > 63:
        raise ValueError("bitmask basis supports at most 63 levels")
    dim = basis_dimension(n_levels, n_pairs)
    masks = np.fromiter(
        (sum(1 << j for j in bits) for bits in combinations(range(n_levels), n_pairs)),
        dtype=np.uint64,
        count=dim,
    )
    masks.sort()  # position-tuple order is not numeric order
    return masks


def build_rank_table(n_levels: int, n_pairs: int) -> np.ndarray:
    """Bytewise combinadic rank table.

    table[b, v, c] is the rank contribution of byte b holding value v when
    c set bits were seen in lower bytes: sum over the set bits i of v, in
    ascending order q = 1, 2, ..., of binomial(8b + i, c + q). Entries that
    would exceed n_pairs set bits are unreachable and left at -1.
    """
    n_bytes = (n_levels + 7) // 8
    table = np.full((n_bytes, 256, n_pairs + 1), -1, dtype=np.int64)
    for b in range(n_bytes):
        for value in range(256):
            bits = [i for i in range(8) if value >> i & 1]
            for seen in range(n_pairs + 1):
                if seen + len(bits) > n_pairs:
                    continue
                table[b, value, seen] = sum(
                    comb(8 * b + i, seen + q) for q, i in enumerate(bits, start=1)
                )
    return table


def rank_of(mask: int, rank_table: np.ndarray) -> int:
    """Position of `mask` in the ascending fixed-popcount enumeration."""
    rank = 0
    seen = 0
    for b in range(rank_table.shape[0]):
        byte = (int(mask) >> (8 * b)) & 0xFF
        if byte:
            contrib = int(rank_table[b, byte, seen])
            if contrib < 0:
                raise ValueError("mask popcount exceeds the table's pair count")
            rank += contrib
            seen += bin(byte).count("1")
    return rank


def diagonal_energies(masks: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Diagonal elements 2 * sum of eps_j over occupied levels, per mask."""
    diag = np.zeros(masks.shape[0])
    for j, eps_j in enumerate(levels):
        occupied = (masks >> np.uint64(j)) & np.uint64(1)
        diag += 2.0 * eps_j * occupied.astype(float)
    return diag


def pair_hop_matvec(masks, diag, g, vec, rank_table, n_levels) -> np.ndarray:
    """Apply the paired-sector Hamiltonian: diagonal plus -g pair hops."""
    vec = np.ascontiguousarray(vec, dtype=float)
    out = np.empty_like(vec)
    _impl.pair_hop_matvec(masks, diag, float(g), vec, out, rank_table, int(n_levels))
    return out


def occupation_sums(masks, weights, n_levels) -> np.ndarray:
    """Per-level sums of `weights` over the masks occupying that level."""
    weights = np.ascontiguousarray(weights, dtype=float)
    out = np.empty(int(n_levels))
    _impl.occupation_sums(masks, weights, out, int(n_levels))
    return out
