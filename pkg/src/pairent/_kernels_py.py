"""NumPy fallback kernels; same contracts as the compiled extension.

The hop loop runs over ordered level pairs (j, k) and scatters both hop
directions at once. For a fixed pair the source->target map is a bijection,
so plain fancy indexing is safe (no duplicate targets).
"""

import numpy as np


def pair_hop_matvec(masks, diag, g, vec, out, rank_table, n_levels):
    np.multiply(diag, vec, out=out)
    if g == 0.0:
        return
    for j in range(n_levels):
        bit_j = np.uint64(1 << j)
        for k in range(j + 1, n_levels):
            bit_k = np.uint64(1 << k)
            both = bit_j | bit_k
            src = np.nonzero((masks & both) == bit_j)[0]
            if src.size == 0:
                continue
            tgt = np.searchsorted(masks, masks[src] ^ both)
            out[tgt] -= g * vec[src]
            out[src] -= g * vec[tgt]


def occupation_sums(masks, weights, out, n_levels):
    for j in range(n_levels):
        occupied = (masks & np.uint64(1 << j)).astype(bool)
        out[j] = weights[occupied].sum()
