# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the paired-sector Hamiltonian.

Mask lookup is a bytewise combinadic rank (O(1) per hop target), so the
matrix-vector product needs no searching and no stored index arrays.
"""

import numpy as np

cimport numpy as cnp

ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64

cdef extern from *:
    """
    static inline int pairent_popcount8(unsigned int b) {
        b = b - ((b >> 1) & 0x55u);
        b = (b & 0x33u) + ((b >> 2) & 0x33u);
        return (int)((b + (b >> 4)) & 0x0Fu);
    }
    """
    int pairent_popcount8(unsigned int b) nogil


cdef inline Py_ssize_t rank_lookup(u64 mask, const i64[:, :, ::1] table,
                                   int n_bytes) nogil:
    cdef Py_ssize_t rank = 0
    cdef int b, seen = 0
    cdef unsigned int byte
    for b in range(n_bytes):
        byte = <unsigned int>((mask >> (8 * b)) & <u64>0xFF)
        if byte != 0:
            rank += table[b, byte, seen]
            seen += pairent_popcount8(byte)
    return rank


def pair_hop_matvec(const u64[::1] masks, const double[::1] diag, double g,
                    const double[::1] vec, double[::1] out,
                    const i64[:, :, ::1] rank_table, int n_levels):
    cdef Py_ssize_t dim = masks.shape[0]
    cdef int n_bytes = rank_table.shape[0]
    cdef Py_ssize_t s, t
    cdef int j, a, b, n_occ, n_emp
    cdef int occ[64]
    cdef int emp[64]
    cdef u64 m, removed
    cdef double amp
    with nogil:
        for s in range(dim):
            out[s] = diag[s] * vec[s]
        if g != 0.0:
            for s in range(dim):
                amp = vec[s]
                if amp == 0.0:
                    continue
                m = masks[s]
                n_occ = 0
                n_emp = 0
                for j in range(n_levels):
                    if m & ((<u64>1) << j):
                        occ[n_occ] = j
                        n_occ += 1
                    else:
                        emp[n_emp] = j
                        n_emp += 1
                for a in range(n_occ):
                    removed = m ^ ((<u64>1) << occ[a])
                    for b in range(n_emp):
                        t = rank_lookup(removed | ((<u64>1) << emp[b]),
                                        rank_table, n_bytes)
                        out[t] -= g * amp


def occupation_sums(const u64[::1] masks, const double[::1] weights,
                    double[::1] out, int n_levels):
    cdef Py_ssize_t dim = masks.shape[0]
    cdef Py_ssize_t s
    cdef int j
    cdef u64 m
    cdef double w
    with nogil:
        for j in range(n_levels):
            out[j] = 0.0
        for s in range(dim):
            w = weights[s]
            m = masks[s]
            for j in range(n_levels):
                if m & ((<u64>1) << j):
                    out[j] += w
