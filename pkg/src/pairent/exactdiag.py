"""Exact diagonalization of the pairing Hamiltonian in the paired sector.

With every electron paired, each level is a two-state system (empty or
doubly occupied) and the Hamiltonian acts on occupation bitmasks: diagonal
2 * sum of occupied eps_j, off-diagonal -g between masks that differ by
moving one pair. This module is the brute-force oracle for the Bethe
solver and the source of explicit reduced density matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import kernels
from .errors import CapacityError, ConvergenceError, InvalidModelError
from .model import GroundSolution, ModelSpec

DEFAULT_DIM_BUDGET = 5_000_000
DENSE_CUTOFF = 4096

# Full ququadrit embedding scales as 4**L; 10 levels is already a megavector.
_EMBED_MAX_LEVELS = 10


@dataclass(frozen=True)
class PairedBasis:
    """Enumerated M-pair occupation masks for L levels, ascending."""

    n_levels: int
    n_pairs: int
    masks: np.ndarray
    rank_table: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.masks.size)

    def index_of(self, mask: int) -> int:
        """Invert the enumeration: position of a popcount-M mask."""
        return kernels.rank_of(mask, self.rank_table)


def build_paired_basis(n_levels: int, n_pairs: int,
                       dim_budget: int = DEFAULT_DIM_BUDGET) -> PairedBasis:
    if not 0 <= n_pairs <= n_levels:
        raise InvalidModelError(f"need 0 <= M <= L, got M={n_pairs}, L={n_levels}")
    dim = kernels.basis_dimension(n_levels, n_pairs)
    if dim > dim_budget:
        raise CapacityError(n_levels, n_pairs, dim, dim_budget)
    masks = kernels.build_masks(n_levels, n_pairs)
    table = kernels.build_rank_table(n_levels, n_pairs)
    return PairedBasis(n_levels=n_levels, n_pairs=n_pairs, masks=masks, rank_table=table)


class PairHamiltonian:
    """Matrix-free application of the pairing Hamiltonian on a PairedBasis."""

    def __init__(self, spec: ModelSpec, basis: PairedBasis):
        if basis.n_levels != spec.n_levels or basis.n_pairs != spec.m_pairs:
            raise InvalidModelError("basis does not match the model spec")
        self.spec = spec
        self.basis = basis
        self.g = spec.g
        self.diag = kernels.diagonal_energies(basis.masks, spec.level_set.levels)

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.size != self.basis.dim:
            raise InvalidModelError(
                f"vector length {vec.size} does not match basis dimension {self.basis.dim}"
            )
        return kernels.pair_hop_matvec(
            self.basis.masks, self.diag, self.g, vec,
            self.basis.rank_table, self.basis.n_levels,
        )

    def norm_bound(self) -> float:
        """Row-sum bound on ||H||: max |diagonal| plus g per possible hop."""
        hops = self.basis.n_pairs * (self.basis.n_levels - self.basis.n_pairs)
        return float(np.max(np.abs(self.diag))) + self.g * hops

    def dense(self) -> np.ndarray:
        """Explicit matrix, built state by state. Intended for small dims."""
        dim = self.basis.dim
        h = np.zeros((dim, dim))
        h[np.diag_indices(dim)] = self.diag
        if self.g == 0.0:
            return h
        n = self.basis.n_levels
        for s, mask in enumerate(self.basis.masks):
            mask = int(mask)
            for j in range(n):
                if not mask >> j & 1:
                    continue
                removed = mask ^ (1 << j)
                for k in range(n):
                    if mask >> k & 1:
                        continue
                    t = self.basis.index_of(removed | (1 << k))
                    h[t, s] -= self.g
        return h


def apply_hamiltonian(spec: ModelSpec, basis: PairedBasis, vec: np.ndarray) -> np.ndarray:
    """H @ vec without forming H."""
    return PairHamiltonian(spec, basis).matvec(vec)


def ground_state(spec: ModelSpec, basis: PairedBasis | None = None,
                 dense_cutoff: int = DENSE_CUTOFF,
                 dim_budget: int = DEFAULT_DIM_BUDGET,
                 residual_factor: float = 1e-10,
                 maxiter: int | None = None) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of the paired-sector Hamiltonian.

    Dense symmetric solve up to `dense_cutoff` dimensions, implicitly
    restarted Lanczos (ARPACK) above, started from the uniform positive
    vector so repeated runs are bit-identical. The returned vector is
    normalized and sign-fixed to the positive Perron convention; the
    residual ||H v - E v|| is checked against residual_factor * ||H||.
    """
    if basis is None:
        basis = build_paired_basis(spec.n_levels, spec.m_pairs, dim_budget)
    ham = PairHamiltonian(spec, basis)
    dim = basis.dim
    if dim == 1:
        return float(ham.diag[0]), np.ones(1)
    if dim <= dense_cutoff:
        w, v = scipy.linalg.eigh(ham.dense(), subset_by_index=(0, 0))
        energy, vec = float(w[0]), v[:, 0]
    else:
        op = LinearOperator((dim, dim), matvec=ham.matvec, dtype=float)
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        try:
            w, v = eigsh(op, k=1, which="SA", v0=v0, tol=0, maxiter=maxiter)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"Lanczos did not converge for dim {dim}", residual=None
            ) from exc
        energy, vec = float(w[0]), v[:, 0]
    vec = vec / np.linalg.norm(vec)
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    residual = float(np.linalg.norm(ham.matvec(vec) - energy * vec))
    bound = residual_factor * ham.norm_bound()
    if residual > bound:
        raise ConvergenceError(
            f"eigenpair residual exceeds {bound:.3e}", residual=residual
        )
    return energy, vec


def occupations(vec: np.ndarray, basis: PairedBasis) -> np.ndarray:
    """Per-level <n_j> = 2 * sum of |amplitude|^2 over masks occupying j."""
    vec = np.asarray(vec, dtype=float).reshape(-1)
    if vec.size != basis.dim:
        raise InvalidModelError("vector length does not match basis dimension")
    weights = vec * vec
    norm = weights.sum()
    return 2.0 * kernels.occupation_sums(basis.masks, weights, basis.n_levels) / norm


def pair_occupation_second_moment(vec: np.ndarray, basis: PairedBasis) -> np.ndarray:
    """<n_j^2> per level; equals 2 <n_j> in the paired sector (n_j in {0, 2})."""
    return 2.0 * occupations(vec, basis)


def solve_ground(spec: ModelSpec, **kwargs) -> GroundSolution:
    """Ground energy and occupations, tagged as the exactdiag backend."""
    basis = kwargs.pop("basis", None)
    if basis is None:
        basis = build_paired_basis(
            spec.n_levels, spec.m_pairs, kwargs.pop("dim_budget", DEFAULT_DIM_BUDGET)
        )
    energy, vec = ground_state(spec, basis=basis, **kwargs)
    return GroundSolution(energy=energy, occupations=occupations(vec, basis),
                          source="exactdiag")


# --- explicit reduced density matrices ---------------------------------------
#
# Each level hosts four states |00>, |10>, |01>, |11> (two-qubit encoding of
# empty / up / down / pair). The paired ground state populates only |00> and
# |11>, so its embedding into the 4**L product space is sign-free: pair
# creation operators commute and every level carries an even fermion number.

def embed_ququadrit_state(vec: np.ndarray, basis: PairedBasis) -> np.ndarray:
    """Embed a paired-sector vector into the full 4**L product space."""
    n = basis.n_levels
    if n > _EMBED_MAX_LEVELS:
        raise CapacityError(n, basis.n_pairs, 4**n, 4**_EMBED_MAX_LEVELS)
    vec = np.asarray(vec, dtype=float).reshape(-1)
    psi = np.zeros(4**n)
    # ququadrit digit 3 = |11> (pair), 0 = |00>; level j is digit j (base 4)
    digits = np.zeros(basis.dim, dtype=np.int64)
    for j in range(n):
        occupied = ((basis.masks >> np.uint64(j)) & np.uint64(1)).astype(np.int64)
        digits += occupied * (3 << (2 * j))
    psi[digits] = vec
    return psi


def ququadrit_density_matrix(vec: np.ndarray, basis: PairedBasis, level: int) -> np.ndarray:
    """4x4 reduced density matrix of one level, by explicit partial trace."""
    n = basis.n_levels
    if not 0 <= level < n:
        raise InvalidModelError(f"level must be in [0, {n})")
    psi = embed_ququadrit_state(vec, basis)
    tensor = psi.reshape([4] * n)
    # reshape is row-major, so axis 0 is the most significant digit = level n-1
    tensor = np.moveaxis(tensor, n - 1 - level, 0).reshape(4, -1)
    return tensor @ tensor.T


def qubit_density_matrix(rho4: np.ndarray, which: int = 0) -> np.ndarray:
    """Trace one qubit out of a ququadrit density matrix.

    Basis ordering is |q1 q0> with q0 the least significant bit; which=0
    keeps q0, which=1 keeps q1.
    """
    r = np.asarray(rho4).reshape(2, 2, 2, 2)  # indices (q1, q0, q1', q0')
    if which == 0:
        return np.einsum("aibj->ij", r)
    return np.einsum("iajb->ij", r)


def effective_qubit_expectations(rho4: np.ndarray) -> tuple[float, float, float]:
    """(<sx>, <sy>, <sz>) of the effective qubit spanned by |00> and |11>."""
    sx = float(np.real(rho4[0, 3] + rho4[3, 0]))
    sy = float(np.imag(rho4[3, 0] - rho4[0, 3]))
    sz = float(np.real(rho4[3, 3] - rho4[0, 0]))
    return sx, sy, sz
