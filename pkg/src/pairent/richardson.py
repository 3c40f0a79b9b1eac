"""Exact ground-state solver for the pairing model via its Bethe equations.

The M pair rapidities solving the Bethe equations collide pairwise and move
into the complex plane as the coupling grows, which makes direct root
tracking numerically fragile. We therefore work with the per-level sums

    Lambda_i = sum_alpha 1 / (eps_i - v_alpha),

which stay real and smooth along the ground-state branch. At the levels
eps_i they satisfy the closed quadratic system

    R_i = Lambda_i^2 - (2/g) Lambda_i
          - sum_{k != i} (Lambda_i - Lambda_k) / (eps_i - eps_k) = 0,

together with the exact counting identity sum_i Lambda_i = 2 M / g. The
quadratic system alone admits one solution per eigenstate of every pair
sector, and at strong coupling a near-uniform shift of all Lambda_i becomes
an approximate symmetry, degrading the plain Newton Jacobian to near
singularity. Appending the counting identity as an extra equation and
taking Gauss-Newton steps (QR least squares on the (L+1) x L system) pins
the pair sector and keeps the iteration matrix well conditioned at all
couplings; both residuals vanish together at a true solution, so quadratic
convergence is retained.

The ground branch is selected by continuation from the weak-coupling Fermi
sea, stepping in ln(lambda) with adaptive step control. Energies follow
from the identity

    sum_alpha v_alpha = (g/2) (sum_i eps_i Lambda_i - L M + M (M-1)),

and occupations <n_j> = dE/deps_j from implicit differentiation of the
converged system (finite differences remain available as a cross-check).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContinuationError, ConvergenceError, InvalidModelError
from .model import GroundSolution, ModelSpec, fermi_sea_energy

DEFAULT_TOL = 1e-11
DEFAULT_COUPLING_START = 0.01
DEFAULT_MAX_STEP_LN = 0.25
MIN_COUPLING_STEP = 1e-6
_MAX_ITER = 50
# A stalled iteration is accepted only if its residual sits at the evaluation
# floor of the quadratic form (cancellation in Lambda^2 - (2/g) Lambda).
_FLOOR_FACTOR = 256.0
# Tolerances at or below this are polished to the floor after convergence;
# looser requests stop near the threshold they asked for.
_POLISH_TOL = 1e-9


@dataclass(frozen=True)
class BetheState:
    """Converged Lambda variables for one (level set, M, coupling) point."""

    lambda_vars: np.ndarray
    spec: ModelSpec
    residual: float

    def __post_init__(self):
        arr = np.array(self.lambda_vars, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "lambda_vars", arr)


# --- residual, Jacobian and scales -------------------------------------------

def _pair_sums(lam, eps, absolute=False):
    diff_e = eps[:, None] - eps[None, :]
    np.fill_diagonal(diff_e, 1.0)
    num = lam[:, None] - lam[None, :]
    terms = num / diff_e
    if absolute:
        terms = np.abs(terms)
    np.fill_diagonal(terms, 0.0)
    return terms.sum(axis=1)


def _residual(lam, eps, g):
    return lam * lam - (2.0 / g) * lam - _pair_sums(lam, eps)


def _residual_floor(lam, eps, g):
    scale = lam * lam + (2.0 / g) * np.abs(lam) + _pair_sums(lam, eps, absolute=True)
    return _FLOOR_FACTOR * np.finfo(float).eps * float(np.max(scale))


def _augmented_residual(lam, eps, g, m_pairs):
    return np.concatenate([_residual(lam, eps, g), [lam.sum() - 2.0 * m_pairs / g]])


def _jacobian(lam, eps, g):
    diff_e = eps[:, None] - eps[None, :]
    np.fill_diagonal(diff_e, 1.0)
    jac = 1.0 / diff_e
    np.fill_diagonal(jac, 0.0)
    diag = 2.0 * lam - 2.0 / g - jac.sum(axis=1)
    np.fill_diagonal(jac, diag)
    return jac


def _augmented_jacobian(lam, eps, g):
    return np.vstack([_jacobian(lam, eps, g), np.ones((1, len(eps)))])


def _lstsq_qr(matrix, rhs):
    q, r = scipy.linalg.qr(matrix, mode="economic")
    return scipy.linalg.solve_triangular(r, q.T @ rhs)


def quadratic_bae_residual(lambda_vars, spec: ModelSpec) -> np.ndarray:
    """R_i of the quadratic system; zero exactly at a Bethe solution."""
    lam = np.asarray(lambda_vars, dtype=float)
    if lam.size != spec.n_levels:
        raise InvalidModelError("lambda_vars length must equal the level count")
    if spec.g <= 0:
        raise InvalidModelError("residual requires coupling > 0")
    return _residual(lam, spec.level_set.levels.copy(), spec.g)


def initial_guess(spec: ModelSpec) -> np.ndarray:
    """Weak-coupling start: rapidities sit g/2 below the lowest M levels.

    Gives Lambda_i ~ 2/g plus Fermi-sea Cauchy sums for occupied levels and
    the bare Cauchy sums for empty ones; accurate for spec.coupling << 1.
    """
    eps = spec.level_set.levels
    g, m = spec.g, spec.m_pairs
    if g <= 0:
        raise InvalidModelError("initial guess requires coupling > 0")
    lam = np.zeros(spec.n_levels)
    occupied = eps[:m]
    for i in range(spec.n_levels):
        others = occupied[np.arange(m) != i] if i < m else occupied
        lam[i] = np.sum(1.0 / (eps[i] - others))
        if i < m:
            lam[i] += 2.0 / g
    return lam


def _newton(lam, eps, g, m_pairs, tol, max_iter=_MAX_ITER):
    """Damped Gauss-Newton on the sum-rule-augmented quadratic system."""
    lam = np.array(lam, dtype=float)
    res = _augmented_residual(lam, eps, g, m_pairs)
    for iteration in range(max_iter):
        rmax = float(np.max(np.abs(res)))
        if rmax <= tol:
            if tol <= _POLISH_TOL:
                lam, rmax = _polish(lam, res, eps, g, m_pairs)
            return lam, rmax, iteration
        step = _lstsq_qr(_augmented_jacobian(lam, eps, g), -res)
        if not np.all(np.isfinite(step)):
            raise ConvergenceError(
                "singular Jacobian; try a smaller continuation step", residual=rmax
            )
        norm0 = np.linalg.norm(res)
        damping = 1.0
        while True:
            candidate = lam + damping * step
            res_cand = _augmented_residual(candidate, eps, g, m_pairs)
            if np.linalg.norm(res_cand) < norm0:
                lam, res = candidate, res_cand
                break
            damping *= 0.5
            if damping < 1e-8:
                if rmax <= _residual_floor(lam, eps, g):
                    return lam, rmax, iteration
                raise ConvergenceError("Newton stalled", residual=rmax)
    rmax = float(np.max(np.abs(res)))
    if rmax <= max(tol, _residual_floor(lam, eps, g)):
        return lam, rmax, max_iter
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations", residual=rmax
    )


def _polish(lam, res, eps, g, m_pairs, rounds=2):
    """Full Gauss-Newton steps from an already-converged point.

    Quadratic convergence drives the residual to its evaluation floor, so
    downstream energies and occupations do not inherit the stop threshold.
    """
    rmax = float(np.max(np.abs(res)))
    for _ in range(rounds):
        step = _lstsq_qr(_augmented_jacobian(lam, eps, g), -res)
        if not np.all(np.isfinite(step)):
            break
        candidate = lam + step
        res_cand = _augmented_residual(candidate, eps, g, m_pairs)
        rmax_cand = float(np.max(np.abs(res_cand)))
        if rmax_cand >= rmax:
            break
        lam, res, rmax = candidate, res_cand, rmax_cand
    return lam, rmax


def newton_solve(init, spec: ModelSpec, tol: float = DEFAULT_TOL,
                 max_iter: int = _MAX_ITER) -> BetheState:
    """Converge the quadratic system from `init` at spec.coupling.

    Convergence is declared at max |R_i| <= tol, or at the double-precision
    evaluation floor of the quadratic form when that is larger (relevant
    for very small couplings, where 2/g dominates the Lambda scale).
    """
    if spec.g <= 0:
        raise InvalidModelError("newton_solve requires coupling > 0")
    eps = spec.level_set.levels.copy()
    lam, rmax, _ = _newton(np.asarray(init, dtype=float), eps, spec.g,
                           spec.m_pairs, tol, max_iter)
    return BetheState(lambda_vars=lam, spec=spec, residual=rmax)


def _energy(lam, eps, g, m_pairs):
    n = len(eps)
    root_sum = 0.5 * g * (float(eps @ lam) - n * m_pairs + m_pairs * (m_pairs - 1))
    return 2.0 * root_sum + g * m_pairs


def energy_from_state(state: BetheState) -> float:
    """Ground energy 2 sum_alpha v_alpha + g M, via the Lambda identity."""
    spec = state.spec
    return _energy(state.lambda_vars, spec.level_set.levels, spec.g, spec.m_pairs)


# --- continuation in the coupling ---------------------------------------------

class _Walker:
    """Warm-started continuation along increasing coupling."""

    def __init__(self, spec: ModelSpec, start: float, tol: float, max_step_ln: float):
        self.eps = spec.level_set.levels.copy()
        self.d = spec.level_set.d
        self.m = spec.m_pairs
        self.tol = tol
        self.max_step_ln = max_step_ln
        self.coupling = start
        g0 = self.d * start
        self.lam, self.residual, _ = _newton(
            initial_guess(spec.with_coupling(start)), self.eps, g0, self.m, tol
        )
        self.energy = _energy(self.lam, self.eps, g0, self.m)

    def advance_to(self, target: float):
        step_ln = self.max_step_ln
        while self.coupling < target * (1.0 - 1e-14):
            trial = min(target, self.coupling * np.exp(step_ln))
            g_old = self.d * self.coupling
            g_new = self.d * trial
            warm = self.lam.copy()
            warm[: self.m] += 2.0 / g_new - 2.0 / g_old  # analytic 2/g update
            try:
                lam_new, rmax, iters = _newton(warm, self.eps, g_new, self.m, self.tol)
                energy_new = _energy(lam_new, self.eps, g_new, self.m)
                if energy_new > self.energy + 1e-9 * (1.0 + abs(self.energy)):
                    raise ConvergenceError(
                        "energy increased along the sweep: off the ground branch",
                        residual=rmax,
                    )
            except ConvergenceError:
                step_ln *= 0.5
                if self.coupling * step_ln < MIN_COUPLING_STEP:
                    raise ContinuationError(
                        "coupling step underflow", last_good=self.coupling
                    ) from None
                continue
            self.lam, self.coupling, self.energy = lam_new, trial, energy_new
            self.residual = rmax
            if iters <= 4:
                step_ln = min(step_ln * 1.6, self.max_step_ln)


def continuation_sweep(spec: ModelSpec, coupling_grid, tol: float = DEFAULT_TOL,
                       coupling_start: float = DEFAULT_COUPLING_START,
                       max_step_ln: float = DEFAULT_MAX_STEP_LN) -> list[BetheState]:
    """Solve along an ascending coupling grid, warm-starting each point."""
    grid = np.asarray(coupling_grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InvalidModelError("coupling grid must be non-empty and ascending")
    if grid[0] <= 0:
        raise InvalidModelError("coupling grid must start above zero")
    walker = _Walker(spec, min(coupling_start, float(grid[0])), tol, max_step_ln)
    states = []
    for target in grid:
        walker.advance_to(float(target))
        states.append(
            BetheState(
                lambda_vars=walker.lam.copy(),
                spec=spec.with_coupling(float(target)),
                residual=walker.residual,
            )
        )
    return states


def solve_state(spec: ModelSpec, tol: float = DEFAULT_TOL,
                coupling_start: float = DEFAULT_COUPLING_START,
                max_step_ln: float = DEFAULT_MAX_STEP_LN) -> BetheState:
    """Continuation from weak coupling up to spec.coupling."""
    if spec.coupling <= 0:
        raise InvalidModelError("solve_state requires coupling > 0")
    return continuation_sweep(
        spec, [spec.coupling], tol=tol, coupling_start=coupling_start,
        max_step_ln=max_step_ln,
    )[-1]


def occupations_from_state(state: BetheState, method: str = "implicit",
                           fd_step: float = 1e-6) -> np.ndarray:
    """Per-level <n_j> = dE/deps_j for the converged state.

    method="implicit" differentiates the solved system, reusing the
    Gauss-Newton matrix: solve J (dLambda/deps_j) = -dR/deps_j for all j at
    once, then chain through the energy identity. method="fd" re-solves at
    eps_j +- fd_step and central differences the energy; it is the slow
    cross-check path, also used automatically if the implicit solve fails.
    """
    spec = state.spec
    eps = spec.level_set.levels.copy()
    g, m = spec.g, spec.m_pairs
    lam = state.lambda_vars
    n = spec.n_levels
    if method == "implicit":
        diff_e = eps[:, None] - eps[None, :]
        np.fill_diagonal(diff_e, 1.0)
        w = (lam[:, None] - lam[None, :]) / (diff_e * diff_e)
        np.fill_diagonal(w, 0.0)
        drde = -w
        np.fill_diagonal(drde, w.sum(axis=1))
        rhs = np.vstack([-drde, np.zeros((1, n))])  # the counting row is eps-free
        sens = _lstsq_qr(_augmented_jacobian(lam, eps, g), rhs)
        if np.all(np.isfinite(sens)):
            return g * (lam + sens.T @ eps)
        warnings.warn(
            "implicit differentiation failed (singular Jacobian); "
            "falling back to finite differences",
            RuntimeWarning,
            stacklevel=2,
        )
        method = "fd"
    if method != "fd":
        raise InvalidModelError(f"unknown occupations method {method!r}")
    occ = np.empty(n)
    for j in range(n):
        energies = []
        for sign in (+1.0, -1.0):
            eps_mod = eps.copy()
            eps_mod[j] += sign * fd_step
            lam_mod, _, _ = _newton(lam, eps_mod, g, m, max(state.residual, DEFAULT_TOL))
            energies.append(_energy(lam_mod, eps_mod, g, m))
        occ[j] = (energies[0] - energies[1]) / (2.0 * fd_step)
    return occ


def solve_ground_from_state(state: BetheState) -> GroundSolution:
    """Energy and occupations of an already-converged state."""
    return GroundSolution(
        energy=energy_from_state(state),
        occupations=occupations_from_state(state),
        source="bethe",
    )


def solve_ground(spec: ModelSpec, tol: float = DEFAULT_TOL,
                 coupling_start: float = DEFAULT_COUPLING_START,
                 max_step_ln: float = DEFAULT_MAX_STEP_LN) -> GroundSolution:
    """Ground energy and occupations, tagged as the bethe backend.

    coupling = 0 returns the Fermi sea directly (the Lambda variables are
    undefined there).
    """
    if spec.coupling == 0:
        occ = np.zeros(spec.n_levels)
        occ[: spec.m_pairs] = 2.0
        return GroundSolution(energy=fermi_sea_energy(spec), occupations=occ,
                              source="bethe")
    return solve_ground_from_state(
        solve_state(spec, tol=tol, coupling_start=coupling_start,
                    max_step_ln=max_step_ln)
    )


# --- diagnostics ---------------------------------------------------------------

def reconstruct_pair_roots(state: BetheState) -> np.ndarray:
    """Rapidities v_alpha as zeros of the monic polynomial with P'/P = Lambda.

    Solves the linear least-squares system P'(eps_i) = Lambda_i P(eps_i)
    for the polynomial coefficients and extracts its roots. Diagnostic for
    small systems only; the Vandermonde structure degrades quickly with L.
    """
    spec = state.spec
    m = spec.m_pairs
    if m == 0:
        return np.zeros(0, dtype=complex)
    if spec.n_levels > 16:
        raise InvalidModelError("root reconstruction is a small-system diagnostic (L <= 16)")
    eps = spec.level_set.levels
    lam = state.lambda_vars
    powers = eps[:, None] ** np.arange(m + 1)[None, :]  # eps_i^q
    dpowers = np.zeros_like(powers)
    dpowers[:, 1:] = powers[:, :-1] * np.arange(1, m + 1)[None, :]
    # unknowns a_0..a_{m-1} of P = z^m + sum a_q z^q
    a_mat = dpowers[:, :m] - lam[:, None] * powers[:, :m]
    b_vec = lam * powers[:, m] - dpowers[:, m]
    coeffs, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
    return np.roots(np.concatenate([[1.0], coeffs[::-1]]))


def dump_states(states, stream) -> None:
    """Write one diagnostic row per state: coupling, residual, Lambda_1..L."""
    for state in states:
        fields = [state.spec.coupling, state.residual, *state.lambda_vars]
        stream.write(",".join(f"{x:.17g}" for x in fields) + "\n")
