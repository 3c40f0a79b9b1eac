"""Entanglement measures derived from ground-state occupations.

In the paired sector each level is an effective qubit and its entanglement
with the rest of the system reduces to the pair-occupation fluctuation
sqrt(<n>(2 - <n>)). The average of these local concurrences (ALC) and its
ratio to the condensation energy are the quantities swept by the CLI; the
ratio peaks at a threshold coupling for finite systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidModelError, SweepTooSparseError
from .model import GroundSolution, ModelSpec, fermi_sea_energy

#: Weak-coupling limit of ALC^2 / cond_energy: 2 ln^2(3 + sqrt 8) / ln 2.
WEAK_COUPLING_RATIO = 2.0 * math.log(3.0 + math.sqrt(8.0)) ** 2 / math.log(2.0)

_CLAMP_SLACK = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def local_concurrence(occupation):
    """sqrt(<n>(2 - <n>)) for <n> in [0, 2]; scalar or array.

    Values outside the range by at most 1e-12 are clamped (numerical
    slack); larger violations raise.
    """
    occ = np.asarray(occupation, dtype=float)
    if np.any(occ < -_CLAMP_SLACK) or np.any(occ > 2.0 + _CLAMP_SLACK):
        raise InvalidModelError("occupation outside [0, 2]")
    occ = np.clip(occ, 0.0, 2.0)
    out = np.sqrt(occ * (2.0 - occ))
    return out if out.ndim else float(out)


def site_entropy(concurrence: float) -> float:
    """Binary entropy of the level's reduced state, from its concurrence.

    The two eigenvalues are (1 +- sqrt(1 - C^2)) / 2; entropy in bits.
    """
    if not 0.0 <= concurrence <= 1.0 + _CLAMP_SLACK:
        raise InvalidModelError("concurrence must lie in [0, 1]")
    c = min(concurrence, 1.0)
    root = math.sqrt(max(1.0 - c * c, 0.0))
    total = 0.0
    for eig in ((1.0 + root) / 2.0, (1.0 - root) / 2.0):
        if eig > 0.0:
            total -= eig * math.log2(eig)
    return total


def alc(concurrences) -> float:
    """Average local concurrence: plain mean of the per-level values."""
    values = np.asarray(concurrences, dtype=float)
    if values.size == 0:
        raise InvalidModelError("need at least one concurrence")
    if np.any(values < -_CLAMP_SLACK) or np.any(values > 1.0 + _CLAMP_SLACK):
        raise InvalidModelError("concurrences must lie in [0, 1]")
    return float(values.mean())


def cond_energy(ground_energy: float, spec: ModelSpec) -> float:
    """Dimensionless condensation energy (E_FS - E0) / (omega_d L)."""
    value = (fermi_sea_energy(spec) - ground_energy) / (spec.omega_d * spec.n_levels)
    if value < -1e-12:
        raise InvalidModelError(
            f"negative condensation energy {value:.3e}: ground energy above the "
            "Fermi sea signals a solver fault"
        )
    return max(value, 0.0)


@dataclass(frozen=True)
class EntanglementReport:
    """Per-level concurrences plus the derived aggregates for one solve."""

    local_concurrences: np.ndarray
    alc: float
    cond_energy: float
    ratio: float  # alc^2 / cond_energy; nan at zero coupling
    source: str

    def __post_init__(self):
        arr = np.array(self.local_concurrences, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "local_concurrences", arr)


def report_from_solution(solution: GroundSolution, spec: ModelSpec) -> EntanglementReport:
    concurrences = local_concurrence(solution.occupations)
    mean = alc(concurrences)
    cond = cond_energy(solution.energy, spec)
    ratio = mean * mean / cond if cond > 0.0 else math.nan
    return EntanglementReport(
        local_concurrences=concurrences,
        alc=mean,
        cond_energy=cond,
        ratio=ratio,
        source=solution.source,
    )


@dataclass(frozen=True)
class ThresholdResult:
    """Ratio curve with the located maximum.

    at_boundary is True for monotone curves, whose maximum sits at the grid
    edge (the coupling -> 0 end for the decreasing ones); coupling_star is
    then the edge grid value, unrefined.
    """

    ratios: np.ndarray
    coupling_star: float
    ratio_star: float
    at_boundary: bool


def ratio_and_threshold(couplings, alcs, cond_energies, resolve=None,
                        rel_tol: float = 1e-3) -> ThresholdResult:
    """Ratio curve ALC^2 / cond_energy and its maximum over the sweep.

    An interior grid maximum is refined by golden-section search inside the
    bracketing grid interval; `resolve` must then map a coupling to a fresh
    (alc, cond_energy) pair, so the refined maximum is solver-accurate
    rather than interpolated. Without `resolve` the grid maximum is
    returned as is.
    """
    lam = np.asarray(couplings, dtype=float)
    alcs = np.asarray(alcs, dtype=float)
    conds = np.asarray(cond_energies, dtype=float)
    if not lam.size == alcs.size == conds.size:
        raise InvalidModelError("couplings, alcs and cond_energies must align")
    if lam.size < 3:
        raise SweepTooSparseError("need at least three sweep points to bracket a maximum")
    if np.any(np.diff(lam) <= 0):
        raise InvalidModelError("couplings must be strictly increasing")
    if np.any(conds <= 0):
        raise InvalidModelError("ratio undefined where the condensation energy vanishes")
    ratios = alcs * alcs / conds
    k = int(np.argmax(ratios))
    if k == 0 or k == lam.size - 1:
        return ThresholdResult(ratios=ratios, coupling_star=float(lam[k]),
                               ratio_star=float(ratios[k]), at_boundary=True)
    if resolve is None:
        return ThresholdResult(ratios=ratios, coupling_star=float(lam[k]),
                               ratio_star=float(ratios[k]), at_boundary=False)

    def ratio_at(coupling):
        mean, cond = resolve(coupling)
        return mean * mean / cond

    lo, hi = float(lam[k - 1]), float(lam[k + 1])
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = ratio_at(x1), ratio_at(x2)
    while (hi - lo) > rel_tol * 0.5 * (hi + lo):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = ratio_at(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = ratio_at(x1)
    star = 0.5 * (lo + hi)
    return ThresholdResult(ratios=ratios, coupling_star=star,
                           ratio_star=ratio_at(star), at_boundary=False)


def bethe_sweep_reports(spec_base: ModelSpec, couplings, tol: float | None = None):
    """One EntanglementReport per coupling, from a single warm-started sweep."""
    from . import richardson

    kwargs = {} if tol is None else {"tol": tol}
    states = richardson.continuation_sweep(spec_base, couplings, **kwargs)
    return [
        report_from_solution(richardson.solve_ground_from_state(state), state.spec)
        for state in states
    ]


def bethe_ratio_resolver(spec_base: ModelSpec, tol: float | None = None):
    """Callable coupling -> (alc, cond_energy) via a fresh Bethe solve.

    Feed to ratio_and_threshold as `resolve` so the refined threshold is
    solver-accurate.
    """
    from . import richardson

    kwargs = {} if tol is None else {"tol": tol}

    def resolve(coupling: float) -> tuple[float, float]:
        spec = spec_base.with_coupling(coupling)
        report = report_from_solution(richardson.solve_ground(spec, **kwargs), spec)
        return report.alc, report.cond_energy

    return resolve


def asymptotic_values(coupling: float, n_levels: int, regime: str) -> tuple[float, float]:
    """Leading-order (cond_energy, alc) in the strong or weak coupling regime.

    strong: cond ~ lambda/2,            alc ~ 1 - 1/(6 lambda^2)
    weak:   cond ~ lambda^2 ln(2) / L,  alc ~ lambda sqrt(2/L) ln(3 + sqrt 8)
    """
    if regime == "strong":
        return coupling / 2.0, 1.0 - 1.0 / (6.0 * coupling * coupling)
    if regime == "weak":
        cond = coupling * coupling * math.log(2.0) / n_levels
        mean = coupling * math.sqrt(2.0 / n_levels) * math.log(3.0 + math.sqrt(8.0))
        return cond, mean
    raise InvalidModelError(f"regime must be 'weak' or 'strong', got {regime!r}")
