"""Level grids, fillings and coupling conventions for the reduced BCS model.

Conventions used throughout the package: the Fermi level sits at energy 0,
the Debye cutoff omega_d is the energy unit (default 1.0), and the
dimensionless coupling `lambda` enters the Hamiltonian only through
g = d * lambda, with d the mean level spacing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidModelError


class DensityProfile(str, Enum):
    """Continuum level-density shapes mu(eps) on [-omega_d, omega_d]."""

    UNIFORM = "uniform"      # mu = 1
    ABS = "abs"              # mu = |eps|
    SQUARE = "square"        # mu = eps^2
    PARABOLIC = "parabolic"  # mu = omega_d^2 - eps^2
    TENT = "tent"            # mu = omega_d - |eps|


def density_eval(profile: DensityProfile, energy, omega_d: float = 1.0):
    """Evaluate mu(eps) for the given profile.

    Accepts a scalar or array `energy`; values outside [-omega_d, omega_d]
    are rejected.
    """
    e = np.asarray(energy, dtype=float)
    if np.any(np.abs(e) > omega_d * (1.0 + 1e-12)):
        raise InvalidModelError(
            f"energy outside the cutoff window [-{omega_d}, {omega_d}]"
        )
    profile = DensityProfile(profile)
    if profile is DensityProfile.UNIFORM:
        out = np.ones_like(e)
    elif profile is DensityProfile.ABS:
        out = np.abs(e)
    elif profile is DensityProfile.SQUARE:
        out = e * e
    elif profile is DensityProfile.PARABOLIC:
        out = omega_d * omega_d - e * e
    else:
        out = omega_d - np.abs(e)
    return out if out.ndim else float(out)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LevelSet:
    """Single-particle level grid inside the cutoff window.

    levels are strictly increasing and pairwise distinct; d is the mean
    spacing and omega_d the cutoff. Instances are immutable.
    """

    levels: np.ndarray
    d: float
    omega_d: float

    def __eq__(self, other):
        if not isinstance(other, LevelSet):
            return NotImplemented
        return (self.d == other.d and self.omega_d == other.omega_d
                and np.array_equal(self.levels, other.levels))

    def __post_init__(self):
        object.__setattr__(self, "levels", _frozen(self.levels))
        if self.levels.ndim != 1 or self.levels.size < 1:
            raise InvalidModelError("levels must be a non-empty 1-d sequence")
        if self.d <= 0 or self.omega_d <= 0:
            raise InvalidModelError("spacing and cutoff must be positive")
        if np.any(np.diff(self.levels) <= 0):
            raise InvalidModelError("levels must be strictly increasing and distinct")
        if np.max(np.abs(self.levels)) > self.omega_d * (1.0 + 1e-12):
            raise InvalidModelError("levels must satisfy |eps_j| <= omega_d")

    @property
    def size(self) -> int:
        return int(self.levels.size)

    def __len__(self) -> int:
        return self.size


def build_uniform_levels(n_levels: int, omega_d: float = 1.0) -> LevelSet:
    """Midpoint grid eps_j = -omega_d + (2j-1) omega_d / L, j = 1..L.

    Built by mirroring the positive half so particle-hole symmetry
    eps_j = -eps_{L+1-j} holds bitwise, not just to rounding; spacing is
    d = 2 omega_d / L.
    """
    if int(n_levels) != n_levels or n_levels < 2:
        raise InvalidModelError("need at least two levels")
    if omega_d <= 0:
        raise InvalidModelError("omega_d must be positive")
    n_levels = int(n_levels)
    if n_levels % 2 == 0:
        k = np.arange(1, n_levels // 2 + 1, dtype=float)
        half = (2.0 * k - 1.0) * omega_d / n_levels
        levels = np.concatenate([-half[::-1], half])
    else:
        k = np.arange(1, (n_levels - 1) // 2 + 1, dtype=float)
        half = 2.0 * k * omega_d / n_levels
        levels = np.concatenate([-half[::-1], [0.0], half])
    return LevelSet(levels=levels, d=2.0 * omega_d / n_levels, omega_d=omega_d)


@dataclass(frozen=True)
class ModelSpec:
    """Level grid plus pair count M and dimensionless coupling lambda."""

    level_set: LevelSet
    m_pairs: int
    coupling: float

    def __post_init__(self):
        if int(self.m_pairs) != self.m_pairs or not 0 <= self.m_pairs <= self.n_levels:
            raise InvalidModelError(
                f"pair count must satisfy 0 <= M <= {self.n_levels}, got {self.m_pairs}"
            )
        object.__setattr__(self, "m_pairs", int(self.m_pairs))
        if not np.isfinite(self.coupling) or self.coupling < 0:
            raise InvalidModelError("coupling must be finite and >= 0")

    @property
    def n_levels(self) -> int:
        return self.level_set.size

    @property
    def g(self) -> float:
        """Interaction strength in energy units; the only combination entering the solvers."""
        return self.level_set.d * self.coupling

    @property
    def omega_d(self) -> float:
        return self.level_set.omega_d

    def with_coupling(self, coupling: float) -> "ModelSpec":
        return ModelSpec(self.level_set, self.m_pairs, coupling)

    @classmethod
    def half_filling(cls, level_set: LevelSet, coupling: float) -> "ModelSpec":
        if level_set.size % 2:
            raise InvalidModelError("half filling requires an even number of levels")
        return cls(level_set, level_set.size // 2, coupling)


def uniform_spec(n_levels: int, coupling: float, m_pairs: int | None = None,
                 omega_d: float = 1.0) -> ModelSpec:
    """Uniform midpoint grid at the given filling (default half filling)."""
    levels = build_uniform_levels(n_levels, omega_d)
    if m_pairs is None:
        return ModelSpec.half_filling(levels, coupling)
    return ModelSpec(levels, m_pairs, coupling)


def fermi_sea_energy(spec: ModelSpec) -> float:
    """Ground energy at zero coupling: the lowest M levels doubly occupied."""
    return 2.0 * float(np.sum(spec.level_set.levels[: spec.m_pairs]))


@dataclass(frozen=True)
class GroundSolution:
    """Ground-state energy and per-level occupations from one backend.

    source tags the producing backend: "meanfield", "exactdiag" or "bethe".
    """

    energy: float
    occupations: np.ndarray
    source: str

    def __post_init__(self):
        object.__setattr__(self, "occupations", _frozen(self.occupations))


# --- plain-text configuration ------------------------------------------------

_CONFIG_KEYS = ("L", "M", "lambda", "omega_d", "profile")


def spec_to_config(spec: ModelSpec, profile: DensityProfile = DensityProfile.UNIFORM) -> str:
    """Serialize a uniform-grid spec to `key=value` lines."""
    return "".join(
        f"{k}={v}\n"
        for k, v in (
            ("L", spec.n_levels),
            ("M", spec.m_pairs),
            ("lambda", repr(spec.coupling)),
            ("omega_d", repr(spec.omega_d)),
            ("profile", DensityProfile(profile).value),
        )
    )


def parse_config(text: str) -> dict:
    """Parse `key=value` lines; blank lines and '#' comments are ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidModelError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise InvalidModelError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def spec_from_config(text: str) -> tuple[ModelSpec, DensityProfile]:
    """Rebuild a uniform-grid ModelSpec (plus density profile) from config text."""
    raw = parse_config(text)
    try:
        n_levels = int(raw["L"])
        coupling = float(raw["lambda"])
    except KeyError as exc:
        raise InvalidModelError(f"config missing required key {exc.args[0]!r}") from None
    omega_d = float(raw.get("omega_d", 1.0))
    m_pairs = int(raw["M"]) if "M" in raw else None
    profile = DensityProfile(raw.get("profile", "uniform"))
    return uniform_spec(n_levels, coupling, m_pairs, omega_d), profile
