"""Ground-state entanglement of the reduced BCS pairing model.

Three backends cover the coupling-size plane: closed-form/quadrature mean
field in the thermodynamic limit (`meanfield`), bitmask exact
diagonalization at small size (`exactdiag`), and a Bethe-ansatz solver
with coupling continuation for intermediate sizes (`richardson`).
`observables` turns occupations into local concurrences, the ALC and the
threshold-coupling diagnostics; `cli` exposes the sweep and figure
commands.
"""

from .errors import (CapacityError, ContinuationError, ConvergenceError,
                     GapBracketError, InvalidModelError, PairentError,
                     QuadratureError, SweepTooSparseError)
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (DensityProfile, GroundSolution, LevelSet, ModelSpec,
                    build_uniform_levels, density_eval, fermi_sea_energy,
                    spec_from_config, spec_to_config, uniform_spec)
from .meanfield import (BulkSolution, alc_closed_uniform, alc_thermo,
                        bulk_gap, bulk_solve, concurrence_profile,
                        cond_energy_thermo, gap_general, order_parameter,
                        ratio_thermo)
from .exactdiag import (PairedBasis, apply_hamiltonian, build_paired_basis,
                        ground_state, occupations)
from .richardson import (BetheState, continuation_sweep, energy_from_state,
                         initial_guess, newton_solve, occupations_from_state,
                         quadratic_bae_residual, solve_state)
from .observables import (EntanglementReport, ThresholdResult, alc,
                          asymptotic_values, cond_energy, local_concurrence,
                          ratio_and_threshold, report_from_solution,
                          site_entropy)
from . import exactdiag, meanfield, observables, richardson

__version__ = "0.1.0"

solve_ground_ed = exactdiag.solve_ground
solve_ground_bethe = richardson.solve_ground
