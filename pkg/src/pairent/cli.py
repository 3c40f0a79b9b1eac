"""Command-line front end: single solves, coupling sweeps, figure data, checks.

Output is data only (CSV or JSON); plotting is left to external tools.
Figure CSVs are fully deterministic (fixed grids, no timestamps), so a
rerun reproduces them byte for byte. Exit codes: 0 success, 1 numerical
failure, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance, exactdiag, meanfield, observables, richardson
from .errors import GapBracketError, InvalidModelError, PairentError
from .model import DensityProfile, parse_config, uniform_spec

DEFAULT_FIG_GRID = "0.02:3:120:log"


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


@dataclass
class SweepResult:
    """Rows plus provenance metadata, serialized as commented CSV.

    Data columns carry 17 significant digits; metadata lines use the
    shortest round-trip representation.
    """

    header: tuple
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def write(self, stream) -> None:
        for key, value in self.metadata.items():
            stream.write(f"# {key} = {value}\n")
        stream.write(",".join(self.header) + "\n")
        for row in self.rows:
            stream.write(",".join(_fmt(x) for x in row) + "\n")

    def save(self, path: Path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as stream:
            self.write(stream)


def parse_grid(text: str) -> np.ndarray:
    """Grid flag format start:stop:count[:log]."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise InvalidModelError(f"grid must be start:stop:count[:log], got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidModelError(f"malformed grid {text!r}") from None
    if count < 1 or stop < start:
        raise InvalidModelError(f"empty grid {text!r}")
    if len(parts) == 4:
        if start <= 0:
            raise InvalidModelError("log grids need start > 0")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    return parse_config(Path(path).read_text(encoding="ascii"))


_BASE_METADATA = {
    "grid_convention": "uniform midpoint levels, Fermi level at 0",
    "omega_d": "1",
}

_POLICY_A_NOTE = ("couplings below the pairing threshold of a profile "
                  "report the normal state: gap=0, alc=0")


def _bulk_row(coupling, profile, omega_d, gap_policy):
    """One mean-field CSV row; sub-threshold policy-A couplings are normal."""
    try:
        bulk = meanfield.bulk_solve(coupling, profile, omega_d, gap_policy)
    except GapBracketError:
        cond = 0.0 if profile is DensityProfile.UNIFORM else math.nan
        return (coupling, 0.0, 0.0, cond, 0.0)
    return (bulk.coupling, bulk.gap, bulk.alc, bulk.cond_energy, bulk.order_param)


def cmd_meanfield(args) -> int:
    config = _load_config(args.config)
    profile = DensityProfile(args.profile or config.get("profile", "uniform"))
    omega_d = float(config.get("omega_d", 1.0))
    grid = parse_grid(args.grid)
    metadata = {
        **_BASE_METADATA,
        "omega_d": repr(omega_d),
        "profile": profile.value,
        "gap_policy": args.gap_policy,
        "grid": args.grid,
    }
    if args.gap_policy == "A":
        metadata["policy_a_note"] = _POLICY_A_NOTE
    result = SweepResult(
        header=("lambda", "gap", "alc", "cond_energy", "order_param"),
        metadata=metadata,
    )
    for lam in grid:
        result.rows.append(_bulk_row(float(lam), profile, omega_d, args.gap_policy))
    _emit(result, args.out)
    return 0


def _report_dict(report, solution):
    return {
        "energy": solution.energy,
        "alc": report.alc,
        "cond_energy": report.cond_energy,
        "ratio": None if math.isnan(report.ratio) else report.ratio,
        "occupations": list(solution.occupations),
        "local_concurrences": list(report.local_concurrences),
    }


def cmd_solve(args) -> int:
    config = _load_config(args.config)
    n_levels = args.L if args.L is not None else int(config["L"]) if "L" in config else None
    if n_levels is None:
        raise InvalidModelError("solve needs --L (or L= in the config file)")
    coupling = args.coupling if args.coupling is not None else float(config.get("lambda", 1.0))
    m_pairs = args.M if args.M is not None else (int(config["M"]) if "M" in config else None)
    omega_d = float(config.get("omega_d", 1.0))
    spec = uniform_spec(n_levels, coupling, m_pairs, omega_d)

    t0 = time.perf_counter()
    solutions = {}
    if args.backend in ("ed", "both"):
        solutions["exactdiag"] = exactdiag.solve_ground(spec, dim_budget=args.dim_budget)
    if args.backend in ("bethe", "both"):
        solutions["bethe"] = richardson.solve_ground(spec, tol=args.tol_newton)
    payload = {
        "params": {
            "L": spec.n_levels,
            "M": spec.m_pairs,
            "lambda": spec.coupling,
            "omega_d": spec.omega_d,
            "backend": args.backend,
            "tol_newton": args.tol_newton,
            "dim_budget": args.dim_budget,
        },
        "results": {
            name: _report_dict(observables.report_from_solution(sol, spec), sol)
            for name, sol in solutions.items()
        },
    }
    if len(solutions) == 2:
        ed, be = solutions["exactdiag"], solutions["bethe"]
        payload["deviation"] = {
            "energy_rel": abs(ed.energy - be.energy) / max(abs(ed.energy), 1e-300),
            "occupations_max": float(np.max(np.abs(ed.occupations - be.occupations))),
        }
    payload["wall_time_s"] = time.perf_counter() - t0
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="ascii")
    return 0


def _l2_alc(coupling: float) -> float:
    return coupling / math.sqrt(1.0 + coupling * coupling)


def _l2_ratio(coupling: float) -> float:
    # alc^2 / cond_energy reduced to a cancellation-free form
    quasi = 1.0 + coupling * coupling
    return 2.0 * (math.sqrt(quasi) + 1.0) / quasi


_FIG_SIZES = (24, 40, 68)


def _figure1(grid, gap_policy, tol) -> dict[str, SweepResult]:
    metadata = {**_BASE_METADATA, "gap_policy": gap_policy, "grid": _grid_label(grid)}
    if gap_policy == "A":
        metadata["policy_a_note"] = _POLICY_A_NOTE
    result = SweepResult(
        header=("profile", "lambda", "gap", "alc", "cond_energy", "order_param"),
        metadata=metadata,
    )
    for profile in DensityProfile:
        for lam in grid:
            result.rows.append((profile.value,
                                *_bulk_row(float(lam), profile, 1.0, gap_policy)))
    return {"fig1.csv": result}


def _finite_size_sweeps(grid, tol):
    for n_levels in _FIG_SIZES:
        reports = observables.bethe_sweep_reports(
            uniform_spec(n_levels, float(grid[0])), grid, tol=tol
        )
        yield n_levels, (np.array([r.alc for r in reports]),
                         np.array([r.cond_energy for r in reports]))


def _figure2(grid, gap_policy, tol) -> dict[str, SweepResult]:
    result = SweepResult(
        header=("series", "lambda", "alc"),
        metadata={**_BASE_METADATA, "grid": _grid_label(grid),
                  "tol_newton": repr(tol)},
    )
    series = {"L2": [_l2_alc(l) for l in grid]}
    for n_levels, (alcs, _) in _finite_size_sweeps(grid, tol):
        series[f"L{n_levels}"] = alcs
    series["thermo"] = [meanfield.alc_closed_uniform(l) for l in grid]
    for name, alcs in series.items():
        for lam, value in zip(grid, alcs):
            result.rows.append((name, float(lam), float(value)))
    return {"fig2.csv": result}


def _figure3(grid, gap_policy, tol) -> dict[str, SweepResult]:
    curves = SweepResult(
        header=("series", "lambda", "ln_lambda", "ratio"),
        metadata={**_BASE_METADATA, "grid": _grid_label(grid),
                  "tol_newton": repr(tol)},
    )
    markers = SweepResult(
        header=("series", "coupling_star", "ratio_star", "at_boundary"),
        metadata={**_BASE_METADATA, "grid": _grid_label(grid),
                  "tol_newton": repr(tol),
                  "refinement": "golden section, relative tol 1e-3"},
    )

    def emit(name, ratios, threshold):
        for lam, value in zip(grid, ratios):
            curves.rows.append((name, float(lam), math.log(lam), float(value)))
        markers.rows.append((name, threshold[0], threshold[1], threshold[2]))

    def emit_analytic(name, func):
        # the analytic reference curves are strictly decreasing: edge maximum
        ratios = np.array([func(l) for l in grid])
        k = int(np.argmax(ratios))
        emit(name, ratios, (float(grid[k]), float(ratios[k]),
                            k in (0, grid.size - 1)))

    emit_analytic("L2", _l2_ratio)
    for n_levels, (alcs, conds) in _finite_size_sweeps(grid, tol):
        spec = uniform_spec(n_levels, float(grid[0]))
        found = observables.ratio_and_threshold(
            grid, alcs, conds,
            resolve=observables.bethe_ratio_resolver(spec, tol=tol),
        )
        emit(f"L{n_levels}", found.ratios,
             (found.coupling_star, found.ratio_star, found.at_boundary))
    emit_analytic("thermo", meanfield.ratio_thermo)
    return {"fig3.csv": curves, "fig3_thresholds.csv": markers}


def _grid_label(grid) -> str:
    return f"{grid[0]:.17g}..{grid[-1]:.17g} ({len(grid)} points)"


def cmd_figure(args) -> int:
    grid = parse_grid(args.grid)
    builder = {"fig1": _figure1, "fig2": _figure2, "fig3": _figure3}[args.which]
    files = builder(grid, args.gap_policy, args.tol_newton)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, result in files.items():
        result.save(out_dir / name)
        print(f"wrote {out_dir / name}")
    return 0


def cmd_verify(args) -> int:
    results = acceptance.run_all(newton_tol=args.tol_newton)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairent",
        description="Entanglement of the reduced BCS pairing model: "
                    "mean-field, exact-diagonalization and Bethe-ansatz backends.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mf = sub.add_parser("meanfield", help="thermodynamic-limit sweep to CSV")
    mf.add_argument("--grid", default="0:3:61", help="lambda grid start:stop:count[:log]")
    mf.add_argument("--profile", choices=[p.value for p in DensityProfile],
                    default=None, help="level-density profile (default uniform)")
    mf.add_argument("--gap-policy", choices=["A", "B"], default="A",
                    help="A: self-consistent gap per profile, B: reuse the uniform gap")
    mf.add_argument("--config", default=None, help="key=value config file")
    mf.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    mf.set_defaults(func=cmd_meanfield)

    sv = sub.add_parser("solve", help="single ground-state solve to JSON")
    sv.add_argument("--L", type=int, default=None, help="number of levels")
    sv.add_argument("--M", type=int, default=None, help="pair count (default L/2)")
    sv.add_argument("--lambda", dest="coupling", type=float, default=None,
                    help="dimensionless coupling")
    sv.add_argument("--backend", choices=["ed", "bethe", "both"], default="both")
    sv.add_argument("--tol-newton", type=float, default=richardson.DEFAULT_TOL,
                    help="Bethe residual tolerance")
    sv.add_argument("--dim-budget", type=int, default=exactdiag.DEFAULT_DIM_BUDGET,
                    help="largest allowed paired-basis dimension")
    sv.add_argument("--config", default=None, help="key=value config file")
    sv.add_argument("--out", default="-", help="output JSON path ('-' for stdout)")
    sv.set_defaults(func=cmd_solve)

    fg = sub.add_parser("figure", help="reproduce a figure as CSV data")
    fg.add_argument("which", choices=["fig1", "fig2", "fig3"])
    fg.add_argument("--out-dir", default=".", help="directory for the CSV files")
    fg.add_argument("--grid", default=DEFAULT_FIG_GRID,
                    help="lambda grid start:stop:count[:log]")
    fg.add_argument("--gap-policy", choices=["A", "B"], default="A")
    fg.add_argument("--tol-newton", type=float, default=richardson.DEFAULT_TOL)
    fg.set_defaults(func=cmd_figure)

    vf = sub.add_parser("verify", help="run the acceptance checks")
    vf.add_argument("--tol-newton", type=float, default=richardson.DEFAULT_TOL)
    vf.set_defaults(func=cmd_verify)
    return parser


def _emit(result: SweepResult, out: str | None) -> None:
    if out in (None, "-"):
        result.write(sys.stdout)
    else:
        result.save(Path(out))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PairentError as exc:
        print(f"pairent: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
