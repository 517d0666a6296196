"""Batch front end: run scenario configs, emit tables, figures and summaries.

Subcommands
    run       full pipeline: states -> barrier insertion -> energy
              diagnostics -> evolution -> costs; writes every report table
    validate  schema and consistency check only; lists the nodal state
    sweep     cost table over the configured prior/detector-error grids
    density   density snapshots of the post-insertion dynamics

Outputs are deterministic for a fixed config: floats are serialized at 9
significant digits, CSV files use RFC 4180 quoting with LF line endings, and
files are written atomically.  ``--seed`` is reserved (all computation is
deterministic); ``--threads`` parallelizes sweep rows without affecting
row order.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import discrimination, evolution, figures, insertion
from .config import ConfigError, ScenarioConfig, load_config, validate_config
from .discrimination import BinaryDetector, GaussianReadout, Scenario
from .errors import NumericalError
from .insertion import DEFAULT_NODAL_TOL, SplitState
from .reports import atomic_write_text, write_table


def _resolve_config_path(name_or_path: str) -> Path:
    """A bare name refers to a bundled config; anything else is a filesystem path."""
    candidate = Path(name_or_path)
    if candidate.suffix == "" and "/" not in name_or_path and "\\" not in name_or_path:
        bundled = resources.files("splitwell").joinpath("configs", f"{name_or_path}.json")
        if bundled.is_file():
            return Path(str(bundled))
    return candidate


def _splits(config: ScenarioConfig) -> dict[str, SplitState]:
    return {label: insertion.split(state, config.insertion_point, config.n_cut)
            for label, state in sorted(config.states.items())}


def _scenario(config: ScenarioConfig) -> Scenario:
    return Scenario(prior=config.prior, state_a=config.states["a"],
                    state_b=config.states["b"],
                    insertion_point=config.insertion_point, signal=config.signal)


def _coefficient_rows(config: ScenarioConfig, splits: dict[str, SplitState]) -> list[list]:
    rows = []
    for label in sorted(config.states):
        state = config.states[label]
        factor = config.normalization_factors[label]
        residual = splits[label].truncation_residual
        for kind, vector in (("parent", state.coefficients),
                             ("left", splits[label].left.coefficients),
                             ("right", splits[label].right.coefficients)):
            for n, value in enumerate(vector, start=1):
                rows.append([label, kind, n, float(value.real), float(value.imag),
                             factor, config.n_cut, DEFAULT_NODAL_TOL, residual])
    return rows


COEFFICIENT_HEADER = ["state", "kind", "n", "re", "im", "normalization_factor",
                      "n_cut", "tol", "truncation_residual"]

INSERTION_HEADER = ["state", "nodal", "pre_energy", "prob_left", "prob_right",
                    "energy_left", "energy_right", "divergence_class",
                    "fit_slope_left", "fit_slope_right",
                    "fit_intercept_left", "fit_intercept_right",
                    "energy_conservation_gap", "n_cut", "tol", "truncation_residual"]

PARTIAL_SUMS_HEADER = ["state", "n", "s_left", "s_right", "n_cut", "tol",
                       "truncation_residual"]

COST_HEADER = ["label", "prior", "overlap_sq", "overlap_sq_split",
               "helstrom_baseline", "combined_cost", "signal_variant",
               "false_positive", "false_negative", "mu_nodal", "mu_nonnodal",
               "sigma", "nodal_a", "nodal_b", "evolution_time", "n_cut", "tol",
               "truncation_residual_a", "truncation_residual_b"]

POSTERIOR_HEADER = ["outcome", "probability", "posterior", "branch_cost",
                    "n_cut", "tol", "truncation_residual"]

SWEEP_HEADER = ["xi", "epsilon", "helstrom_baseline", "combined_cost",
                "overlap_sq", "n_cut", "tol", "truncation_residual"]

DENSITY_HEADER = ["state", "t", "x", "density", "n_cut", "tol",
                  "truncation_residual"]


def _insertion_tables(config: ScenarioConfig, splits: dict[str, SplitState]):
    summary_rows = []
    sum_rows = []
    reports = {}
    for label in sorted(splits):
        report = insertion.insertion_energy_diagnostics(splits[label], config.n_cut)
        reports[label] = report
        s_left, s_right = report.energy_partial_sums
        summary_rows.append([
            label, report.nodal, report.pre_energy,
            report.compartment_probabilities[0], report.compartment_probabilities[1],
            float(s_left[-1]), float(s_right[-1]), report.divergence_class,
            report.fit_slopes[0], report.fit_slopes[1],
            report.fit_intercepts[0], report.fit_intercepts[1],
            report.energy_conservation_gap, config.n_cut, DEFAULT_NODAL_TOL,
            report.truncation_residual])
        for n in range(1, s_left.size + 1):
            sum_rows.append([label, n, float(s_left[n - 1]), float(s_right[n - 1]),
                             config.n_cut, DEFAULT_NODAL_TOL,
                             report.truncation_residual])
    return summary_rows, sum_rows, reports


def _signal_columns(config: ScenarioConfig):
    signal = config.signal
    if isinstance(signal, BinaryDetector):
        return ["binary_detector", signal.false_positive, signal.false_negative,
                "", "", ""], 0.0
    if isinstance(signal, GaussianReadout):
        return ["gaussian_readout", "", "", signal.mu_nodal, signal.mu_nonnodal,
                signal.sigma], discrimination.GAUSSIAN_INTEGRAL_TOL
    return ["none", "", "", "", "", ""], 0.0


def _cost_tables(config: ScenarioConfig, splits: dict[str, SplitState]):
    scenario = _scenario(config)
    if config.evolution_time != 0.0:
        # costs are invariant under free evolution; run them on evolved states
        # so the reports demonstrate it on the configured time
        evolved = {label: evolution.evolve(state, config.evolution_time)
                   for label, state in scenario_states(config).items()}
        scenario = Scenario(prior=config.prior, state_a=evolved["a"],
                            state_b=evolved["b"],
                            insertion_point=config.insertion_point,
                            signal=config.signal)
    breakdown = discrimination.combined_cost(scenario, config.n_cut)
    signal_cols, tol = _signal_columns(config)
    res_a = splits["a"].truncation_residual
    res_b = splits["b"].truncation_residual
    cost_rows = [[config.label, config.prior, breakdown.overlap_sq,
                  breakdown.overlap_sq_split, breakdown.helstrom_baseline,
                  breakdown.combined_cost, *signal_cols,
                  breakdown.nodal_flags[0], breakdown.nodal_flags[1],
                  config.evolution_time, config.n_cut, tol, res_a, res_b]]
    posterior_rows = [[row.outcome, row.probability, row.posterior, row.branch_cost,
                       config.n_cut, tol, max(res_a, res_b)]
                      for row in breakdown.posterior_table]
    return cost_rows, posterior_rows, breakdown


def scenario_states(config: ScenarioConfig) -> dict:
    return {label: config.states[label] for label in sorted(config.states)}


def _sweep_entries(config: ScenarioConfig, threads: int):
    scenario = _scenario(config)
    return discrimination.sweep(scenario, config.sweep_xi, config.sweep_epsilon,
                                config.n_cut, threads=threads)


def _sweep_rows(config: ScenarioConfig, splits: dict[str, SplitState], entries) -> list[list]:
    residual = max(splits["a"].truncation_residual, splits["b"].truncation_residual)
    return [[entry.xi, entry.epsilon, entry.breakdown.helstrom_baseline,
             entry.breakdown.combined_cost, entry.breakdown.overlap_sq,
             config.n_cut, 0.0, residual]
            for entry in entries]


def _density_grids(config: ScenarioConfig, splits: dict[str, SplitState]):
    grids = {}
    for label in sorted(splits):
        grids[label] = evolution.density_grid(splits[label], config.density_times,
                                              config.density_points)
    return grids


def _density_rows(config: ScenarioConfig, splits, grids) -> list[list]:
    rows = []
    for label in sorted(grids):
        grid = grids[label]
        residual = splits[label].truncation_residual
        for i, t in enumerate(grid.times):
            for j, x in enumerate(grid.positions):
                rows.append([label, float(t), float(x), float(grid.density[i, j]),
                             config.n_cut, DEFAULT_NODAL_TOL, residual])
    return rows


def _write_status(out_dir: Path, status: str, detail: str = "") -> None:
    payload = {"status": status}
    if detail:
        payload["detail"] = detail
    atomic_write_text(out_dir / "run_status.json",
                      json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_validate(config_path: Path, _args) -> int:
    config = load_config(config_path)
    report = validate_config(config)
    print(f"config: {config.label}")
    for line in report.lines():
        print(line)
    return 0 if report.ok else 2


def cmd_run(config_path: Path, args) -> int:
    config = load_config(config_path)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = args.format

    splits = _splits(config)
    write_table(out_dir, "coefficients", COEFFICIENT_HEADER,
                _coefficient_rows(config, splits), fmt)
    summary_rows, sum_rows, reports = _insertion_tables(config, splits)
    write_table(out_dir, "insertion_report", INSERTION_HEADER, summary_rows, fmt)
    write_table(out_dir, "partial_sums", PARTIAL_SUMS_HEADER, sum_rows, fmt)
    figures.save_partial_sums_figure(reports, out_dir / "insertion_partial_sums.png")

    if config.wants_costs:
        cost_rows, posterior_rows, breakdown = _cost_tables(config, splits)
        write_table(out_dir, "cost_breakdown", COST_HEADER, cost_rows, fmt)
        write_table(out_dir, "posterior_table", POSTERIOR_HEADER, posterior_rows, fmt)
        figures.save_cost_figure(breakdown, out_dir / "cost_breakdown.png")

    if config.wants_sweep:
        entries = _sweep_entries(config, args.threads)
        write_table(out_dir, "sweep", SWEEP_HEADER,
                    _sweep_rows(config, splits, entries), fmt)
        figures.save_sweep_figure(entries, out_dir / "sweep.png")

    if config.wants_density:
        grids = _density_grids(config, splits)
        write_table(out_dir, "density", DENSITY_HEADER,
                    _density_rows(config, splits, grids), fmt)
        first = sorted(grids)[0]
        figures.save_density_figure(grids[first], out_dir / "density.png",
                                    barrier=config.insertion_point)

    _write_status(out_dir, "ok")
    return 0


def cmd_sweep(config_path: Path, args) -> int:
    config = load_config(config_path)
    if not config.wants_sweep:
        raise ConfigError("sweep: config must provide state 'b', a prior, and "
                          "nonempty sweep.xi and sweep.epsilon grids")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = _splits(config)
    entries = _sweep_entries(config, args.threads)
    write_table(out_dir, "sweep", SWEEP_HEADER,
                _sweep_rows(config, splits, entries), args.format)
    figures.save_sweep_figure(entries, out_dir / "sweep.png")
    _write_status(out_dir, "ok")
    return 0


def cmd_density(config_path: Path, args) -> int:
    config = load_config(config_path)
    if not config.wants_density:
        raise ConfigError("density: config must provide a density block with "
                          "times and n_points")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = _splits(config)
    grids = _density_grids(config, splits)
    write_table(out_dir, "density", DENSITY_HEADER,
                _density_rows(config, splits, grids), args.format)
    first = sorted(grids)[0]
    figures.save_density_figure(grids[first], out_dir / "density.png",
                                barrier=config.insertion_point)
    _write_status(out_dir, "ok")
    return 0


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
    "density": cmd_density,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitwell",
        description="Barrier insertion in a 1-D infinite square well and its "
                    "effect on binary state discrimination.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("run", "run the full pipeline and write all report tables"),
            ("validate", "check a config without computing"),
            ("sweep", "write the prior/detector-error cost sweep"),
            ("density", "write density snapshots of the post-insertion state")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True,
                         help="path to a scenario JSON, or the name of a bundled config")
        cmd.add_argument("--out", default="out", help="output directory")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv",
                         help="table format (figures are always PNG)")
        cmd.add_argument("--threads", type=int, default=1,
                         help="worker threads for sweep rows (row order is fixed)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="reserved; all computation is deterministic")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    config_path = _resolve_config_path(args.config)
    try:
        return COMMANDS[args.command](config_path, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        out_dir = Path(args.out)
        if out_dir.is_dir():
            _write_status(out_dir, "numerical-failure", str(exc))
        print(f"numerical error: {exc}", file=sys.stderr)
        print("partial outputs, if any, are flagged in run_status.json",
              file=sys.stderr)
        return 3


def console_main() -> None:
    raise SystemExit(main())
