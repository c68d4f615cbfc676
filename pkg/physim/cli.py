"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Command line front end.

Every command prints one report, as text (default), JSON or CSV, on stdout
or in the file given with --output. Logs go to stderr. Exit codes: 0 when
the run passes, 1 on a verification failure or a schedule conflict, 2 on
a usage or parameter error.
"""
import argparse
import csv
import io
import itertools
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .alpha import (
    balanced_q,
    check_collisions,
    copy_list_cost,
    copy_list_schedule,
    matmul_cost,
    matmul_schedule,
    schedule_cost,
    subquadratic_matmul_cost,
    subquadratic_matmul_schedule,
)
from .conf import CONF, ENERGY_MODELS, OUTPUT_FORMATS, save_config
from .constants import BASEL, EXIT_FAILURE, EXIT_PASS, EXIT_USAGE, PRODUCT, TITLE
from .exceptions import InvalidParameter, PhysimError, SimulationFault, SweepError, VerificationError
from .flow import correctness_threshold, flow_matmul, int_matmul_bitdecomp
from .gadgets import HeatGrid, diffuse_average, or_track
from .kinetic import EnergyModel, Variant, brute_boolean_matmul, channel_absorption, kinetic_matmul
from .ledger import CostLedger
from .matrices import BinaryMatrix, IntMatrix, integer_product, read_matrix
from .scaling import TARGETS, fit_sweep, sweep
from .utils import ceil_log2, guess_output, parse_sizes, quantity_fmt, stream_seed


@dataclass
class RunConfig:
    """Validated parameters of one command."""

    command: str
    n: Optional[int] = None
    seed: int = 0
    delta: float = 0.0
    eps_meas: float = 0.0
    alpha: Optional[float] = None
    s: float = 1 / 3
    q: Optional[float] = None
    energy_model: str = "kinetic"
    n_values: List[int] = field(default_factory=list)
    output_format: str = "text"
    output_path: Optional[Path] = None
    density: float = 0.5
    trials: int = 1
    safe_thresholds: bool = False
    worst_case: bool = False
    bits: int = 1
    a_path: Optional[Path] = None
    b_path: Optional[Path] = None
    exhaustive: bool = False
    family: str = ""
    break_rotation: bool = False
    kind: str = ""
    track: str = ""
    velocity: float = 1.0
    side: int = 8
    eps: float = 1e-6
    max_steps: int = CONF.max_steps
    target: str = ""
    workers: int = 1
    save: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {name: getattr(args, name) for name in cls.__dataclass_fields__ if hasattr(args, name)}
        return cls(**values)


@dataclass
class Report:
    command: str
    params: Dict[str, Any]
    ledger: CostLedger = field(default_factory=CostLedger)
    status: str = "PASS"
    details: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_PASS
    samples: List[Dict[str, Any]] = field(default_factory=list)
    fits: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.params.get("n") or 0)


#
# Commands
#


def _input_matrices(config: RunConfig, rng: np.random.Generator) -> List[np.ndarray]:
    """A and B as integer arrays, from files when given, random otherwise."""
    if config.a_path or config.b_path:
        if not (config.a_path and config.b_path):
            raise InvalidParameter("--a and --b go together")
        return [read_matrix(config.a_path), read_matrix(config.b_path)]
    if config.n is None:
        raise InvalidParameter("--n is required without --a/--b")
    if config.bits > 1:
        return [IntMatrix.random(config.n, config.bits, rng).entries for _ in range(2)]
    return [BinaryMatrix.random(config.n, rng, config.density).entries for _ in range(2)]


def cmd_flow(config: RunConfig) -> Report:
    """Integer matrix product through the tubing network, checked against the integer product."""
    delta_safe, eps_safe = (math.nan, math.nan)
    delta, eps_meas = config.delta, config.eps_meas
    failed, misrounds, first_mismatch = 0, 0, None
    ledger = CostLedger()

    for trial in range(config.trials):
        seed = config.seed + trial
        rng = np.random.default_rng(stream_seed(seed))
        a, b = _input_matrices(config, rng)
        n = a.shape[0]
        delta_safe, eps_safe = correctness_threshold(n)
        if config.safe_thresholds:
            delta, eps_meas = delta_safe, eps_safe

        if config.bits > 1 or a.max() > 1 or b.max() > 1:
            bits = max(1, int(max(a.max(), b.max())).bit_length())
            result = int_matmul_bitdecomp(IntMatrix(a, bits), IntMatrix(b, bits), delta, eps_meas, seed=seed)
        else:
            A, B = BinaryMatrix(a), BinaryMatrix(b)
            result = flow_matmul(A, B, delta, eps_meas, seed=seed, worst_case=config.worst_case)

        wrong = np.argwhere(result.product.entries != integer_product(a, b))
        if wrong.size:
            failed += 1
            misrounds += len(wrong)
            if first_mismatch is None:
                first_mismatch = [trial] + [int(index) for index in wrong[0]]
            logging.info(f"Trial {trial}: {len(wrong)} misrounded entries")
        if not trial:
            ledger = result.ledger

    certified = delta <= delta_safe and eps_meas <= eps_safe
    report = Report(
        "flow",
        params={
            "n": int(n),
            "seed": config.seed,
            "delta": delta,
            "eps_meas": eps_meas,
            "bits": config.bits,
            "trials": config.trials,
            "worst_case": config.worst_case,
        },
        ledger=ledger,
        details={
            "failed_trials": failed,
            "misrounds": misrounds,
            "first_mismatch": first_mismatch,
            "delta_safe": delta_safe,
            "eps_safe": eps_safe,
        },
    )
    if failed:
        # Misrounds outside of the certified tolerances are the expected outcome of a falsification run
        report.status = "FAIL" if certified else "FALSIFIED"
        report.exit_code = EXIT_FAILURE if certified else EXIT_PASS
    return report


def _all_binary_pairs(n: int):
    for bits in itertools.product((0, 1), repeat=2 * n * n):
        entries = np.array(bits, dtype=np.uint8).reshape(2, n, n)
        yield BinaryMatrix(entries[0]), BinaryMatrix(entries[1])


def _absorption_table(n: int) -> List[Dict[str, Any]]:
    """Absorption of the channel serving distance d, against the 1/(8d) bound, at powers of 2 up to n."""
    rows = []
    d = 1
    while d < max(2, n):
        ell = max(1, ceil_log2(d))
        absorbed = channel_absorption(ell, d)
        bound = 1 / (8 * d)
        rows.append({"d": d, "channel": ell, "absorption": absorbed, "bound": bound, "margin": absorbed - bound})
        d *= 2
    return rows


def cmd_kinetic(config: RunConfig) -> Report:
    """Boolean matrix product on the frictionless grid, checked against the brute force product."""
    if config.exhaustive:
        if config.n is None or config.n > 2:
            raise InvalidParameter("--exhaustive enumerates every pair and needs --n 1 or --n 2")
        instances = _all_binary_pairs(config.n)
    else:

        def random_pairs():
            for trial in range(config.trials):
                rng = np.random.default_rng(stream_seed(config.seed + trial))
                a, b = _input_matrices(config, rng)
                yield BinaryMatrix(a), BinaryMatrix(b)

        instances = random_pairs()

    count, failed, faults, collisions, cleared = 0, 0, 0, 0, 0
    max_clear = 0.0
    first_mismatch = None
    ledger = CostLedger()
    n = config.n

    for index, (A, B) in enumerate(instances):
        n = A.n_rows
        count += 1
        try:
            result = kinetic_matmul(A, B, EnergyModel.named(config.energy_model, n))
        except SimulationFault as exc:
            logging.warning(f"Instance {index}: {exc}")
            faults += 1
            continue

        wrong = np.argwhere(result.product.entries != brute_boolean_matmul(A, B).entries)
        if wrong.size:
            failed += 1
            if first_mismatch is None:
                first_mismatch = [index] + [int(i) for i in wrong[0]]
        collisions += sum(matvec.collisions for matvec in result.matvecs)
        cleared += sum(matvec.cells_cleared for matvec in result.matvecs)
        max_clear = max([max_clear] + [energy for matvec in result.matvecs for energy in matvec.clear_energies])
        if not index:
            ledger = result.ledger

    details: Dict[str, Any] = {
        "instances": count,
        "failed": failed,
        "deadline_faults": faults,
        "first_mismatch": first_mismatch,
        "collisions": collisions,
        "cells_cleared": cleared,
        "max_clear_energy": max_clear,
    }
    bound_broken = False
    if config.energy_model == Variant.KINETIC.value:
        details["clear_bound"] = BASEL
        details["clear_margin"] = BASEL - max_clear
        bound_broken = max_clear >= BASEL
    else:
        details["absorption"] = _absorption_table(int(n or 1))

    report = Report(
        "kinetic",
        params={
            "n": int(n or 0),
            "seed": config.seed,
            "model": config.energy_model,
            "trials": config.trials,
            "exhaustive": config.exhaustive,
        },
        ledger=ledger,
        details=details,
    )
    if failed or faults or bound_broken:
        report.status, report.exit_code = "FAIL", EXIT_FAILURE
    return report


def cmd_alpha(config: RunConfig) -> Report:
    """Generate a schedule of the rate/energy model, check it for collisions and price it twice."""
    n = config.n
    params: Dict[str, Any] = {"family": config.family, "n": n}

    if config.family == "copy":
        alpha = CONF.alpha if config.alpha is None else config.alpha
        q = balanced_q(alpha, config.s) if config.q is None else config.q
        schedule = copy_list_schedule(n, q, config.s)
        closed = copy_list_cost(n, q, config.s, alpha)
        params.update(alpha=alpha, s=config.s, q=q)
    elif config.family == "matmul":
        alpha = CONF.alpha if config.alpha is None else config.alpha
        schedule = matmul_schedule(n, rotate=not config.break_rotation)
        closed = matmul_cost(n, alpha)
        params.update(alpha=alpha, rotate=not config.break_rotation)
    else:
        alpha = 2.0 if config.alpha is None else config.alpha
        schedule = subquadratic_matmul_schedule(n, rotate=not config.break_rotation)
        closed = subquadratic_matmul_cost(n, alpha)
        params.update(alpha=alpha, rotate=not config.break_rotation)

    simulated = schedule_cost(schedule, alpha)
    conflict = check_collisions(schedule)
    agree = simulated == closed

    ledger = CostLedger().add("schedule", simulated.time, simulated.energy)
    details: Dict[str, Any] = {
        "process_count": simulated.process_count,
        "rate": schedule.processes[0].rate,
        "makespan": schedule.makespan,
        "closed_form_time": closed.time,
        "closed_form_energy": closed.energy,
        "agreement": agree,
        "conflict": None,
    }
    if config.family == "matmul":
        details["energy_per_n2"] = simulated.energy / (n * n)
    if conflict:
        details["conflict"] = {
            "processes": [conflict.first, conflict.second],
            "location": conflict.location,
            "overlap": list(conflict.overlap),
        }
        logging.info(f"Processes {conflict.first} and {conflict.second} collide on location {conflict.location}")

    report = Report("alpha", params=params, ledger=ledger, details=details)
    if conflict or not agree:
        report.status, report.exit_code = "FAIL", EXIT_FAILURE
    return report


def cmd_gadget(config: RunConfig) -> Report:
    """The OR track and the heat diffusion plate."""
    if config.kind == "or":
        bits = [int(bit) for bit in config.track]
        result = or_track(bits, config.velocity)
        expected = int(any(bits))
        report = Report(
            "gadget",
            params={"kind": "or", "n": len(bits), "bits": config.track, "v": config.velocity},
            ledger=result.ledger,
            details={"result": result.result, "expected": expected},
        )
        if result.result != expected:
            report.status, report.exit_code = "FAIL", EXIT_FAILURE
        return report

    grid = HeatGrid.hot_corner(config.side)
    diffusion = diffuse_average(grid, config.eps, max_steps=config.max_steps)
    ledger = CostLedger().add("diffusion", diffusion.steps_used, 0.0)
    report = Report(
        "gadget",
        params={"kind": "diffuse", "n": config.side * config.side, "side": config.side, "eps": config.eps},
        ledger=ledger,
        details={
            "mean_estimate": diffusion.mean_estimate,
            "steps": diffusion.steps_used,
            "converged": diffusion.converged,
            "heat_drift": abs(diffusion.grid.total_heat - grid.total_heat),
        },
    )
    if not diffusion.converged or abs(diffusion.mean_estimate - 1.0) >= config.eps:
        report.status, report.exit_code = "FAIL", EXIT_FAILURE
    return report


def cmd_sweep(config: RunConfig) -> Report:
    """Samples of one target over several sizes and their fitted exponents."""
    params: Dict[str, Any] = {
        "delta": config.delta,
        "eps_meas": config.eps_meas,
        "density": config.density,
        "energy_model": config.energy_model,
        "alpha": CONF.alpha if config.alpha is None else config.alpha,
        "s": config.s,
        "q": config.q,
        "eps": config.eps,
        "max_steps": config.max_steps,
    }
    samples = sweep(config.target, config.n_values, params, seed=config.seed, workers=config.workers)

    report = Report(
        "sweep",
        params={"target": config.target, "n": config.n_values[-1], "n_values": config.n_values, "seed": config.seed},
        samples=[
            {"label": sample.label, "n": sample.n, "seed": sample.seed, "time": sample.time, "energy": sample.energy}
            for sample in samples
        ],
    )
    if len(samples) < 2:
        logging.warning("A single size cannot be fitted, no exponent reported")
        return report

    time_fit, energy_fit = fit_sweep(samples)
    report.fits.append(
        {
            "label": config.target,
            "exponent_time": time_fit.exponent,
            "exponent_energy": energy_fit.exponent if energy_fit else None,
            "r2_time": time_fit.r_squared,
            "r2_energy": energy_fit.r_squared if energy_fit else None,
        }
    )
    return report


def cmd_config(config: RunConfig) -> Report:
    """Effective configuration, saved to the configuration folder with --save."""
    details: Dict[str, Any] = dict(vars(CONF))
    if config.save:
        details["saved_to"] = str(save_config(CONF))
    return Report("config", params={}, details=details)


#
# Rendering
#


def _ledger_rows(ledger: CostLedger) -> List[Dict[str, Any]]:
    return [{"label": entry.label, "time": entry.time, "energy": entry.energy} for entry in ledger.entries]


def render_json(report: Report) -> str:
    document: Dict[str, Any] = {
        "command": report.command,
        "params": report.params,
        "ledger": _ledger_rows(report.ledger),
        "totals": {"time": report.ledger.total_time, "energy": report.ledger.total_energy},
        "verification": {"status": report.status, "details": report.details},
    }
    if report.command == "sweep":
        document["samples"] = report.samples
        document["fits"] = report.fits
    return json.dumps(document, indent=2) + "\n"


def render_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if report.command == "sweep":
        writer.writerow(["label", "n", "seed", "time", "energy"])
        for sample in report.samples:
            writer.writerow([sample["label"], sample["n"], sample["seed"], sample["time"], sample["energy"]])
        if report.fits:
            writer.writerow(["label", "exponent_time", "exponent_energy", "r2_time", "r2_energy"])
            for fit in report.fits:
                writer.writerow(
                    [
                        fit["label"],
                        fit["exponent_time"],
                        "" if fit["exponent_energy"] is None else fit["exponent_energy"],
                        fit["r2_time"],
                        "" if fit["r2_energy"] is None else fit["r2_energy"],
                    ]
                )
        return buffer.getvalue()

    writer.writerow(["label", "time", "energy"])
    for entry in report.ledger.entries:
        writer.writerow([entry.label, entry.time, entry.energy])
    writer.writerow(["total", report.ledger.total_time, report.ledger.total_energy])
    return buffer.getvalue()


def _text_table(rows: Sequence[Dict[str, Any]]) -> List[str]:
    columns = list(rows[0])
    cells = [[str(row[column]) for column in columns] for row in rows]
    widths = [max(len(column), *(len(line[i]) for line in cells)) for i, column in enumerate(columns)]
    lines = ["  ".join(column.ljust(width) for column, width in zip(columns, widths))]
    lines.extend("  ".join(cell.ljust(width) for cell, width in zip(line, widths)) for line in cells)
    return lines


def render_text(report: Report) -> str:
    lines = [f"{PRODUCT} {report.command}: {report.status}"]
    if report.params:
        lines.append("params: " + " ".join(f"{key}={value}" for key, value in report.params.items()))

    if report.ledger.entries:
        lines.append("ledger:")
        for label, cost in report.ledger.breakdown().items():
            lines.append(f"  {label:<36} time {quantity_fmt(cost.time):>10}  energy {quantity_fmt(cost.energy):>10}")
        totals = report.ledger.totals
        lines.append(f"  {'total':<36} time {quantity_fmt(totals.time):>10}  energy {quantity_fmt(totals.energy):>10}")

    for key, value in report.details.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            lines.extend(f"  {line}" for line in _text_table(value))
        else:
            lines.append(f"{key}: {value}")

    if report.samples:
        lines.extend(_text_table(report.samples))
    for fit in report.fits:
        line = f"fit {fit['label']}: time ~ n^{fit['exponent_time']:.3f} (R² {fit['r2_time']:.4f})"
        if fit["exponent_energy"] is not None:
            line += f", energy ~ n^{fit['exponent_energy']:.3f} (R² {fit['r2_energy']:.4f})"
        lines.append(line)
    return "\n".join(lines) + "\n"


RENDERERS: Dict[str, Callable[[Report], str]] = {"text": render_text, "json": render_json, "csv": render_csv}


def emit(report: Report, config: RunConfig) -> Optional[Path]:
    """Print the report, or write it when an output path is configured."""
    content = RENDERERS[config.output_format](report)
    if not config.output_path:
        sys.stdout.write(content)
        return None

    extension = "txt" if config.output_format == "text" else config.output_format
    output = guess_output(config.output_path, report.command, report.size, config.seed, extension)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(content, encoding="utf-8")
    logging.info(f"Report saved to {output}")
    return output


#
# Parsing
#


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer")
    if number < 1:
        raise argparse.ArgumentTypeError(f"{value!r} must be >= 1")
    return number


def _sizes(value: str) -> List[int]:
    try:
        return parse_sizes(value)
    except (PhysimError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _track(value: str) -> str:
    if not value or set(value) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"{value!r} is not a string of 0 and 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=CONF.seed, help="base random seed (default: %(default)s)")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default=CONF.output_format)
    common.add_argument("--output", dest="output_path", type=Path, help="report file, or folder to put it in")
    common.add_argument("--verbose", action="store_true", help="log debug messages on stderr")

    parser = argparse.ArgumentParser(prog=PRODUCT, description=TITLE)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    flow = commands.add_parser("flow", parents=[common], help="integer matrix product on the flow machine")
    flow.add_argument("--n", type=_positive_int, help="matrix size")
    flow.add_argument("--delta", type=float, default=CONF.delta, help="splitter tolerance (default: %(default)s)")
    flow.add_argument("--eps-meas", type=float, default=CONF.eps_meas, help="measurement error (default: %(default)s)")
    flow.add_argument("--safe-thresholds", action="store_true", help="use the certified delta and eps_meas")
    flow.add_argument("--worst-case", action="store_true", help="every splitter at exactly 1/2 + delta")
    flow.add_argument("--trials", type=_positive_int, default=CONF.trials)
    flow.add_argument("--bits", type=_positive_int, default=1, help="entry width of random integer matrices")
    flow.add_argument("--p", dest="density", type=float, default=CONF.density, help="density of random 0/1 entries")
    flow.add_argument("--a", dest="a_path", type=Path, help="matrix file for A")
    flow.add_argument("--b", dest="b_path", type=Path, help="matrix file for B")
    flow.set_defaults(func=cmd_flow)

    kinetic = commands.add_parser("kinetic", parents=[common], help="Boolean matrix product on the kinetic grid")
    kinetic.add_argument("--n", type=_positive_int, help="matrix size")
    kinetic.add_argument("--model", dest="energy_model", choices=ENERGY_MODELS, default=CONF.energy_model)
    kinetic.add_argument("--exhaustive", action="store_true", help="every pair of n x n matrices (n <= 2)")
    kinetic.add_argument("--trials", type=_positive_int, default=CONF.trials)
    kinetic.add_argument("--p", dest="density", type=float, default=CONF.density, help="density of random entries")
    kinetic.add_argument("--a", dest="a_path", type=Path, help="matrix file for A")
    kinetic.add_argument("--b", dest="b_path", type=Path, help="matrix file for B")
    kinetic.set_defaults(func=cmd_kinetic)

    alpha = commands.add_parser("alpha", parents=[common], help="schedules of the rate/energy process model")
    alpha.add_argument("family", choices=("copy", "matmul", "subquadratic"))
    alpha.add_argument("--n", type=_positive_int, required=True)
    alpha.add_argument("--alpha", type=float, help="rate/energy exponent (default: configured, 2 for subquadratic)")
    alpha.add_argument("--s", type=float, default=CONF.s, help="rate exponent of the copy (default: %(default)s)")
    alpha.add_argument("--q", type=float, help="parallelism exponent of the copy (default: balanced)")
    alpha.add_argument("--break-rotation", action="store_true", help="all processes read the same block index")
    alpha.set_defaults(func=cmd_alpha)

    gadget = commands.add_parser("gadget", parents=[common], help="OR track and diffusion plate")
    gadget.add_argument("kind", choices=("or", "diffuse"))
    gadget.add_argument("--bits", dest="track", type=_track, default="0", help="track contents, e.g. 0100")
    gadget.add_argument("--v", dest="velocity", type=float, default=1.0, help="slider velocity")
    gadget.add_argument("--side", type=_positive_int, default=8, help="plate side")
    gadget.add_argument("--eps", type=float, default=1e-6, help="target accuracy of the average")
    gadget.add_argument("--max-steps", type=_positive_int, default=CONF.max_steps)
    gadget.set_defaults(func=cmd_gadget)

    sweeper = commands.add_parser("sweep", parents=[common], help="scaling sweep and exponent fit")
    sweeper.add_argument("--target", choices=TARGETS, required=True)
    sweeper.add_argument("--n", dest="n_values", type=_sizes, required=True, help="sizes, e.g. 8,16,32 or 8,...,64")
    sweeper.add_argument("--workers", type=_positive_int, default=CONF.workers)
    sweeper.add_argument("--delta", type=float, default=CONF.delta)
    sweeper.add_argument("--eps-meas", type=float, default=CONF.eps_meas)
    sweeper.add_argument("--alpha", type=float)
    sweeper.add_argument("--s", type=float, default=CONF.s)
    sweeper.add_argument("--q", type=float)
    sweeper.add_argument("--model", dest="energy_model", choices=ENERGY_MODELS, default=CONF.energy_model)
    sweeper.add_argument("--p", dest="density", type=float, default=CONF.density)
    sweeper.add_argument("--eps", type=float, default=1e-6, help="diffusion accuracy")
    sweeper.add_argument("--max-steps", type=_positive_int, default=CONF.max_steps)
    sweeper.set_defaults(func=cmd_sweep)

    config = commands.add_parser("config", parents=[common], help="show the effective configuration")
    config.add_argument("--save", action="store_true", help="write it to the configuration folder")
    config.set_defaults(func=cmd_config)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )

    config = RunConfig.from_args(args)
    try:
        report = args.func(config)
    except SweepError as exc:
        print(f"{PRODUCT} sweep: {exc}", file=sys.stderr)
        return EXIT_FAILURE if isinstance(exc.error, (VerificationError, SimulationFault)) else EXIT_USAGE
    except VerificationError as exc:
        print(f"{PRODUCT} {config.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (PhysimError, ValueError, OSError) as exc:
        print(f"{PRODUCT} {config.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    emit(report, config)
    return report.exit_code
