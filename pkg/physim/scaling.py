"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Parameter sweeps and empirical scaling exponents.

A sweep runs one simulation per instance size n and keeps the totals of its
cost ledger; fit_exponent() then fits cost ~ 2**intercept * n**exponent by
least squares on (log2 n, log2 cost).
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from .alpha import balanced_q, copy_list_cost, matmul_cost, subquadratic_matmul_cost
from .exceptions import InvalidParameter, SimulationFault, SweepError, VerificationError
from .flow import build_flow_machine, flow_matmul, flow_matvec
from .gadgets import HeatGrid, diffuse_average
from .kinetic import brute_boolean_matmul, kinetic_matmul
from .matrices import BinaryMatrix, integer_product
from .utils import stream_seed


TARGETS = (
    "flow-matmul",
    "flow-build",
    "flow-matvec",
    "kinetic-matmul",
    "alpha-copy",
    "alpha-matmul",
    "alpha-subquadratic",
    "diffusion",
)

Params = Dict[str, Any]


@dataclass(frozen=True)
class ScalingSample:
    n: int
    time: float
    energy: float
    label: str
    seed: int


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    intercept: float
    r_squared: float
    sample_count: int


def fit_exponent(samples: Sequence[Tuple[int, float]]) -> ExponentFit:
    """Least-squares slope of log2(cost) against log2(n).

    >>> fit_exponent([(2, 4.0), (4, 16.0), (8, 64.0)]).exponent
    2.0
    """
    if len(samples) < 2:
        raise InvalidParameter(f"At least 2 samples are needed, got {len(samples)}")
    sizes = [n for n, _ in samples]
    if len(set(sizes)) != len(sizes):
        raise InvalidParameter(f"Sample sizes must be distinct, got {sizes}")
    if any(n < 1 for n in sizes):
        raise InvalidParameter(f"Sample sizes must be >= 1, got {sizes}")
    if any(not cost > 0 for _, cost in samples):
        raise InvalidParameter("Costs must be > 0 to be fitted in log space")

    x = np.log2(np.array(sizes, dtype=np.float64))
    y = np.log2(np.array([cost for _, cost in samples], dtype=np.float64))
    design = np.column_stack((x, np.ones_like(x)))
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)

    residual = y - (slope * x + intercept)
    ss_res = float(residual @ residual)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return ExponentFit(float(slope), float(intercept), r_squared, len(samples))


def fit_sweep(samples: Sequence[ScalingSample]) -> Tuple[ExponentFit, Optional[ExponentFit]]:
    """Time and energy fits of a sweep; no energy fit when no energy was spent."""
    time_fit = fit_exponent([(sample.n, sample.time) for sample in samples])
    if all(sample.energy == 0 for sample in samples):
        return time_fit, None
    return time_fit, fit_exponent([(sample.n, sample.energy) for sample in samples])


def _random_pair(n: int, rng: np.random.Generator, density: float) -> Tuple[BinaryMatrix, BinaryMatrix]:
    return BinaryMatrix.random(n, rng, density), BinaryMatrix.random(n, rng, density)


def _verify(computed: np.ndarray, expected: np.ndarray, what: str) -> None:
    mismatches = np.argwhere(np.asarray(computed) != np.asarray(expected))
    if mismatches.size:
        location = tuple(int(index) for index in mismatches[0])
        raise VerificationError(f"{what} differs from its oracle at {location}", location=location)


def _measure(target: str, n: int, params: Params, seed: int) -> Tuple[float, float]:
    rng = np.random.default_rng(stream_seed(seed))
    density = params.get("density", 0.5)
    delta = params.get("delta", 0.0)
    eps_meas = params.get("eps_meas", 0.0)

    if target == "flow-matmul":
        A, B = _random_pair(n, rng, density)
        result = flow_matmul(A, B, delta, eps_meas, seed=seed)
        _verify(result.product.entries, integer_product(A.entries, B.entries), "Flow product")
        return result.ledger.total_time, result.ledger.total_energy

    if target == "flow-build":
        machine = build_flow_machine(BinaryMatrix.random(n, rng, density), delta, seed=seed)
        return machine.construction_ledger.total_time, machine.construction_ledger.total_energy

    if target == "flow-matvec":
        A = BinaryMatrix.random(n, rng, density)
        b = (rng.random(n) < density).astype(np.uint8)
        machine = build_flow_machine(A, delta, seed=seed)
        matvec = flow_matvec(machine, b, eps_meas, seed=seed)
        _verify(matvec.c, integer_product(A.entries, b), "Flow matvec")
        return matvec.ledger.total_time, matvec.ledger.total_energy

    if target == "kinetic-matmul":
        A, B = _random_pair(n, rng, density)
        result = kinetic_matmul(A, B, params.get("energy_model", "kinetic"))
        _verify(result.product.entries, brute_boolean_matmul(A, B).entries, "Kinetic product")
        return result.ledger.total_time, result.ledger.total_energy

    if target == "alpha-copy":
        alpha = params.get("alpha", 1.0)
        s = params.get("s", 1 / 3)
        q = params.get("q")
        report = copy_list_cost(n, balanced_q(alpha, s) if q is None else q, s, alpha)
        return report.time, report.energy

    if target == "alpha-matmul":
        report = matmul_cost(n, params.get("alpha", 1.0))
        return report.time, report.energy

    if target == "alpha-subquadratic":
        # This family is only defined for alpha = 2
        report = subquadratic_matmul_cost(n, 2.0)
        return report.time, report.energy

    # diffusion: n cells on a square plate, all the heat in one corner
    side = math.isqrt(n)
    if side * side != n:
        raise InvalidParameter(f"Diffusion sizes are cell counts and must be perfect squares, got {n}")
    eps = params.get("eps", 1e-6)
    result = diffuse_average(HeatGrid.hot_corner(side), eps, max_steps=params.get("max_steps", 10_000_000))
    if not result.converged:
        raise SimulationFault(f"Diffusion did not converge to {eps} in {result.steps_used} steps")
    return float(result.steps_used), 0.0


def run_point(target: str, n: int, params: Params, seed: int) -> ScalingSample:
    """One sweep point, any error is raised again as a SweepError carrying *n*."""
    try:
        time, energy = _measure(target, n, params, seed)
    except Exception as exc:
        raise SweepError(n, exc) from exc
    logging.debug(f"Sweep {target} n={n} seed={seed}: time={time}, energy={energy}")
    return ScalingSample(n=n, time=time, energy=energy, label=target, seed=seed)


def sweep(
    target: str, n_values: Sequence[int], params: Optional[Params] = None, seed: int = 0, workers: int = 1
) -> List[ScalingSample]:
    """Run *target* at every n of *n_values*, the i-th point with seed + i.

    With *workers* > 1 points run in parallel; samples are ordered by n either way.
    """
    if target not in TARGETS:
        raise InvalidParameter(f"Unknown sweep target {target!r}, expected one of {', '.join(TARGETS)}")
    sizes = list(n_values)
    if not sizes:
        raise InvalidParameter("At least one instance size is required")
    if sizes != sorted(set(sizes)):
        raise InvalidParameter(f"Instance sizes must be distinct and ascending, got {sizes}")
    if workers < 1:
        raise InvalidParameter(f"workers must be >= 1, got {workers}")

    params = params or {}
    if workers == 1:
        samples = [run_point(target, n, params, seed + index) for index, n in enumerate(sizes)]
    else:
        samples = Parallel(n_jobs=workers)(
            delayed(run_point)(target, n, params, seed + index) for index, n in enumerate(sizes)
        )

    logging.info(f"Sweep {target} done over {len(sizes)} sizes")
    return sorted(samples, key=lambda sample: sample.n)
