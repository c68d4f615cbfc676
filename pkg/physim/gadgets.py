"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Sublinear aggregation gadgets:
    - the frictionless track, computing the OR of n bits with one sliding mass;
    - the insulated conducting plate, averaging n temperatures by diffusion.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .constants import DEFAULT_MAX_STEPS
from .exceptions import InvalidParameter
from .ledger import CostLedger


@dataclass
class OrTrackResult:
    result: int
    ledger: CostLedger


def or_track(bits: Any, v: float) -> OrTrackResult:
    """OR of *bits* by sending a unit-mass slider at velocity *v* along the track.

    Bit i is a unit block at location i + 1. The slider is launched from 0 and
    the observer waits until the deadline (n + 1) / v: the slider itself shows
    up at location n + 1 by then iff no block was on the track. Launching the
    slider costs its kinetic energy v², the wait is charged in full either way.
    """
    track = np.asarray(bits)
    if track.ndim != 1 or track.size < 1:
        raise InvalidParameter("The track needs at least one bit")
    if not np.isin(track, (0, 1)).all():
        raise InvalidParameter("Track entries must be 0 or 1")
    if not v > 0:
        raise InvalidParameter(f"Probe velocity must be > 0, got {v}")

    n = int(track.size)
    launch = "slider launch"
    if v > math.sqrt(n):
        logging.warning(f"Probe velocity {v} exceeds sqrt({n}), the time/energy tradeoff no longer holds")
        launch = "slider launch (out of model: v > sqrt(n))"

    # The slider stops at the first block, which then travels on; what reaches
    # location n + 1 is a block iff there was one on the track.
    hits = np.flatnonzero(track)
    result = int(hits.size > 0)

    ledger = CostLedger()
    ledger.add(launch, 0.0, v * v)
    ledger.add("deadline wait", (n + 1) / v, 0.0)
    return OrTrackResult(result, ledger)


class HeatGrid:
    """Square s x s plate of cell temperatures."""

    def __init__(self, temperatures: Any, validate: bool = True) -> None:
        array = np.array(temperatures, dtype=np.float64)
        if not validate:
            # Relaxed plates may hold rounding-level negatives
            self.temperatures = array
            return
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise InvalidParameter(f"Expected a non-empty square grid, got shape {array.shape}")
        if not np.isfinite(array).all() or (array < 0).any():
            raise InvalidParameter("Temperatures must be finite and >= 0")
        self.temperatures = array

    @property
    def side(self) -> int:
        return int(self.temperatures.shape[0])

    @property
    def total_heat(self) -> float:
        return math.fsum(self.temperatures.ravel())

    @classmethod
    def uniform(cls, side: int, value: float) -> "HeatGrid":
        return cls(np.full((side, side), value))

    @classmethod
    def hot_corner(cls, side: int) -> "HeatGrid":
        """All the heat (side² units, mean 1) in the top-left cell."""
        temperatures = np.zeros((side, side))
        temperatures[0, 0] = side * side
        return cls(temperatures)


@dataclass
class DiffusionResult:
    mean_estimate: float
    steps_used: int
    grid: HeatGrid
    converged: bool


def diffusion_step(temperatures: np.ndarray) -> np.ndarray:
    """One synchronous explicit update with insulated borders.

    T'_c = T_c + 1/4 * sum over the 4 neighbors of (T_nb - T_c), cells outside
    the plate mirror their inside neighbor so no heat crosses the border.
    """
    padded = np.pad(temperatures, 1, mode="edge")
    flux = (
        padded[:-2, 1:-1]
        + padded[2:, 1:-1]
        + padded[1:-1, :-2]
        + padded[1:-1, 2:]
        - 4.0 * temperatures
    )
    return temperatures + 0.25 * flux


def diffuse_average(grid: HeatGrid, eps: float, max_steps: int = DEFAULT_MAX_STEPS) -> DiffusionResult:
    """Let the plate relax until every cell is within *eps* of the mean.

    Any cell then reads the mean. When *max_steps* runs out first, the result
    is flagged as not converged and carries the best estimate so far.
    """
    if not eps > 0:
        raise InvalidParameter(f"Accuracy must be > 0, got {eps}")
    if max_steps < 1:
        raise InvalidParameter(f"max_steps must be >= 1, got {max_steps}")

    temperatures = grid.temperatures.copy()
    mean = grid.total_heat / temperatures.size

    steps = 0
    while np.abs(temperatures - mean).max() >= eps:
        if steps == max_steps:
            logging.warning(f"Diffusion not converged to {eps} after {steps} steps")
            return DiffusionResult(float(temperatures[0, 0]), steps, HeatGrid(temperatures, validate=False), False)
        temperatures = diffusion_step(temperatures)
        steps += 1

    logging.debug(f"Diffusion of a {grid.side}x{grid.side} plate converged in {steps} steps")
    return DiffusionResult(float(temperatures[0, 0]), steps, HeatGrid(temperatures, validate=False), True)
