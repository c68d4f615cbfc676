"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from physim.exceptions import InvalidParameter
from physim.gadgets import HeatGrid, diffuse_average, diffusion_step, or_track


@pytest.mark.parametrize("n", range(1, 13))
def test_or_track_exhaustive(n):
    for bits in itertools.product((0, 1), repeat=n):
        assert or_track(bits, 1.0).result == int(any(bits))


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64), st.floats(min_value=0.01, max_value=8))
def test_or_track_ledger(bits, v):
    ledger = or_track(bits, v).ledger
    assert ledger.total_energy == pytest.approx(v * v)
    assert ledger.total_time == pytest.approx((len(bits) + 1) / v)


def test_or_track_tradeoff():
    # v = 1/sqrt(n): linear time for energy 1/n
    n = 100
    ledger = or_track([0] * n, 1 / math.sqrt(n)).ledger
    assert ledger.total_time == pytest.approx((n + 1) * math.sqrt(n))
    assert ledger.total_energy == pytest.approx(1 / n)


def test_or_track_out_of_model(caplog):
    result = or_track([0, 1, 0, 0], 3.0)
    assert result.result == 1
    assert "out of model" in result.ledger.entries[0].label
    assert "exceeds" in caplog.text


@pytest.mark.parametrize("bits, v", [([], 1.0), ([0, 2], 1.0), ([0, 1], 0.0), ([0, 1], -1.0)])
def test_or_track_invalid(bits, v):
    with pytest.raises(InvalidParameter):
        or_track(bits, v)


@pytest.mark.parametrize("temperatures", [[[1, 2]], [[-1.0]], [[math.nan]], [[]]])
def test_heat_grid_invalid(temperatures):
    with pytest.raises(InvalidParameter):
        HeatGrid(temperatures)


def test_heat_grid_builders():
    grid = HeatGrid.hot_corner(4)
    assert grid.side == 4
    assert grid.total_heat == 16
    assert HeatGrid.uniform(3, 2.5).total_heat == 22.5


def test_diffusion_step_conserves_heat(rng):
    temperatures = rng.random((16, 16)) * 100
    total = temperatures.sum()
    for _ in range(50):
        temperatures = diffusion_step(temperatures)
        assert temperatures.sum() == pytest.approx(total, rel=1e-9)


def test_diffusion_step_uniform_is_fixed():
    temperatures = np.full((5, 5), 3.0)
    assert np.array_equal(diffusion_step(temperatures), temperatures)


@pytest.mark.parametrize("side", [1, 2, 5, 8, 16, 32, 64])
def test_diffuse_average_hot_corner(side):
    grid = HeatGrid.hot_corner(side)
    result = diffuse_average(grid, 1e-6)
    assert result.converged
    assert result.mean_estimate == pytest.approx(1.0, abs=1e-6)
    assert np.abs(result.grid.temperatures - 1.0).max() < 1e-6
    assert result.grid.total_heat == pytest.approx(grid.total_heat, rel=1e-9)


def test_diffuse_average_already_uniform():
    result = diffuse_average(HeatGrid.uniform(4, 0.5), 1e-3)
    assert result.steps_used == 0
    assert result.mean_estimate == 0.5


def test_diffuse_average_steps_grow_with_size():
    small = diffuse_average(HeatGrid.hot_corner(4), 1e-6).steps_used
    large = diffuse_average(HeatGrid.hot_corner(16), 1e-6).steps_used
    # Linear in the cell count, up to the log factor
    assert 8 < large / small < 32


def test_diffuse_average_step_limit(caplog):
    result = diffuse_average(HeatGrid.hot_corner(16), 1e-9, max_steps=10)
    assert not result.converged
    assert result.steps_used == 10
    assert "not converged" in caplog.text


@pytest.mark.parametrize("eps, max_steps", [(0, 10), (-1e-3, 10), (1e-3, 0)])
def test_diffuse_average_invalid(eps, max_steps):
    with pytest.raises(InvalidParameter):
        diffuse_average(HeatGrid.uniform(2, 1.0), eps, max_steps=max_steps)
