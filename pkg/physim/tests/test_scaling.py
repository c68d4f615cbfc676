"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from physim.exceptions import InvalidParameter, SweepError, VerificationError
from physim.scaling import ScalingSample, fit_exponent, fit_sweep, run_point, sweep


def test_fit_exact_square():
    fit = fit_exponent([(n, n * n) for n in (2, 4, 8, 16)])
    assert fit.exponent == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == 1.0
    assert fit.sample_count == 4


def test_fit_linear_with_constant():
    fit = fit_exponent([(n, 5 * n) for n in (3, 10, 100)])
    assert fit.exponent == pytest.approx(1.0)
    assert fit.intercept == pytest.approx(math.log2(5))


def test_fit_polylog_inflates_slope():
    fit = fit_exponent([(n, n * n * math.log2(n)) for n in (8, 16, 32, 64, 128, 256)])
    assert 2.0 < fit.exponent < 2.4
    assert fit.r_squared < 1.0


def test_fit_constant_cost():
    fit = fit_exponent([(2, 7.0), (8, 7.0)])
    assert fit.exponent == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == 1.0


@given(st.floats(-3, 3), st.floats(0.01, 100), st.lists(st.integers(1, 10 ** 4), min_size=2, max_size=8, unique=True))
def test_fit_recovers_power_laws(exponent, factor, sizes):
    fit = fit_exponent([(n, factor * n ** exponent) for n in sizes])
    assert fit.exponent == pytest.approx(exponent, abs=1e-9)


@pytest.mark.parametrize(
    "samples",
    [[], [(4, 1.0)], [(4, 1.0), (8, 0.0)], [(4, 1.0), (8, -2.0)], [(4, 1.0), (4, 2.0)], [(0, 1.0), (4, 2.0)]],
)
def test_fit_invalid(samples):
    with pytest.raises(InvalidParameter):
        fit_exponent(samples)


def test_fit_sweep_without_energy():
    samples = [ScalingSample(n, float(n), 0.0, "diffusion", 0) for n in (4, 16, 64)]
    time_fit, energy_fit = fit_sweep(samples)
    assert time_fit.exponent == pytest.approx(1.0)
    assert energy_fit is None


def test_sweep_flow_matmul():
    samples = sweep("flow-matmul", [8, 16, 32], {"delta": 0.0}, seed=3)
    assert [sample.n for sample in samples] == [8, 16, 32]
    assert [sample.seed for sample in samples] == [3, 4, 5]
    assert samples[0].time < samples[1].time < samples[2].time
    assert all(sample.label == "flow-matmul" for sample in samples)


def test_sweep_kinetic_verified():
    samples = sweep("kinetic-matmul", [8, 16, 32], {"energy_model": "optical"}, seed=1)
    assert len(samples) == 3


def test_sweep_deterministic():
    first = sweep("flow-matvec", [16, 32, 64], {"eps_meas": 1e-5}, seed=11)
    second = sweep("flow-matvec", [16, 32, 64], {"eps_meas": 1e-5}, seed=11)
    assert first == second


def test_sweep_parallel_matches_serial():
    serial = sweep("kinetic-matmul", [4, 8, 16], seed=2)
    parallel = sweep("kinetic-matmul", [4, 8, 16], seed=2, workers=2)
    assert serial == parallel


@pytest.mark.parametrize(
    "target, sizes, params, time_range, energy_range",
    [
        ("alpha-copy", [2 ** k for k in range(10, 17)], {"alpha": 1.0, "s": 1 / 3}, (0.617, 0.717), (0.617, 0.717)),
        ("alpha-copy", [2 ** k for k in range(10, 21)], {"alpha": 2.0, "s": 0.2}, (0.55, 0.65), (0.55, 0.65)),
        ("alpha-matmul", [2 ** k for k in range(4, 12)], {"alpha": 1.0}, (1.95, 2.05), (1.95, 2.05)),
        ("alpha-subquadratic", [32, 243, 1024, 3125], {}, (1.75, 1.85), (1.75, 1.85)),
        ("flow-build", [16, 32, 64, 128, 256], {}, (1.9, 2.3), (1.9, 2.3)),
        ("flow-matvec", [16, 32, 64, 128, 256], {}, (0.9, 1.3), (0.9, 1.3)),
        ("kinetic-matmul", [8, 16, 32, 64, 128], {}, (1.9, 2.4), (1.9, 2.4)),
    ],
)
def test_sweep_exponents(target, sizes, params, time_range, energy_range):
    time_fit, energy_fit = fit_sweep(sweep(target, sizes, params, seed=7))
    assert time_range[0] <= time_fit.exponent <= time_range[1]
    assert energy_range[0] <= energy_fit.exponent <= energy_range[1]


def test_sweep_diffusion():
    samples = sweep("diffusion", [16, 64, 256, 1024], {"eps": 1e-4})
    time_fit, energy_fit = fit_sweep(samples)
    assert energy_fit is None
    # Steps grow like the cell count, up to a log factor
    assert 0.7 <= time_fit.exponent <= 1.3


def test_sweep_diffusion_not_square():
    with pytest.raises(SweepError) as exc:
        sweep("diffusion", [16, 20])
    assert exc.value.n == 20
    assert isinstance(exc.value.error, InvalidParameter)


def test_run_point_wraps_verification_failures():
    # Splitters far off 1/2 misround the product
    with pytest.raises(SweepError) as exc:
        run_point("flow-matmul", 64, {"delta": 0.3}, seed=0)
    assert exc.value.n == 64
    assert isinstance(exc.value.error, VerificationError)
    assert exc.value.error.location is not None


@pytest.mark.parametrize(
    "target, sizes, workers",
    [
        ("nope", [8], 1),
        ("flow-matmul", [], 1),
        ("flow-matmul", [16, 8], 1),
        ("flow-matmul", [8, 8], 1),
        ("flow-matmul", [8], 0),
    ],
)
def test_sweep_invalid(target, sizes, workers):
    with pytest.raises(InvalidParameter):
        sweep(target, sizes, workers=workers)
