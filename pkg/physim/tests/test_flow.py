"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from physim.constants import GARBAGE
from physim.exceptions import DimensionError, InvalidParameter, UnsupportedInput
from physim.flow import (
    SplitterTree,
    build_flow_machine,
    correctness_threshold,
    flow_matmul,
    flow_matvec,
    int_matmul_bitdecomp,
    leaf_fractions,
    multiply,
)
from physim.matrices import BinaryMatrix, IntMatrix, integer_product, read_matrix


def construction_cost(n: int) -> float:
    """Closed form of the construction ledger for n a power of 2 (time = energy)."""
    L = int(math.log2(n))
    return 2 * n * (n - 1) * L + n * n * L + 2 * n * n


@given(st.integers(0, 8), st.floats(0, 0.49), st.integers(0, 2 ** 32))
def test_leaf_fractions_sum_to_one(depth, delta, seed):
    rng = np.random.default_rng(seed)
    tree = SplitterTree(rng.uniform(0.5 - delta, 0.5 + delta, size=2 ** depth - 1))
    fractions = leaf_fractions(tree)
    assert tree.leaf_count == 2 ** depth
    assert tree.depth == depth
    assert fractions.size == 2 ** depth
    assert abs(fractions.sum() - 1.0) < 1e-12


def test_leaf_fractions_values():
    tree = SplitterTree([0.75, 0.5, 0.25])
    assert leaf_fractions(tree).tolist() == [0.375, 0.375, 0.0625, 0.1875]
    assert [node.split_fraction for node in tree.nodes] == [0.75, 0.5, 0.25]


@pytest.mark.parametrize("fractions", [[0.5, 0.5], [0.0], [1.0], [0.5, 0.5, 1.2]])
def test_splitter_tree_invalid(fractions):
    with pytest.raises((DimensionError, InvalidParameter)):
        SplitterTree(fractions)


@pytest.mark.parametrize(
    "n, delta, eps",
    [
        (2, 1 / 16, 1 / 32),
        (16, 1 / 512, 1 / 2048),
        (20, 1 / (8 * 32 * 5), 1 / (8 * 32 * 32)),
        (64, 1 / 3072, 1 / 32768),
    ],
)
def test_correctness_threshold(n, delta, eps):
    assert correctness_threshold(n) == (pytest.approx(delta), pytest.approx(eps))


def test_build_routing(rng):
    A = BinaryMatrix.random(5, rng)
    machine = build_flow_machine(A, 0.0)
    assert (machine.n, machine.N, machine.depth) == (5, 8, 3)
    assert machine.routing.shape == (5, 8)
    # Padding leaves always go to garbage
    assert (machine.routing[:, 5:] == GARBAGE).all()
    for j in range(5):
        for i in range(5):
            assert machine.routing[j, i] == (i if A.entries[i, j] else GARBAGE)


def test_build_worst_case():
    machine = build_flow_machine(BinaryMatrix.ones(4), 0.01, worst_case=True)
    for tree in machine.trees:
        assert np.all(tree.split_fractions == 0.51)


def test_build_splits_within_tolerance(rng):
    delta = 0.05
    machine = build_flow_machine(BinaryMatrix.random(16, rng), delta, seed=3)
    for tree in machine.trees:
        assert np.all(np.abs(tree.split_fractions - 0.5) <= delta)


@pytest.mark.parametrize("n", [1, 2, 4, 16, 64])
def test_construction_ledger_closed_form(n, rng):
    ledger = build_flow_machine(BinaryMatrix.random(n, rng), 0.0).construction_ledger
    assert ledger.total_time == pytest.approx(construction_cost(n))
    assert ledger.total_energy == pytest.approx(construction_cost(n))


@pytest.mark.parametrize("delta", [-0.1, 0.5, 0.7])
def test_build_invalid_delta(delta):
    with pytest.raises(InvalidParameter):
        build_flow_machine(BinaryMatrix.ones(2), delta)


def test_build_not_square():
    with pytest.raises(DimensionError):
        build_flow_machine(BinaryMatrix([[1, 0, 1], [0, 1, 1]]), 0.0)


def test_matvec_exact_example(location):
    A = BinaryMatrix(read_matrix(location / "a3.txt"))
    machine = build_flow_machine(A, 0.0)
    result = flow_matvec(machine, [1, 1, 0], 0.0)
    assert result.c.tolist() == [1, 1, 2]


def test_matvec_ledger():
    n = 16
    machine = build_flow_machine(BinaryMatrix.ones(n), 0.0)
    b = [1] * 5 + [0] * 11
    ledger = flow_matvec(machine, b, 0.0).ledger
    # Measuring to 1/(8 N²) takes 2 log2(N) + 3 steps
    measure = 11
    assert [entry.label for entry in ledger.entries] == [
        "lift material",
        "input measurement",
        "flow",
        "output measurement",
    ]
    assert ledger.total_time == pytest.approx(5 * 4 + 5 * measure + n + n * measure)
    assert ledger.total_energy == pytest.approx(5 * 4 + 5 * measure + n * measure)


def test_matvec_conservation(rng):
    n = 12
    machine = build_flow_machine(BinaryMatrix.random(n, rng), 0.1, seed=5)
    b = (rng.random(n) < 0.5).astype(np.uint8)
    result = flow_matvec(machine, b, 0.0)
    assert abs(result.raw_measurements.sum() + result.garbage - b.sum()) < 1e-12


def test_matvec_invalid(rng):
    machine = build_flow_machine(BinaryMatrix.random(4, rng), 0.0)
    with pytest.raises(DimensionError):
        flow_matvec(machine, [1, 0, 1], 0.0)
    with pytest.raises(InvalidParameter):
        flow_matvec(machine, [1, 0, 1, 2], 0.0)
    with pytest.raises(InvalidParameter):
        flow_matvec(machine, [1, 0, 1, 1], -1e-3)


def test_matvec_deterministic(rng):
    machine = build_flow_machine(BinaryMatrix.random(16, rng), 0.01, seed=9)
    b = np.ones(16, dtype=np.uint8)
    first = flow_matvec(machine, b, 1e-4, seed=11)
    second = flow_matvec(machine, b, 1e-4, seed=11)
    assert np.array_equal(first.raw_measurements, second.raw_measurements)
    assert np.array_equal(first.c, second.c)


@pytest.mark.parametrize("n", [4, 8, 16, 32, 64])
def test_matmul_oracle_safe_thresholds(n, random_pairs):
    delta, eps = correctness_threshold(n)
    for index, (A, B) in enumerate(random_pairs(n, 1000)):
        result = flow_matmul(A, B, delta, eps, seed=index)
        assert np.array_equal(result.product.entries, integer_product(A.entries, B.entries)), index


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matvec_exact_without_noise_every_input(n):
    vectors = list(itertools.product((0, 1), repeat=n))
    for bits in itertools.product((0, 1), repeat=n * n):
        A = BinaryMatrix(np.array(bits).reshape(n, n))
        machine = build_flow_machine(A, 0.0)
        for b in vectors:
            result = flow_matvec(machine, b, 0.0)
            assert np.array_equal(result.c, A.entries.astype(np.int64) @ b), (bits, b)


def test_matvec_exact_without_noise_every_matrix_of_size_4():
    n = 4
    ones = np.ones(n, dtype=np.uint8)
    for bits in itertools.product((0, 1), repeat=n * n):
        A = BinaryMatrix(np.array(bits).reshape(n, n))
        result = flow_matvec(build_flow_machine(A, 0.0), ones, 0.0)
        assert np.array_equal(result.c, A.entries.sum(axis=1)), bits


@pytest.mark.parametrize("n", [65, 100, 128])
def test_matmul_exact_without_noise_large(n, random_pairs):
    for index, (A, B) in enumerate(random_pairs(n, 3)):
        result = flow_matmul(A, B, 0.0, 0.0, seed=index)
        assert np.array_equal(result.product.entries, integer_product(A.entries, B.entries)), index


def test_negative_seed_is_accepted(rng):
    A = BinaryMatrix.random(8, rng)
    B = BinaryMatrix.random(8, rng)
    delta, eps = correctness_threshold(8)
    result = flow_matmul(A, B, delta, eps, seed=-1)
    assert np.array_equal(result.product.entries, integer_product(A.entries, B.entries))
    assert flow_matmul(A, B, delta, eps, seed=-1).product == result.product


@pytest.mark.parametrize("n", [4, 16, 64])
def test_matmul_oracle_worst_case_safe_thresholds(n, random_pairs):
    delta, _ = correctness_threshold(n)
    for A, B in random_pairs(n, 5):
        result = flow_matmul(A, B, delta, 0.0, worst_case=True)
        assert np.array_equal(result.product.entries, integer_product(A.entries, B.entries))


def test_matmul_falsified_outside_thresholds(random_pairs):
    n = 64
    delta = 10 * correctness_threshold(n)[0]
    misrounds = 0
    for trial, (A, B) in enumerate(random_pairs(n, 100)):
        result = flow_matmul(A, B, delta, 0.0, seed=trial, worst_case=True)
        misrounds += int((result.product.entries != integer_product(A.entries, B.entries)).sum())
    assert misrounds >= 1


def test_matmul_ledger_amortizes_construction(rng):
    n = 8
    A, B = BinaryMatrix.random(n, rng), BinaryMatrix.random(n, rng)
    result = flow_matmul(A, B, 0.0, 0.0)
    machine = build_flow_machine(A, 0.0)
    _, matvecs = multiply(machine, B, 0.0)
    assert result.ledger.total_time == pytest.approx(construction_cost(n) + matvecs.total_time)


def test_matmul_deterministic(random_pairs):
    A, B = next(random_pairs(16, 1))
    first = flow_matmul(A, B, 0.05, 1e-3, seed=4)
    second = flow_matmul(A, B, 0.05, 1e-3, seed=4)
    assert first.product == second.product
    assert first.ledger.entries == second.ledger.entries


def test_multiply_dimension_mismatch(rng):
    machine = build_flow_machine(BinaryMatrix.random(4, rng), 0.0)
    with pytest.raises(DimensionError):
        multiply(machine, BinaryMatrix.random(3, rng), 0.0)


@pytest.mark.parametrize("n, bits", [(4, 2), (8, 3), (16, 4)])
def test_bitdecomp_oracle(n, bits, rng):
    A, B = IntMatrix.random(n, bits, rng), IntMatrix.random(n, bits, rng)
    delta, eps = correctness_threshold(n)
    result = int_matmul_bitdecomp(A, B, delta, eps, seed=1)
    assert np.array_equal(result.product.entries, integer_product(A.entries, B.entries))


def test_bitdecomp_file(location):
    a = read_matrix(location / "int3.txt")
    A = IntMatrix(a, bits=3)
    result = int_matmul_bitdecomp(A, A, 0.0, 0.0)
    assert np.array_equal(result.product.entries, a @ a)


def test_bitdecomp_builds_one_machine_per_plane(rng):
    n, bits = 4, 3
    A, B = IntMatrix.random(n, bits, rng), IntMatrix.random(n, bits, rng)
    ledger = int_matmul_bitdecomp(A, B, 0.0, 0.0).ledger
    labels = [entry.label for entry in ledger.entries]
    assert labels.count("tubing fabrication") == bits
    assert labels.count("flow") == bits * bits * n


def test_bitdecomp_negative_entries():
    A = IntMatrix([[-1, 0], [0, 1]], bits=1)
    with pytest.raises(UnsupportedInput):
        int_matmul_bitdecomp(A, A, 0.0, 0.0)
