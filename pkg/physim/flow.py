"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Integer matrix multiplication with a gravity-fed network of tubing.

For each column j of the binary matrix A there is a complete binary tree of
flow splitters with N = 2**ceil(log2 n) leaves. Leaf i of tree j pours into
answer channel i when A[i, j] = 1, and into a garbage channel otherwise
(padding leaves i >= n always go to garbage). Pouring one unit of material
into every tree j with b[j] = 1 makes channel i collect about c_i / N, where
c = A b; the measured amount is rounded to the nearest multiple of 1/N.

Certified tolerances
--------------------
With every split fraction in [1/2 - delta, 1/2 + delta], a leaf receives
between (1/2 - delta)**L and (1/2 + delta)**L of its input, hence an error
of at most (1/N) * ((1 + 2 delta)**L - 1). A channel sums at most n leaves,
each fed with 1 +/- eps, and is read with an error of +/- eps, so after the
scaling by N the error is at most

    n * ((1 + 2 delta)**L * (1 + eps) - 1) + N * eps.

delta = 1 / (8 N L) makes (1 + 2 delta)**L - 1 <= exp(1 / (4 N)) - 1, and
eps = 1 / (8 N**2) keeps the remaining terms below 1/8: the total stays
under 1/2 for every n >= 1, so rounding to the nearest integer is exact.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence, Tuple, Union

import numpy as np

from .constants import GARBAGE
from .exceptions import DimensionError, InvalidParameter
from .ledger import CostLedger, fabricate_cost, measure_cost
from .matrices import BinaryMatrix, IntMatrix, as_binary_vector, check_square_pair
from .utils import ceil_log2, padded_size, stream_seed


Seed = Union[int, Sequence[int]]


def _child_seed(seed: Seed, *keys: int) -> List[int]:
    """Seed of an independent random stream derived from *seed*."""
    base = [seed] if isinstance(seed, int) else list(seed)
    return [stream_seed(value) for value in base] + list(keys)


@dataclass(frozen=True)
class SplitterNode:
    """Fraction of the incoming material sent to the left child, the rest goes right."""

    split_fraction: float


class SplitterTree:
    """Complete binary tree of splitters, stored in heap order.

    Node 0 is the root and the nodes of level l occupy indexes 2**l - 1 to
    2**(l + 1) - 2; leaves are numbered left to right.
    """

    def __init__(self, split_fractions: Sequence[float]) -> None:
        fractions = np.array(split_fractions, dtype=np.float64).reshape(-1)
        leaves = fractions.size + 1
        if leaves & (leaves - 1):
            raise DimensionError(f"A complete tree has 2**L - 1 splitters, got {fractions.size}")
        if ((fractions <= 0) | (fractions >= 1)).any():
            raise InvalidParameter("Split fractions must lie in (0, 1)")
        self.split_fractions = fractions
        self.split_fractions.flags.writeable = False

    @property
    def leaf_count(self) -> int:
        return int(self.split_fractions.size + 1)

    @property
    def depth(self) -> int:
        return ceil_log2(self.leaf_count)

    @property
    def nodes(self) -> List[SplitterNode]:
        return [SplitterNode(float(fraction)) for fraction in self.split_fractions]


def _propagate(splits: np.ndarray) -> np.ndarray:
    """Leaf fractions of several trees at once, *splits* has one tree per row."""
    trees, nodes = splits.shape
    amounts = np.ones((trees, 1))
    while amounts.shape[1] <= nodes:
        width = amounts.shape[1]
        left = splits[:, width - 1 : 2 * width - 1]
        level = np.empty((trees, 2 * width))
        level[:, 0::2] = amounts * left
        level[:, 1::2] = amounts * (1.0 - left)
        amounts = level
    return amounts


def leaf_fractions(tree: SplitterTree) -> np.ndarray:
    """Material reaching each leaf when one unit enters the root."""
    return _propagate(tree.split_fractions[np.newaxis, :])[0]


@dataclass
class FlowMachine:
    n: int
    N: int
    trees: List[SplitterTree]
    routing: np.ndarray
    construction_ledger: CostLedger
    delta: float
    matrix: BinaryMatrix
    leaf_table: np.ndarray = field(repr=False)

    @property
    def depth(self) -> int:
        return ceil_log2(self.N)

    @cached_property
    def channel_gain(self) -> np.ndarray:
        """gain[i, j]: material reaching answer channel i per unit poured in tree j."""
        return self.leaf_table[:, : self.n].T * (self.routing[:, : self.n].T != GARBAGE)

    @cached_property
    def garbage_gain(self) -> np.ndarray:
        """Material routed to garbage per unit poured in each tree."""
        return (self.leaf_table * (self.routing == GARBAGE)).sum(axis=1)


def correctness_threshold(n: int) -> Tuple[float, float]:
    """Splitter and measurement tolerances under which rounding is exact (see module doc)."""
    size = padded_size(n)
    depth = math.log2(max(2, size))
    return 1 / (8 * size * depth), 1 / (8 * size * size)


def build_flow_machine(A: BinaryMatrix, delta: float, seed: Seed = 0, worst_case: bool = False) -> FlowMachine:
    """Build and calibrate the tubing network representing *A*.

    Every split fraction is drawn uniformly from [1/2 - delta, 1/2 + delta];
    *worst_case* puts them all at exactly 1/2 + delta instead.
    """
    if not A.is_square:
        raise DimensionError(f"The machine needs a square matrix, got {A!r}")
    if not 0 <= delta < 0.5:
        raise InvalidParameter(f"Splitter tolerance must be in [0, 1/2), got {delta}")

    n = A.n_rows
    size = padded_size(n)
    depth = ceil_log2(size)

    rng = np.random.default_rng(_child_seed(seed))
    if worst_case:
        splits = np.full((n, size - 1), 0.5 + delta)
    else:
        splits = rng.uniform(0.5 - delta, 0.5 + delta, size=(n, size - 1))
    trees = [SplitterTree(row) for row in splits]

    # routing[j, i]: destination of leaf i of tree j
    routing = np.full((n, size), GARBAGE, dtype=np.int64)
    rows = np.arange(n)
    routing[:, :n] = np.where(A.entries.T == 1, rows[np.newaxis, :], GARBAGE)

    # Calibrating (and connecting) a splitter to within 1/N is a binary search of log2(N) steps
    splitters = n * (size - 1)
    ledger = CostLedger()
    ledger.charge("splitter calibration", measure_cost(1, 1 / size), count=splitters)
    ledger.charge("tubing fabrication", fabricate_cost(size * depth, 1), count=n)
    ledger.charge("splitter connection", measure_cost(1, 1 / size), count=splitters)
    ledger.charge("channel fabrication", fabricate_cost(n, 1), count=2 * n)

    logging.debug(f"Flow machine built: n={n}, N={size}, delta={delta}, worst_case={worst_case}")
    return FlowMachine(
        n=n,
        N=size,
        trees=trees,
        routing=routing,
        construction_ledger=ledger,
        delta=delta,
        matrix=A,
        leaf_table=_propagate(splits),
    )


@dataclass
class FlowMatvecResult:
    c: np.ndarray
    ledger: CostLedger
    raw_measurements: np.ndarray
    garbage: float


def flow_matvec(machine: FlowMachine, b: Sequence[int], eps_meas: float, seed: Seed = 0) -> FlowMatvecResult:
    """Pour b into the machine and read A b off the answer channels.

    Every unit poured and every channel read carries a uniform error in
    +/- *eps_meas*. The ledger charges, in order: lifting the poured units to
    the top of the trees, measuring them out one after the other, the flow
    down the inclines, and reading the n channels one after the other.
    """
    vector = as_binary_vector(b, machine.n)
    if eps_meas < 0:
        raise InvalidParameter(f"Measurement error must be >= 0, got {eps_meas}")

    rng = np.random.default_rng(_child_seed(seed))
    poured = vector == 1
    units = int(poured.sum())

    inputs = vector.astype(np.float64)
    if eps_meas:
        inputs[poured] += rng.uniform(-eps_meas, eps_meas, size=units)

    collected = machine.channel_gain @ inputs
    garbage = float(machine.garbage_gain @ inputs)

    measured = collected.copy()
    if eps_meas:
        measured += rng.uniform(-eps_meas, eps_meas, size=machine.n)
    c = np.floor(machine.N * measured + 0.5).astype(np.int64)

    # An exact measurement is charged as one resolving the certified accuracy
    accuracy = eps_meas or correctness_threshold(machine.n)[1]
    depth = machine.depth
    ledger = CostLedger()
    ledger.add("lift material", units * depth, units * depth)
    ledger.charge("input measurement", measure_cost(1, accuracy), count=units)
    ledger.add("flow", machine.n, 0.0)
    ledger.charge("output measurement", measure_cost(1, accuracy), count=machine.n)

    return FlowMatvecResult(c=c, ledger=ledger, raw_measurements=measured, garbage=garbage)


@dataclass
class FlowMatmulResult:
    product: IntMatrix
    ledger: CostLedger


def _as_int_matrix(entries: np.ndarray) -> IntMatrix:
    largest = int(np.abs(entries).max()) if entries.size else 0
    return IntMatrix(entries, bits=max(1, largest.bit_length()))


def multiply(machine: FlowMachine, B: BinaryMatrix, eps_meas: float, seed: Seed = 0) -> Tuple[np.ndarray, CostLedger]:
    """Run one matvec per column of *B* on an existing machine."""
    if B.n_rows != machine.n:
        raise DimensionError(f"Expected {machine.n} rows, got {B!r}")

    product = np.empty((machine.n, B.n_cols), dtype=np.int64)
    ledger = CostLedger()
    for j in range(B.n_cols):
        result = flow_matvec(machine, B.column(j), eps_meas, seed=_child_seed(seed, j + 1))
        product[:, j] = result.c
        ledger.extend(result.ledger)
    return product, ledger


def flow_matmul(
    A: BinaryMatrix, B: BinaryMatrix, delta: float, eps_meas: float, seed: Seed = 0, worst_case: bool = False
) -> FlowMatmulResult:
    """A B through one machine built for A and n matvecs, construction amortized in the ledger."""
    check_square_pair(A, B)
    machine = build_flow_machine(A, delta, seed=seed, worst_case=worst_case)
    product, matvecs = multiply(machine, B, eps_meas, seed=seed)
    return FlowMatmulResult(_as_int_matrix(product), machine.construction_ledger.merge(matvecs))


def int_matmul_bitdecomp(
    A: IntMatrix, B: IntMatrix, delta: float, eps_meas: float, seed: Seed = 0
) -> FlowMatmulResult:
    """Product of nonnegative r-bit matrices from the r² products of their bit planes.

    A = sum_p 2**p A_p and B = sum_q 2**q B_q, one machine is built per A_p
    and reused for every B_q.
    """
    check_square_pair(A, B)
    planes_a = A.bit_planes()
    planes_b = B.bit_planes()

    product = np.zeros((A.n_rows, B.n_cols), dtype=np.int64)
    ledger = CostLedger()
    for p, plane_a in enumerate(planes_a):
        machine = build_flow_machine(plane_a, delta, seed=_child_seed(seed, p))
        ledger.extend(machine.construction_ledger)
        for q, plane_b in enumerate(planes_b):
            partial, matvecs = multiply(machine, plane_b, eps_meas, seed=_child_seed(seed, p, q))
            product += partial << (p + q)
            ledger.extend(matvecs)

    return FlowMatmulResult(_as_int_matrix(product), ledger)
