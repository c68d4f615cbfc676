"""
Simulators and cost ledgers for physical matrix-multiplication machines.

The rate/energy process model.

A process running at rate r >= 1 spends r time units and 1 / r**alpha
energy units per operation (memory reads and writes included), plus one
energy unit to start. Two processes may never touch the same memory
location during overlapping time intervals, reads included. An access at
rate r occupies the half-open interval [start, start + r).

Two families of schedules are generated and checked: copying a list with
n**q processes at rate n**s, and multiplying n x n matrices with either n²
processes at rate n (rotated reads) or, for alpha = 2, n**(9/5) processes
at rate n**(3/5) computing n**(1/5) entries each.
"""
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from .constants import COPY_OPS_PER_ITEM, MATMUL_OPS_PER_BLOCK
from .exceptions import InvalidParameter
from .ledger import CostDelta
from .utils import integral_power


@dataclass(frozen=True)
class AlphaParams:
    """Exponent of the tradeoff between the rate of a process and its energy per operation."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0 <= self.alpha <= 2:
            raise InvalidParameter(f"alpha must be in [0, 2], got {self.alpha}")

    def energy(self, op_count: int, rate: float) -> float:
        """Start energy plus *op_count* operations at *rate*."""
        return 1 + op_count / rate ** self.alpha


def process_cost(op_count: int, rate: float, alpha: float) -> CostDelta:
    """Time and energy of one process, initialization included."""
    params = AlphaParams(alpha)
    if rate < 1:
        raise InvalidParameter(f"Rate must be >= 1, got {rate}")
    if op_count < 0:
        raise InvalidParameter(f"Operation count must be >= 0, got {op_count}")
    return CostDelta(op_count * rate, params.energy(op_count, rate))


class Access(NamedTuple):
    start: float
    end: float
    location: int
    mode: str


class AccessTrace:
    """Memory accesses of one process, in time order."""

    def __init__(self, start: np.ndarray, end: np.ndarray, location: np.ndarray, write: np.ndarray) -> None:
        self.start = np.asarray(start, dtype=np.float64)
        self.end = np.asarray(end, dtype=np.float64)
        self.location = np.asarray(location, dtype=np.int64)
        self.write = np.asarray(write, dtype=bool)
        if not (self.start.shape == self.end.shape == self.location.shape == self.write.shape):
            raise InvalidParameter("Trace columns must have the same length")

    def __len__(self) -> int:
        return int(self.start.size)

    def __iter__(self) -> Iterator[Access]:
        for start, end, location, write in zip(
            self.start.tolist(), self.end.tolist(), self.location.tolist(), self.write.tolist()
        ):
            yield Access(start, end, location, "write" if write else "read")


@dataclass
class Process:
    pid: int
    rate: float
    op_count: int
    trace: Optional[AccessTrace] = None

    def __post_init__(self) -> None:
        if self.rate < 1:
            raise InvalidParameter(f"Process {self.pid}: rate must be >= 1, got {self.rate}")
        if self.op_count < 0:
            raise InvalidParameter(f"Process {self.pid}: operation count must be >= 0")
        trace = self.trace
        if trace is not None and len(trace):
            if (trace.end <= trace.start).any() or (trace.start[1:] < trace.end[:-1]).any():
                raise InvalidParameter(f"Process {self.pid}: accesses must be ordered and disjoint")
            if trace.end[-1] > self.finish:
                raise InvalidParameter(f"Process {self.pid}: accesses run past its last operation")

    @property
    def finish(self) -> float:
        return self.op_count * self.rate

    @property
    def access_trace(self) -> List[Access]:
        return list(self.trace) if self.trace is not None else []

    def cost(self, alpha: float) -> CostDelta:
        return process_cost(self.op_count, self.rate, alpha)


@dataclass
class ProcessSchedule:
    processes: List[Process]

    @property
    def makespan(self) -> float:
        return max((process.finish for process in self.processes), default=0.0)


@dataclass(frozen=True)
class CostReport:
    time: float
    energy: float
    process_count: int


@dataclass(frozen=True)
class Conflict:
    first: int
    second: int
    location: int
    overlap: Tuple[float, float]


def overlaps(s1: float, e1: float, s2: float, e2: float) -> bool:
    """
    >>> overlaps(2, 4, 3, 5)
    True
    >>> overlaps(2, 4, 4, 5)
    False
    """
    return not (e1 <= s2 or s1 >= e2)


def check_collisions(schedule: ProcessSchedule) -> Optional[Conflict]:
    """First pair of accesses from different processes overlapping on one location, None if there is none.

    After sorting by (location, start), some overlap exists iff two neighbors
    on the same location overlap: if access j overlaps an earlier access i,
    it also overlaps i + 1.
    """
    traced: List[Tuple[int, AccessTrace]] = []
    for process in schedule.processes:
        if process.trace is not None and len(process.trace):
            traced.append((process.pid, process.trace))
    if not traced:
        return None

    start = np.concatenate([trace.start for _, trace in traced])
    end = np.concatenate([trace.end for _, trace in traced])
    location = np.concatenate([trace.location for _, trace in traced])
    pid = np.concatenate([np.full(len(trace), owner) for owner, trace in traced])

    order = np.lexsort((start, location))
    start, end, location, pid = start[order], end[order], location[order], pid[order]

    clash = (location[1:] == location[:-1]) & (start[1:] < end[:-1]) & (pid[1:] != pid[:-1])
    hits = np.flatnonzero(clash)
    if not hits.size:
        return None

    first = int(hits[0])
    second = first + 1
    return Conflict(
        first=int(pid[first]),
        second=int(pid[second]),
        location=int(location[first]),
        overlap=(float(start[second]), float(min(end[first], end[second]))),
    )


def schedule_cost(schedule: ProcessSchedule, alpha: float) -> CostReport:
    """Makespan and total energy of a schedule, summed process by process."""
    costs = [process.cost(alpha) for process in schedule.processes]
    return CostReport(
        time=max((cost.time for cost in costs), default=0.0),
        energy=math.fsum(cost.energy for cost in costs),
        process_count=len(costs),
    )


def _uniform_cost(process_count: int, op_count: int, rate: float, alpha: float) -> CostReport:
    # Same per-process expression as process_cost(), so both agree to the last bit
    params = AlphaParams(alpha)
    return CostReport(
        time=op_count * rate,
        energy=process_count * params.energy(op_count, rate),
        process_count=process_count,
    )


def _operation_slots(op_count: int, rate: float) -> Tuple[np.ndarray, np.ndarray]:
    """[start, end) of each operation of a process running back to back."""
    index = np.arange(op_count + 1, dtype=np.float64) * rate
    return index[:-1], index[1:]


#
# Copying a list
#


def balanced_q(alpha: float, s: float) -> float:
    """Parallelism exponent at which copy time and energy grow alike."""
    return min(1.0, max(0.0, 1.0 - alpha * s))


def _copy_shape(n: int, q: float, s: float) -> Tuple[int, int, float]:
    if n < 1:
        raise InvalidParameter(f"List length must be >= 1, got {n}")
    if not 0 <= q <= 1 or not 0 <= s <= 1:
        raise InvalidParameter(f"q and s must be in [0, 1], got q={q}, s={s}")
    return integral_power(n, q), integral_power(n, 1 - q), float(n) ** s


def copy_list_schedule(n: int, q: float, s: float) -> ProcessSchedule:
    """ceil(n**q) processes at rate n**s, each copying its own block of ceil(n**(1-q)) items."""
    process_count, items, rate = _copy_shape(n, q, s)
    op_count = COPY_OPS_PER_ITEM * items
    start, end = _operation_slots(op_count, rate)
    write = np.tile([False, True], items)
    destination = process_count * items

    processes = []
    for p in range(process_count):
        source = p * items + np.arange(items)
        location = np.empty(op_count, dtype=np.int64)
        location[0::2] = source
        location[1::2] = destination + source
        processes.append(Process(p, rate, op_count, AccessTrace(start, end, location, write)))
    return ProcessSchedule(processes)


def copy_list_cost(n: int, q: float, s: float, alpha: float) -> CostReport:
    """Closed form of copy_list_schedule(), 2 operations per item.

    time = n**(1 - q + s) and energy = n**q (1 + n**(1 - q) / n**(s alpha)), up to rounding of the counts.
    """
    process_count, items, rate = _copy_shape(n, q, s)
    return _uniform_cost(process_count, COPY_OPS_PER_ITEM * items, rate, alpha)


#
# Matrix multiplication
#

# A, B and C live in disjoint address ranges: A at [0, n²), B at [n², 2n²), C at [2n², 3n²)


def _matmul_locations(
    n: int, i: np.ndarray, j: np.ndarray, t: np.ndarray, rotate: bool
) -> Tuple[np.ndarray, np.ndarray]:
    """A and B locations read by the processes of entries (i, j) in blocks t, one row per entry."""
    if rotate:
        k = (i[:, np.newaxis] + j[:, np.newaxis] + t[np.newaxis, :]) % n
    else:
        k = np.broadcast_to(t, (i.size, t.size))
    return i[:, np.newaxis] * n + k, n * n + k * n + j[:, np.newaxis]


def _block_trace(blocks: int, rate: float) -> Tuple[np.ndarray, np.ndarray]:
    """Slots of the two reads of every block; the third slot of a block is the accumulate."""
    start, end = _operation_slots(MATMUL_OPS_PER_BLOCK * blocks, rate)
    reads = np.sort(np.concatenate([np.arange(blocks) * 3, np.arange(blocks) * 3 + 1]))
    return start[reads], end[reads]


def matmul_schedule(n: int, rotate: bool = True) -> ProcessSchedule:
    """n² processes at rate n, P(i, j) computing entry (i, j) of A B.

    Time is cut into n blocks of 3 operations: in block t, P(i, j) reads
    A(i, k) then B(k, j) with k = (i + j + t) mod n, then accumulates; the
    last accumulate writes C(i, j). Without *rotate*, k = t.
    """
    if n < 1:
        raise InvalidParameter(f"Matrix size must be >= 1, got {n}")
    rate = float(n)
    op_count = MATMUL_OPS_PER_BLOCK * n
    slot_start, slot_end = _operation_slots(op_count, rate)
    read_start, read_end = _block_trace(n, rate)

    start = np.concatenate([read_start, slot_start[-1:]])
    end = np.concatenate([read_end, slot_end[-1:]])
    write = np.zeros(start.size, dtype=bool)
    write[-1] = True

    pids = np.arange(n * n)
    i, j = np.divmod(pids, n)
    a_loc, b_loc = _matmul_locations(n, i, j, np.arange(n), rotate)
    reads = np.empty((n * n, 2 * n), dtype=np.int64)
    reads[:, 0::2] = a_loc
    reads[:, 1::2] = b_loc
    outputs = 2 * n * n + pids

    processes = [
        Process(int(pid), rate, op_count, AccessTrace(start, end, np.append(reads[pid], outputs[pid]), write))
        for pid in pids.tolist()
    ]
    return ProcessSchedule(processes)


def matmul_cost(n: int, alpha: float) -> CostReport:
    """Closed form of matmul_schedule(): time 3n², energy n² (1 + 3n / n**alpha)."""
    if n < 1:
        raise InvalidParameter(f"Matrix size must be >= 1, got {n}")
    return _uniform_cost(n * n, MATMUL_OPS_PER_BLOCK * n, float(n), alpha)


def _fifth_root(n: int) -> int:
    m = round(n ** 0.2)
    if n < 1 or m ** 5 != n:
        raise InvalidParameter(f"Matrix size must be a perfect fifth power, got {n}")
    return m


def subquadratic_matmul_schedule(n: int, rotate: bool = True, with_trace: bool = True) -> ProcessSchedule:
    """n**(9/5) processes at rate n**(3/5), each computing n**(1/5) entries of one output row.

    With n = m**5, process (i, g) owns the entries (i, g m + u) for u < m and
    computes them one after the other, n blocks each; in block t of entry
    (i, j) it reads A(i, k) and B(k, j) with k = (i + j + t) mod n. Processes
    of one row never share k (their j differ by less than n) and processes
    reading one column j own the same g, hence differ in i and in k.
    The last accumulate of every entry writes it.

    Without *with_trace* only the process descriptors are built.
    """
    m = _fifth_root(n)
    groups = n // m
    rate = float(m ** 3)
    blocks = m * n
    op_count = MATMUL_OPS_PER_BLOCK * blocks

    if not with_trace:
        return ProcessSchedule([Process(pid, rate, op_count) for pid in range(n * groups)])

    slot_start, slot_end = _operation_slots(op_count, rate)
    read_start, read_end = _block_trace(blocks, rate)
    # Third slot of the last block of every entry
    write_slots = (np.arange(m) + 1) * n * MATMUL_OPS_PER_BLOCK - 1
    start = np.concatenate([read_start, slot_start[write_slots]])
    end = np.concatenate([read_end, slot_end[write_slots]])
    order = np.argsort(start, kind="stable")
    write = np.concatenate([np.zeros(read_start.size, dtype=bool), np.ones(m, dtype=bool)])[order]
    start, end = start[order], end[order]

    t = np.arange(n)
    processes = []
    for pid in range(n * groups):
        i, g = divmod(pid, groups)
        columns = g * m + np.arange(m)
        rows = np.full(m, i)
        a_loc, b_loc = _matmul_locations(n, rows, columns, t, rotate)
        reads = np.empty((m, 2 * n), dtype=np.int64)
        reads[:, 0::2] = a_loc
        reads[:, 1::2] = b_loc
        location = np.concatenate([reads.ravel(), 2 * n * n + i * n + columns])[order]
        processes.append(Process(pid, rate, op_count, AccessTrace(start, end, location, write)))
    return ProcessSchedule(processes)


def subquadratic_matmul_cost(n: int, alpha: float = 2.0) -> CostReport:
    """Closed form of subquadratic_matmul_schedule(): (1 + 3) n**(9/5) energy and 3 n**(9/5) time at alpha = 2."""
    m = _fifth_root(n)
    return _uniform_cost(n * (n // m), MATMUL_OPS_PER_BLOCK * m * n, float(m ** 3), alpha)
