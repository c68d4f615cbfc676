"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Boolean matrix multiplication on a frictionless grid.

Cell (i, k) of an n x n grid holds a unit block on its right side when
A[i, k] = 1. To compute A b, a unit-mass agent is launched down every column
k with b[k] = 1 at time k; it crosses one row per time unit, so it is at
row i at time i + k. When it hits a block at (i, k) it sets c[i] = 1 and
clears the rest of row i: cell (i, k + d) receives enough energy to slide
its block away within d time units, i.e. exactly when agent k + d reaches
row i. A clear completing at an agent's arrival time is applied first.

The same algorithm is also given on linked lists (one list of rows per
column of A, rows removed from later lists once found) as a RAM reference.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import repeat
from typing import Iterator, List, NamedTuple, Tuple, Union

import numpy as np

from .exceptions import DimensionError, InvalidParameter, SimulationFault
from .ledger import CostLedger
from .matrices import BinaryMatrix, BinaryVector, as_binary_vector, check_square_pair
from .utils import ceil_log2


class ColumnLists:
    """One doubly linked list per column of A, holding the rows with a 1.

    Links live in plain arrays, -1 ends a list. Removed rows keep their own
    links, so undoing the removals in reverse order relinks them exactly.
    """

    def __init__(self, entries: np.ndarray) -> None:
        n = entries.shape[0]
        self.head = [-1] * n
        self.next = [[-1] * n for _ in range(n)]
        self.prev = [[-1] * n for _ in range(n)]
        self.linked = [[False] * n for _ in range(n)]
        self._removed: List[Tuple[int, int]] = []

        for k in range(n):
            last = -1
            for i in np.flatnonzero(entries[:, k]).tolist():
                if last == -1:
                    self.head[k] = i
                else:
                    self.next[k][last] = i
                self.prev[k][i] = last
                self.linked[k][i] = True
                last = i

    def traverse(self, k: int) -> Iterator[int]:
        i = self.head[k]
        while i != -1:
            yield i
            i = self.next[k][i]

    def remove(self, k: int, i: int) -> bool:
        """Unlink row *i* from list *k*, return whether it was there."""
        if not self.linked[k][i]:
            return False
        before, after = self.prev[k][i], self.next[k][i]
        if before == -1:
            self.head[k] = after
        else:
            self.next[k][before] = after
        if after != -1:
            self.prev[k][after] = before
        self.linked[k][i] = False
        self._removed.append((k, i))
        return True

    def reset(self) -> int:
        """Undo every removal, return how many rows were relinked."""
        count = len(self._removed)
        while self._removed:
            k, i = self._removed.pop()
            before, after = self.prev[k][i], self.next[k][i]
            if before == -1:
                self.head[k] = i
            else:
                self.next[k][before] = i
            if after != -1:
                self.prev[k][after] = i
            self.linked[k][i] = True
        return count


def ram_boolean_matmul(A: BinaryMatrix, B: BinaryMatrix) -> Tuple[BinaryMatrix, int]:
    """Boolean product with the linked-list algorithm, and its operation count.

    Operations counted: list nodes visited, one per list a found row is
    removed from (k' > k), one per row relinked by the reset after a column.
    """
    n = check_square_pair(A, B)
    lists = ColumnLists(A.entries)
    product = np.zeros((n, n), dtype=np.uint8)
    ops = 0

    for j in range(n):
        for k in np.flatnonzero(B.entries[:, j]).tolist():
            for i in lists.traverse(k):
                ops += 1
                product[i, j] = 1
                for later in range(k + 1, n):
                    ops += 1
                    lists.remove(later, i)
        ops += lists.reset()

    return BinaryMatrix(product), ops


def brute_boolean_matmul(A: BinaryMatrix, B: BinaryMatrix) -> BinaryMatrix:
    """C[i, j] = OR over k of (A[i, k] AND B[k, j]), evaluated for every (i, k, j)."""
    check_square_pair(A, B)
    terms = A.entries[:, :, np.newaxis] & B.entries[np.newaxis, :, :]
    return BinaryMatrix(terms.any(axis=1).astype(np.uint8))


class Variant(Enum):
    KINETIC = "kinetic"
    OPTICAL = "optical"


@dataclass(frozen=True)
class EnergyModel:
    """How a collision hands energy to the cells it clears.

    KINETIC: cell at distance d gets 1/d², enough to move its block one unit in d time units.
    OPTICAL: channel_count light channels along the row, channel l of opacity 1/2**l;
    one unit is sent down each channel.
    """

    variant: Variant
    channel_count: int = 0

    def __post_init__(self) -> None:
        if self.variant is Variant.OPTICAL and self.channel_count < 1:
            raise InvalidParameter(f"The optical model needs at least one channel, got {self.channel_count}")

    @classmethod
    def kinetic(cls) -> "EnergyModel":
        return cls(Variant.KINETIC)

    @classmethod
    def optical(cls, n: int) -> "EnergyModel":
        return cls(Variant.OPTICAL, channel_count=max(1, ceil_log2(n)))

    @classmethod
    def named(cls, name: str, n: int) -> "EnergyModel":
        try:
            variant = Variant(name)
        except ValueError:
            raise InvalidParameter(f"Unknown energy model {name!r}")
        return cls.kinetic() if variant is Variant.KINETIC else cls.optical(n)


def channel_absorption(ell: int, d: int) -> float:
    """Energy absorbed at distance *d* from one unit sent down a channel of opacity 1/2**ell."""
    if ell < 1 or d < 1:
        raise InvalidParameter(f"Channel and distance must be >= 1, got ell={ell}, d={d}")
    opacity = 0.5 ** ell
    return opacity * (1.0 - opacity) ** (d - 1)


def clear_energy(model: EnergyModel, d: int) -> float:
    """Energy delivered to the cell *d* columns past a collision."""
    if d < 1:
        raise InvalidParameter(f"Distance must be >= 1, got {d}")
    if model.variant is Variant.KINETIC:
        return 1.0 / (d * d)
    return math.fsum(channel_absorption(ell, d) for ell in range(1, model.channel_count + 1))


class Agent(NamedTuple):
    """Unit-mass agent launched down *column* at time *column*, one row per time unit."""

    column: int

    @property
    def launch_time(self) -> int:
        return self.column

    def arrival(self, row: int) -> int:
        return self.launch_time + row


class RowClear(NamedTuple):
    """Clear sent along *row* by the collision at *column*, at *time*.

    Every later cell (row, column + d) of the row gets clear_energy(model, d)
    and is empty from time + d on, whether it holds a block or not.
    """

    time: int
    row: int
    column: int


class KineticGrid:
    """Cells of the grid, their stored energy, and the clears in flight.

    A row is cleared at most once per matvec, so pending clears are kept as
    one RowClear per row: *clear_front* holds the column of the collision
    that cleared each row (n when none), *clear_time* its time.
    """

    def __init__(self, A: BinaryMatrix) -> None:
        if not A.is_square:
            raise DimensionError(f"The grid needs a square matrix, got {A!r}")
        self.n = A.n_rows
        self.original = A.entries
        self.cell_state = A.entries.copy()
        self.budget = math.log2(self.n)
        self.stored_energy = np.full((self.n, self.n), self.budget)
        self.pending_clears: List[RowClear] = []
        self.clear_front = np.full(self.n, self.n, dtype=np.int64)
        self.clear_time = np.zeros(self.n, dtype=np.int64)
        self.cells_cleared = 0
        self.collisions = 0
        self.dirty = False
        # columns[k]: rows holding a block in column k
        self.columns = np.ascontiguousarray(A.entries.T.astype(bool))

    @property
    def is_reset(self) -> bool:
        return not self.pending_clears and not self.dirty

    def schedule_clear(self, event: RowClear) -> None:
        self.pending_clears.append(event)
        if event.column < self.clear_front[event.row]:
            self.clear_front[event.row] = event.column
            self.clear_time[event.row] = event.time
        self.dirty = True

    def schedule_row_clears(self, rows: np.ndarray, column: int, times: np.ndarray) -> None:
        """One RowClear per row of *rows*, none of them cleared yet, for collisions in *column* at *times*."""
        self.pending_clears.extend(map(RowClear, times.tolist(), rows.tolist(), repeat(column)))
        self.clear_front[rows] = column
        self.clear_time[rows] = times
        self.dirty = True

    def completion_times(self, k: int) -> np.ndarray:
        """Time at which the clear of cell (i, k) completes, for every row i with a clear in flight."""
        return self.clear_time + (k - self.clear_front)

    def apply_clears(self) -> None:
        """Complete every pending clear."""
        cleared = np.arange(self.n)[np.newaxis, :] > self.clear_front[:, np.newaxis]
        self.cells_cleared += int(np.count_nonzero(self.cell_state[cleared]))
        self.cell_state[cleared] = 0
        self.pending_clears = []


@lru_cache(maxsize=None)
def _clear_reach(model: EnergyModel, n: int) -> np.ndarray:
    """reach[m]: energy delivered to the m cells following a collision."""
    delivered = [clear_energy(model, d) for d in range(1, n)]
    reach = np.concatenate(([0.0], np.cumsum(delivered)))
    reach.flags.writeable = False
    return reach


@dataclass
class MatvecResult:
    c: BinaryVector
    ledger: CostLedger
    collisions: int
    cells_cleared: int
    clear_energies: List[float] = field(default_factory=list)


def kinetic_matvec(grid: KineticGrid, b_col: BinaryVector, model: EnergyModel) -> MatvecResult:
    """Send the agents of *b_col* down the grid and collect A b.

    Rows never interact, and agent k reaches row i at time i + k, so the
    agents are advanced one launch at a time across all rows at once: each
    row still sees its arrivals in time order. Agents glide through empty
    cells, only cells holding a block are read.
    """
    n = grid.n
    vector = as_binary_vector(b_col, n)
    if not grid.is_reset:
        raise SimulationFault("The grid must be reset before a matrix-vector product")

    reach = _clear_reach(model, n)
    agents = [Agent(k) for k in np.flatnonzero(vector).tolist()]
    rows = np.arange(n)
    cleared_rows = grid.clear_front < n

    c = np.zeros(n, dtype=np.uint8)
    start_cleared = grid.cells_cleared
    start_collisions = grid.collisions
    clear_energies: List[float] = []
    charged = 0.0

    for agent in agents:
        k = agent.column
        blocks = grid.columns[k]

        # The clear of every block this agent reaches in a cleared row must be done by now
        reached = blocks & cleared_rows
        if reached.any():
            late = np.flatnonzero(reached & (grid.completion_times(k) > rows + agent.launch_time))
            if late.size:
                i = int(late[0])
                raise SimulationFault(
                    f"Clear of cell ({i}, {k}) due at {grid.completion_times(k)[i]} "
                    f"is late for the agent at {agent.arrival(i)}"
                )

        found = np.flatnonzero(blocks & ~cleared_rows)
        if not found.size:
            continue
        c[found] = 1
        cleared_rows[found] = True
        grid.stored_energy[found, k] = 0.0
        grid.collisions += found.size
        grid.schedule_row_clears(found, k, found + agent.launch_time)

        energy = float(reach[n - 1 - k])
        clear_energies.extend([energy] * found.size)
        charged += found.size * (energy if model.variant is Variant.KINETIC else model.channel_count)

    # Clears past the last block an agent visits still complete
    grid.apply_clears()
    grid.dirty = grid.dirty or bool(agents)

    collisions = grid.collisions - start_collisions
    sweep = n + max(agent.launch_time for agent in agents) if agents else 0
    ledger = CostLedger()
    ledger.add("agent launch", 0.0, len(agents))
    ledger.add("agent sweep", sweep, 0.0)
    ledger.add("answer register", 0.0, collisions)
    ledger.add("row clear", 0.0, charged)
    ledger.add("velocity adjust", 0.0, collisions)

    return MatvecResult(
        c=c,
        ledger=ledger,
        collisions=collisions,
        cells_cleared=grid.cells_cleared - start_cleared,
        clear_energies=clear_energies,
    )


def reset_grid(grid: KineticGrid) -> CostLedger:
    """Restore every cell and refresh the energy spent at collision sites.

    Cleared blocks slide back in parallel at velocity 1/n (time n, energy
    1/n² each); each collision site gets its log2(n) budget back.
    """
    n = grid.n
    ledger = CostLedger()
    ledger.add("grid reset", n, grid.cells_cleared / (n * n) + grid.collisions * math.log2(n))

    grid.cell_state = grid.original.copy()
    grid.pending_clears = []
    grid.clear_front.fill(n)
    grid.clear_time.fill(0)
    grid.stored_energy.fill(grid.budget)
    grid.cells_cleared = 0
    grid.collisions = 0
    grid.dirty = False
    return ledger


@dataclass
class KineticMatmulResult:
    product: BinaryMatrix
    ledger: CostLedger
    matvecs: List[MatvecResult]


def kinetic_matmul(A: BinaryMatrix, B: BinaryMatrix, model: Union[EnergyModel, str]) -> KineticMatmulResult:
    """Boolean A B, one matvec (and one reset) per column of B."""
    n = check_square_pair(A, B)
    if isinstance(model, str):
        model = EnergyModel.named(model, n)

    grid = KineticGrid(A)
    ledger = CostLedger()
    ledger.add("grid build", n * n, n * n)

    product = np.zeros((n, n), dtype=np.uint8)
    matvecs = []
    for j in range(n):
        result = kinetic_matvec(grid, B.column(j), model)
        product[:, j] = result.c
        ledger.extend(result.ledger)
        ledger.extend(reset_grid(grid))
        matvecs.append(result)

    logging.debug(f"Kinetic matmul n={n} ({model.variant.value}): {sum(r.collisions for r in matvecs)} collisions")
    return KineticMatmulResult(BinaryMatrix(product), ledger, matvecs)
