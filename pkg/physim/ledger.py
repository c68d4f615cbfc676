"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Measurement and fabrication costs are those of a binary-search style
procedure against reference masses/lengths 1, 1/2, 1/4, ...: resolving a
quantity of size b to accuracy eps costs log2(max(1, b)) + log2(1/eps), and
fabricating it costs b + log2(1/eps). Hidden constants are 1, time and
energy are charged equally.
"""
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple

from .exceptions import InvalidParameter


@dataclass(frozen=True)
class CostDelta:
    """A (time, energy) pair in model units."""

    time: float = 0.0
    energy: float = 0.0

    def __add__(self, other: "CostDelta") -> "CostDelta":
        return CostDelta(self.time + other.time, self.energy + other.energy)

    def scaled(self, factor: float) -> "CostDelta":
        return CostDelta(self.time * factor, self.energy * factor)


class LedgerEntry(NamedTuple):
    label: str
    time: float
    energy: float


def _precision_bits(eps: float) -> float:
    if not eps > 0:
        raise InvalidParameter(f"Accuracy must be > 0, got {eps}")
    return max(0.0, -math.log2(eps))


def measure_cost(b: float, eps: float) -> CostDelta:
    """Cost of measuring a quantity of size *b* to accuracy +/- *eps*."""
    if b < 0:
        raise InvalidParameter(f"Quantity must be >= 0, got {b}")
    cost = math.log2(max(1.0, b)) + _precision_bits(eps)
    return CostDelta(cost, cost)


def fabricate_cost(b: float, eps: float) -> CostDelta:
    """Cost of fabricating a component of size *b* to accuracy +/- *eps*."""
    if b < 0:
        raise InvalidParameter(f"Quantity must be >= 0, got {b}")
    cost = b + _precision_bits(eps)
    return CostDelta(cost, cost)


@dataclass
class CostLedger:
    """Ordered, itemized record of model time and energy charged to a run."""

    entries: List[LedgerEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def total_time(self) -> float:
        return math.fsum(entry.time for entry in self.entries)

    @property
    def total_energy(self) -> float:
        return math.fsum(entry.energy for entry in self.entries)

    @property
    def totals(self) -> CostDelta:
        return CostDelta(self.total_time, self.total_energy)

    def add(self, label: str, time: float, energy: float) -> "CostLedger":
        """Append an entry, return the ledger itself."""
        if not (time >= 0 and energy >= 0) or math.isinf(time) or math.isinf(energy):
            raise InvalidParameter(f"Ledger entry {label!r} must be finite and >= 0, got ({time}, {energy})")
        self.entries.append(LedgerEntry(label, float(time), float(energy)))
        return self

    def charge(self, label: str, delta: CostDelta, count: float = 1) -> "CostLedger":
        """Append *count* times *delta* under a single *label*."""
        return self.add(label, delta.time * count, delta.energy * count)

    def merge(self, other: "CostLedger") -> "CostLedger":
        """New ledger holding the entries of both, self first."""
        return CostLedger(self.entries + other.entries)

    def extend(self, other: "CostLedger") -> "CostLedger":
        """Append the entries of *other* in place, return the ledger itself."""
        self.entries.extend(other.entries)
        return self

    def breakdown(self) -> Dict[str, CostDelta]:
        """Totals per label, in first-seen order."""
        times: Dict[str, List[float]] = OrderedDict()
        energies: Dict[str, List[float]] = OrderedDict()
        for entry in self.entries:
            times.setdefault(entry.label, []).append(entry.time)
            energies.setdefault(entry.label, []).append(entry.energy)
        return OrderedDict(
            (label, CostDelta(math.fsum(times[label]), math.fsum(energies[label]))) for label in times
        )
