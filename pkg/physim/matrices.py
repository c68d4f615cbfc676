"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
from pathlib import Path
from typing import Any, List, Sequence

import numpy as np

from .exceptions import DimensionError, InvalidParameter, UnsupportedInput


# A 1-D numpy array holding only 0 and 1
BinaryVector = np.ndarray


def as_binary_vector(values: Any, length: int) -> BinaryVector:
    """Validate *values* as a 0/1 vector of *length* entries."""
    vector = np.asarray(values)
    if vector.ndim != 1 or vector.shape[0] != length:
        raise DimensionError(f"Expected a vector of length {length}, got shape {vector.shape}")
    if not np.isin(vector, (0, 1)).all():
        raise InvalidParameter("Vector entries must be 0 or 1")
    return vector.astype(np.uint8)


class BinaryMatrix:
    """Dense row-major 0/1 matrix."""

    def __init__(self, entries: Any) -> None:
        array = np.array(entries)
        if array.ndim != 2 or 0 in array.shape:
            raise DimensionError(f"Expected a non-empty 2-D matrix, got shape {array.shape}")
        if not np.isin(array, (0, 1)).all():
            raise InvalidParameter("Matrix entries must be 0 or 1")
        self.entries = array.astype(np.uint8)
        self.entries.flags.writeable = False

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.n_rows}x{self.n_cols}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    @property
    def n_rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.entries.shape[1])

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def column(self, j: int) -> BinaryVector:
        return self.entries[:, j]

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> "BinaryMatrix":
        return cls(np.ones((n, n), dtype=np.uint8))

    @classmethod
    def zeros(cls, n: int) -> "BinaryMatrix":
        return cls(np.zeros((n, n), dtype=np.uint8))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, p: float = 0.5) -> "BinaryMatrix":
        """i.i.d. Bernoulli(*p*) entries."""
        if not 0 <= p <= 1:
            raise InvalidParameter(f"Density must be in [0, 1], got {p}")
        return cls((rng.random((n, n)) < p).astype(np.uint8))


class IntMatrix:
    """Dense signed integer matrix whose entries fit in *bits* bits of magnitude."""

    def __init__(self, entries: Any, bits: int) -> None:
        array = np.array(entries)
        if array.ndim != 2 or 0 in array.shape:
            raise DimensionError(f"Expected a non-empty 2-D matrix, got shape {array.shape}")
        if not np.issubdtype(array.dtype, np.integer):
            raise InvalidParameter("Matrix entries must be integers")
        if bits < 1:
            raise InvalidParameter(f"Bit width must be >= 1, got {bits}")
        if (np.abs(array.astype(object)) >= 2 ** bits).any():
            raise InvalidParameter(f"Entries do not fit in {bits} bits")
        self.bits = bits
        self.entries = array.astype(np.int64)
        self.entries.flags.writeable = False

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.n_rows}x{self.n_cols} r={self.bits}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    @property
    def n_rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.entries.shape[1])

    def bit_planes(self) -> List[BinaryMatrix]:
        """Binary matrices M_p such that M = sum_p 2**p * M_p."""
        if (self.entries < 0).any():
            raise UnsupportedInput("Bit decomposition of negative entries is not supported")
        return [BinaryMatrix((self.entries >> p) & 1) for p in range(self.bits)]

    @classmethod
    def random(cls, n: int, bits: int, rng: np.random.Generator) -> "IntMatrix":
        """Uniform nonnegative entries in [0, 2**bits)."""
        return cls(rng.integers(0, 2 ** bits, size=(n, n)), bits)


def read_matrix(path: Path) -> np.ndarray:
    """Read a square matrix: first line n, then n lines of n integers."""
    lines = [line.split() for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        raise DimensionError(f"{path} is empty")

    try:
        n = int(lines[0][0])
        rows = [[int(value) for value in line] for line in lines[1:]]
    except ValueError:
        raise InvalidParameter(f"{path} contains a non-integer value")

    if n < 1 or len(rows) != n or any(len(row) != n for row in rows):
        raise DimensionError(f"{path} does not hold a {n}x{n} matrix")
    return np.array(rows, dtype=np.int64)


def write_matrix(path: Path, entries: Sequence[Sequence[int]]) -> None:
    """Write a square matrix in the format understood by read_matrix()."""
    array = np.asarray(entries)
    lines = [str(array.shape[0])]
    lines.extend(" ".join(str(int(value)) for value in row) for row in array)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def integer_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer matrix (or matrix-vector) product, the oracle of the flow machine."""
    return np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)


def check_square_pair(a: Any, b: Any) -> int:
    """Return n when *a* and *b* are both n x n."""
    if a.n_rows != a.n_cols or b.n_rows != b.n_cols:
        raise DimensionError(f"Matrices must be square, got {a!r} and {b!r}")
    if a.n_rows != b.n_rows:
        raise DimensionError(f"Matrix sizes differ: {a!r} and {b!r}")
    return a.n_rows
