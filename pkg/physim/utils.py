"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import math
from pathlib import Path
from typing import List

from .exceptions import InvalidParameter


def guess_output(path: Path, command: str, n: int, seed: int, fmt: str) -> Path:
    """Guess the report filename from a given *path*.
    A folder gets a file named after the run: "<command>-n<n>-s<seed>.<fmt>".
    A file keeps its name, only the extension follows *fmt*.

    Examples:
        >>> guess_output(Path("/tmp"), "flow", 16, 1, "json")
        PosixPath('/tmp/flow-n16-s1.json')
        >>> guess_output(Path("out/report.txt"), "flow", 16, 1, "csv")
        PosixPath('out/report.csv')
    """
    if path.is_dir():
        return path / f"{command}-n{n}-s{seed}.{fmt}"
    return path.with_suffix(f".{fmt}")


def quantity_fmt(num: float, suffix: str = "") -> str:
    """
    Human readable version of a model quantity (time or energy units).
    Supports:
        - decimal prefixes up to exa
        - negative and positive numbers
        - numbers larger than 1,000 exa
    Examples:
        >>> quantity_fmt(1536)
        '1.5 k'
        >>> quantity_fmt(2_500_000, suffix="E")
        '2.5 ME'
    """
    val = float(num)
    for unit in ("", "k", "M", "G", "T", "P"):
        if abs(val) < 1000.0:
            return f"{val:3.1f} {unit}{suffix}"
        val /= 1000.0
    return f"{val:,.1f} E{suffix}"


def stream_seed(seed: int) -> int:
    """Seed as numpy's generators take it: any integer, wrapped onto [0, 2**64).

    Examples:
        >>> stream_seed(7)
        7
        >>> stream_seed(-1)
        18446744073709551615
    """
    return seed % 2 ** 64


def ceil_log2(n: int) -> int:
    """Smallest L such that 2**L >= *n*, for n >= 1."""
    if n < 1:
        raise InvalidParameter(f"Size must be >= 1, got {n}")
    return (n - 1).bit_length()


def padded_size(n: int) -> int:
    """Leaf count of a complete binary tree with at least *n* leaves."""
    return 1 << ceil_log2(n)


def integral_power(n: int, exponent: float) -> int:
    """ceil(n ** exponent), at least 1.

    Float powers that should land on an integer (4096 ** (2/3)) are snapped
    to it first, so they are not pushed to the next integer by rounding noise.
    """
    value = float(n) ** exponent
    nearest = round(value)
    if math.isclose(value, nearest, rel_tol=1e-9):
        return max(1, int(nearest))
    return max(1, math.ceil(value))


def parse_sizes(text: str) -> List[int]:
    """Parse a comma separated list of instance sizes.

    "a,...,b" is a shorthand for the doubling progression a, 2a, ..., b.

    Examples:
        >>> parse_sizes("8,16,32")
        [8, 16, 32]
        >>> parse_sizes("1024,...,8192")
        [1024, 2048, 4096, 8192]
    """
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if "..." in parts:
        if len(parts) != 3 or parts[1] != "...":
            raise InvalidParameter(f"Bad progression {text!r}, expected 'a,...,b'")
        first, last = int(parts[0]), int(parts[2])
        if first < 1 or last < first:
            raise InvalidParameter(f"Bad progression {text!r}")
        sizes = []
        size = first
        while size <= last:
            sizes.append(size)
            size *= 2
        return sizes

    try:
        sizes = [int(part) for part in parts]
    except ValueError:
        raise InvalidParameter(f"Bad size list {text!r}")
    if not sizes:
        raise InvalidParameter("At least one size is required")
    if any(size < 1 for size in sizes):
        raise InvalidParameter(f"Sizes must be >= 1, got {text!r}")
    if sizes != sorted(set(sizes)):
        raise InvalidParameter(f"Sizes must be distinct and ascending, got {text!r}")
    return sizes
