"""Set partitions of qubit registers.

A partition splits the register ``{0, ..., N-1}`` into disjoint parts; qubits
inside one part are treated as mutually entangled, qubits in different parts
as uncorrelated at the state-construction level. Partitions are kept in a
canonical form so they can serve as byte-stable classifier labels: every part
is sorted ascending and parts are ordered by size, ties broken by their
smallest element. Human-facing strings use 1-based indices, e.g.
``[[1],[2,3],[4,5,6]]``; everything internal is 0-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator, Sequence

from .errors import InvalidArgumentError, InvalidIndexError

MAX_REGISTER = 10
MAX_SUBSET = 8


@total_ordering
@dataclass(frozen=True)
class SetPartition:
    """A canonical set partition; hashable and totally ordered."""

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = _canonicalize(self.parts)
        object.__setattr__(self, "parts", canon)

    @classmethod
    def of(cls, *parts: Iterable[int]) -> "SetPartition":
        return cls(tuple(tuple(p) for p in parts))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(q for part in self.parts for q in part))

    @property
    def shape(self) -> tuple[int, ...]:
        """Part sizes, ascending (an integer partition of the register size)."""
        return tuple(sorted(len(p) for p in self.parts))

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(len(p) for p in self.parts)

    def covers_register(self, n_qubits: int) -> bool:
        return self.support == tuple(range(n_qubits))

    def sort_key(self):
        return (self.n_parts, self.shape, self.parts)

    def __lt__(self, other: "SetPartition") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_partition(self)


def _canonicalize(parts: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    cleaned = []
    seen: set[int] = set()
    for part in parts:
        tup = tuple(sorted(int(q) for q in part))
        if not tup:
            raise InvalidArgumentError("empty part in partition")
        if len(set(tup)) != len(tup) or seen & set(tup):
            raise InvalidIndexError(f"duplicate qubit index in partition parts {parts}")
        seen.update(tup)
        cleaned.append(tup)
    if not cleaned:
        raise InvalidArgumentError("partition needs at least one part")
    cleaned.sort(key=lambda p: (len(p), p[0]))
    return tuple(cleaned)


def format_partition(p: SetPartition) -> str:
    """Canonical 1-based string, the label contract for dataset files."""
    return "[" + ",".join("[" + ",".join(str(q + 1) for q in part) + "]" for part in p.parts) + "]"


_PARTITION_RE = re.compile(r"^\[(\[\d+(?:,\d+)*\])(?:,(\[\d+(?:,\d+)*\]))*\]$")


def parse_partition(text: str) -> SetPartition:
    """Inverse of :func:`format_partition`; accepts any valid 1-based partition string."""
    s = text.strip().replace(" ", "")
    if not s.startswith("[[") or not s.endswith("]]"):
        raise InvalidArgumentError(f"not a partition string: {text!r}")
    if _PARTITION_RE.match(s) is None:
        raise InvalidArgumentError(f"not a partition string: {text!r}")
    body = s[1:-1]
    parts = []
    for chunk in re.findall(r"\[([\d,]+)\]", body):
        parts.append(tuple(int(tok) - 1 for tok in chunk.split(",")))
    return SetPartition(tuple(parts))


def _restricted_growth_strings(n: int) -> Iterator[list[int]]:
    """All RGS of length n: a[0]=0 and a[i] <= 1 + max(a[:i])."""
    a = [0] * n
    while True:
        yield a[:]
        # Find the rightmost position that can still be incremented.
        i = n - 1
        while i > 0:
            m = max(a[:i])
            if a[i] <= m:
                break
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0


def partitions_of_set(elements: Sequence[int]) -> list[SetPartition]:
    """All set partitions of the given index set, in deterministic order."""
    elems = tuple(sorted(int(q) for q in elements))
    if len(set(elems)) != len(elems):
        raise InvalidIndexError(f"duplicate elements in {elements}")
    if not 1 <= len(elems) <= MAX_SUBSET:
        raise InvalidArgumentError(f"partitions_of_set supports 1..{MAX_SUBSET} elements, got {len(elems)}")
    out = []
    for rgs in _restricted_growth_strings(len(elems)):
        n_blocks = max(rgs) + 1
        blocks: list[list[int]] = [[] for _ in range(n_blocks)]
        for pos, block in enumerate(rgs):
            blocks[block].append(elems[pos])
        out.append(SetPartition(tuple(tuple(b) for b in blocks)))
    out.sort()
    return out


def all_partitions(n: int) -> list[SetPartition]:
    """Every partition of the register {0,...,n-1}; Bell(n) of them."""
    if not 1 <= n <= MAX_REGISTER:
        raise InvalidArgumentError(f"register size must be 1..{MAX_REGISTER}, got {n}")
    return partitions_of_set(range(n)) if n <= MAX_SUBSET else _all_partitions_large(n)


def _all_partitions_large(n: int) -> list[SetPartition]:
    out = []
    for rgs in _restricted_growth_strings(n):
        n_blocks = max(rgs) + 1
        blocks: list[list[int]] = [[] for _ in range(n_blocks)]
        for pos, block in enumerate(rgs):
            blocks[block].append(pos)
        out.append(SetPartition(tuple(tuple(b) for b in blocks)))
    out.sort()
    return out


def _integer_partitions(n: int) -> list[tuple[int, ...]]:
    """Integer partitions of n as non-decreasing tuples."""

    def rec(remaining: int, minimum: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(minimum, remaining + 1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    return list(rec(n, 1))


def ordered_partitions(n: int) -> list[SetPartition]:
    """One canonical representative per partition shape.

    The representative fills consecutive indices left to right with
    non-decreasing part sizes, e.g. shape (1,2,3) -> [[1],[2,3],[4,5,6]].
    """
    if not 1 <= n <= MAX_REGISTER:
        raise InvalidArgumentError(f"register size must be 1..{MAX_REGISTER}, got {n}")
    out = []
    for shape in _integer_partitions(n):
        parts = []
        cursor = 0
        for size in shape:
            parts.append(tuple(range(cursor, cursor + size)))
            cursor += size
        out.append(SetPartition(tuple(parts)))
    out.sort()
    return out


def bipartitions(part: Sequence[int]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All unordered two-way splits of an index set into nonempty halves.

    The half containing the smallest index comes first, so each split is
    emitted exactly once; there are 2**(m-1) - 1 of them.
    """
    elems = tuple(sorted(int(q) for q in part))
    if len(elems) < 2:
        raise InvalidArgumentError(f"bipartitions need at least 2 elements, got {elems}")
    first, rest = elems[0], elems[1:]
    out = []
    for mask in range(2 ** len(rest) - 1):
        side_a = [first]
        side_b = []
        for pos, q in enumerate(rest):
            (side_a if (mask >> pos) & 1 else side_b).append(q)
        out.append((tuple(side_a), tuple(side_b)))
    return out


def entangled_qubit_count(p: SetPartition) -> int:
    """Total number of qubits sitting in parts of size at least two."""
    return sum(len(part) for part in p.parts if len(part) > 1)
