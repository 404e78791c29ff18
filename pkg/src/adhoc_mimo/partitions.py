"""Integer partitions and their multiplicity profiles.

Partitions of ``k`` are listed in descending lexicographic order, so for
``k = 4`` the order is ``4, 3+1, 2+2, 2+1+1, 1+1+1+1``.  Indices used by the
``summand``/``multiplicity`` helpers are 1-based to match the usual
h(i, j, k) / g(i, j, k) notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import groupby
from typing import Iterator

__all__ = [
    "Partition",
    "MultiplicityProfile",
    "enumerate_partitions",
    "multiplicity_profile",
    "partitions_with_length",
    "partition_count",
    "summand",
    "num_summands",
    "multiplicity",
    "num_distinct",
]

MAX_K = 64


@dataclass(frozen=True)
class Partition:
    summands: tuple[int, ...]

    def __post_init__(self) -> None:
        s = self.summands
        if any(not isinstance(x, int) or x < 1 for x in s):
            raise ValueError(f"summands must be positive integers: {s}")
        if any(a < b for a, b in zip(s, s[1:])):
            raise ValueError(f"summands must be non-increasing: {s}")

    @property
    def total(self) -> int:
        return sum(self.summands)

    def __len__(self) -> int:
        return len(self.summands)

    def __iter__(self) -> Iterator[int]:
        return iter(self.summands)


@dataclass(frozen=True)
class MultiplicityProfile:
    """Distinct summands (strictly decreasing) paired with repeat counts."""

    entries: tuple[tuple[int, int], ...]

    @property
    def total(self) -> int:
        return sum(s * m for s, m in self.entries)

    def expand(self) -> Partition:
        return Partition(tuple(s for s, m in self.entries for _ in range(m)))

    def __len__(self) -> int:
        return len(self.entries)


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be a non-negative integer, got {k!r}")
    if k > MAX_K:
        raise ValueError(f"partitions of k > {MAX_K} are not supported (got {k})")


def _descending(k: int, largest: int) -> Iterator[tuple[int, ...]]:
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _descending(k - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _partitions(k: int) -> tuple[Partition, ...]:
    return tuple(Partition(s) for s in _descending(k, k))


def enumerate_partitions(k: int) -> list[Partition]:
    """All partitions of ``k`` in descending lexicographic order.

    ``k = 0`` yields a single empty partition.
    """
    _check_k(k)
    return list(_partitions(k))


def multiplicity_profile(p: Partition) -> MultiplicityProfile:
    return MultiplicityProfile(tuple((s, len(list(g))) for s, g in groupby(p.summands)))


def partitions_with_length(p: int, length: int) -> list[Partition]:
    """Partitions of ``p`` with exactly ``length`` summands, in enumeration order."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    return [q for q in enumerate_partitions(p) if len(q) == length]


def partition_count(k: int) -> int:
    _check_k(k)
    return len(_partitions(k))


# 1-based accessors in h/g notation


def summand(i: int, j: int, k: int) -> int:
    """i-th summand of the j-th partition of k."""
    _check_k(k)
    return _partitions(k)[j - 1].summands[i - 1]


def num_summands(j: int, k: int) -> int:
    _check_k(k)
    return len(_partitions(k)[j - 1])


def multiplicity(i: int, j: int, k: int) -> int:
    """Repeat count of the i-th distinct summand of the j-th partition of k."""
    _check_k(k)
    return multiplicity_profile(_partitions(k)[j - 1]).entries[i - 1][1]


def num_distinct(j: int, k: int) -> int:
    _check_k(k)
    return len(multiplicity_profile(_partitions(k)[j - 1]))
