"""Boolean lattices of subsets encoded as bit patterns.

Ground-set element ``i`` (1-based) lives at bit ``i - 1``.  An
:class:`Interval` ``[X, Y]`` is the sublattice of all ``S`` with
``X <= S <= Y``.  Functions on an interval are stored as dense tables
indexed by a *local* index: the bits of ``S - X`` compressed onto the
free positions ``Y - X``.  Compression is monotone, so ascending local
indices enumerate the interval in ascending global bit order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

MAX_RANK = 20
MAX_CHAIN_RANK = 10


class LatticeError(ValueError):
    """Invalid subset, interval, or enumeration argument."""


class GuardError(LatticeError):
    """A size guard refused an enumeration or table that would be too large."""


def from_elements(elements: Iterable[int]) -> int:
    bits = 0
    for e in elements:
        e = int(e)
        if e < 1:
            raise LatticeError(f"ground-set elements are 1-based, got {e}")
        bits |= 1 << (e - 1)
    return bits


def to_elements(bits: int) -> list[int]:
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def full(d: int) -> int:
    return (1 << d) - 1


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def is_subset(s: int, t: int) -> bool:
    return s & ~t == 0


def format_subset(bits: int) -> str:
    """Compact label such as ``{1,2,4}`` (``{}`` for the empty set)."""
    return "{" + ",".join(map(str, to_elements(bits))) + "}"


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` in ascending numeric order."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def masks_of_popcount(n: int, r: int) -> Iterator[int]:
    """All ``n``-bit masks with exactly ``r`` set bits, ascending (Gosper)."""
    if r < 0 or r > n:
        return
    if r == 0:
        yield 0
        return
    m = (1 << r) - 1
    limit = 1 << n
    while m < limit:
        yield m
        c = m & -m
        nxt = m + c
        m = (((nxt ^ m) >> 2) // c) | nxt


def table_guard(rank: int, allow_large: bool = False) -> None:
    """Refuse dense tables beyond ``2**MAX_RANK`` entries unless overridden."""
    if rank > MAX_RANK:
        if not allow_large:
            raise GuardError(
                f"rank {rank} exceeds the default guard of {MAX_RANK} "
                f"({2 ** rank} exact rationals); pass allow_large=True to override"
            )
        warnings.warn(
            f"allocating a table of 2**{rank} exact rationals", ResourceWarning, stacklevel=3
        )


@dataclass(frozen=True)
class Interval:
    """The Boolean lattice ``[X, Y]``; ``X`` must be a subset of ``Y``."""

    X: int
    Y: int
    _positions: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.X < 0 or self.Y < 0:
            raise LatticeError("subsets must be non-negative bit patterns")
        if self.X & ~self.Y:
            raise LatticeError(
                f"interval bottom {format_subset(self.X)} is not contained in "
                f"top {format_subset(self.Y)}"
            )
        free = self.Y & ~self.X
        positions = tuple(i for i in range(free.bit_length()) if free >> i & 1)
        object.__setattr__(self, "_positions", positions)

    @classmethod
    def boolean(cls, d: int) -> "Interval":
        """The full lattice ``[{}, [d]]``."""
        return cls(0, full(d))

    @classmethod
    def of(cls, X: Iterable[int], Y: Iterable[int]) -> "Interval":
        return cls(from_elements(X), from_elements(Y))

    @property
    def free(self) -> int:
        return self.Y & ~self.X

    @property
    def rank(self) -> int:
        return len(self._positions)

    @property
    def size(self) -> int:
        return 1 << self.rank

    @property
    def is_full(self) -> bool:
        """True for ``[{}, [d]]`` with ``d`` = bit length of ``Y``."""
        return self.X == 0 and self.Y == full(self.Y.bit_length())

    def __contains__(self, s: int) -> bool:
        return (self.X & ~s) == 0 and (s & ~self.Y) == 0

    def contains_interval(self, other: "Interval") -> bool:
        return other.X in self and other.Y in self

    def rank_of(self, s: int) -> int:
        return popcount(s) - popcount(self.X)

    def deposit(self, local: int) -> int:
        """Global subset for a local index."""
        s = self.X
        for j, pos in enumerate(self._positions):
            if local >> j & 1:
                s |= 1 << pos
        return s

    def index(self, s: int) -> int:
        """Local index of a global subset (which must lie in the interval)."""
        if s not in self:
            raise LatticeError(f"{format_subset(s)} is not in {self}")
        local = 0
        for j, pos in enumerate(self._positions):
            if s >> pos & 1:
                local |= 1 << j
        return local

    @cached_property
    def elements(self) -> tuple[int, ...]:
        """Global subsets in ascending order; ``elements[i]`` has local index ``i``."""
        return tuple(self.deposit(i) for i in range(self.size))

    def __str__(self) -> str:
        return f"[{format_subset(self.X)},{format_subset(self.Y)}]"


def interval_info(interval: Interval) -> tuple[int, int, list[int]]:
    n = interval.rank
    return n, 1 << n, [math.comb(n, i) for i in range(n + 1)]


def enumerate_intervals(interval: Interval, r: int) -> Iterator[tuple[int, int]]:
    """Pairs ``(S, T)`` in the interval with ``S <= T`` and ``|T - S| = r``.

    Ordered by ``S`` ascending, then ``T`` ascending.  Out-of-range ``r``
    yields nothing.
    """
    n = interval.rank
    if r < 0 or r > n:
        return
    top = (1 << n) - 1
    for s_loc in range(1 << n):
        comp = top & ~s_loc
        sub = Interval(0, comp)
        s = interval.deposit(s_loc)
        for u in masks_of_popcount(sub.rank, r):
            yield s, interval.deposit(s_loc | sub.deposit(u))


def enumerate_maximal_chains(interval: Interval) -> Iterator[list[int]]:
    """Every saturated chain ``X = S_0 < S_1 < ... < S_n = Y``, exactly once."""
    n = interval.rank
    if n > MAX_CHAIN_RANK:
        raise GuardError(
            f"rank {n} has {math.factorial(n)} maximal chains "
            f"(guard is rank <= {MAX_CHAIN_RANK})"
        )
    bits = [1 << p for p in interval._positions]

    def extend(chain: list[int], remaining: list[int]) -> Iterator[list[int]]:
        if not remaining:
            yield list(chain)
            return
        for i, b in enumerate(remaining):
            chain.append(chain[-1] | b)
            yield from extend(chain, remaining[:i] + remaining[i + 1:])
            chain.pop()

    yield from extend([interval.X], bits)


def decompose_by(interval: Interval, t: int) -> list[Interval]:
    """Partition ``[X, Y]`` into the sub-intervals ``[S, S | t]``, ``X <= S <= Y - t``."""
    if t & ~interval.free:
        raise LatticeError(
            f"{format_subset(t)} is not contained in Y \\ X = {format_subset(interval.free)}"
        )
    base = Interval(interval.X, interval.Y & ~t)
    return [Interval(s, s | t) for s in base.elements]
