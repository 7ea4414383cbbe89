"""Exact-rational set functions on Boolean lattices.

A :class:`SetFn` is a dense table of :class:`~fractions.Fraction` values
over an :class:`~braidfan.lattice.Interval`.  The module provides the
alternating sums over sub-intervals, the level spaces ``Sf(k)`` (functions
annihilated by every alternating sum over an interval of rank ``k + 1``),
the sign condition HC, conformity of tuples, and pointwise maxima.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .lattice import (
    Interval,
    LatticeError,
    enumerate_intervals,
    format_subset,
    is_subset,
    popcount,
    submasks,
    table_guard,
)
from .linalg import rational_rank

MAX_TUPLE = 8


class ConformityError(ValueError):
    """A tuple of set functions is not conforming.

    ``chain`` is a maximal chain of global subsets along which no single
    member attains the pointwise maximum everywhere.
    """

    def __init__(self, message: str, chain: list[int]):
        super().__init__(message)
        self.chain = chain


def _frac(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError("floating point values are not accepted; use Fraction or str")
    return Fraction(v)


class SetFn:
    """Function from an interval ``[X, Y]`` to the rationals.

    ``values[i]`` is the value at ``domain.elements[i]``.
    """

    __slots__ = ("domain", "values")

    def __init__(self, domain: Interval, values: Iterable, allow_large: bool = False):
        table_guard(domain.rank, allow_large)
        vals = tuple(_frac(v) for v in values)
        if len(vals) != domain.size:
            raise LatticeError(
                f"expected {domain.size} values for {domain}, got {len(vals)}"
            )
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("SetFn is immutable")

    @classmethod
    def from_function(cls, domain: Interval, fn: Callable[[int], object]) -> "SetFn":
        return cls(domain, (fn(s) for s in domain.elements))

    @classmethod
    def constant(cls, domain: Interval, c=0) -> "SetFn":
        c = _frac(c)
        return cls(domain, [c] * domain.size)

    @classmethod
    def zero(cls, domain: Interval) -> "SetFn":
        return cls.constant(domain, 0)

    def __call__(self, s: int) -> Fraction:
        return self.values[self.domain.index(s)]

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return zip(self.domain.elements, self.values)

    def _check_same(self, other: "SetFn") -> None:
        if self.domain != other.domain:
            raise LatticeError(f"domain mismatch: {self.domain} vs {other.domain}")

    def __add__(self, other):
        if isinstance(other, SetFn):
            self._check_same(other)
            return SetFn(self.domain, (a + b for a, b in zip(self.values, other.values)))
        c = _frac(other)
        return SetFn(self.domain, (a + c for a in self.values))

    __radd__ = __add__

    def __neg__(self):
        return SetFn(self.domain, (-a for a in self.values))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if not isinstance(c, (int, Rational)):
            return NotImplemented
        c = Fraction(c)
        return SetFn(self.domain, (c * a for a in self.values))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SetFn):
            return NotImplemented
        return self.domain == other.domain and self.values == other.values

    def __hash__(self):
        return hash((self.domain, self.values))

    def __repr__(self):
        body = ", ".join(f"{format_subset(s)}: {v}" for s, v in self.items())
        return f"SetFn({self.domain}; {body})"


@dataclass(frozen=True)
class LevelReport:
    """Smallest ``k`` with ``F`` in ``Sf(k)``.

    ``witness`` is ``(S, T, value)``: the first interval of rank ``k_min``
    (enumeration order) with a nonzero alternating sum; ``None`` iff
    ``k_min == 0``.
    """

    k_min: int
    witness: Optional[tuple[int, int, Fraction]]


# --------------------------------------------------------------------------
# alternating sums and level spaces
# --------------------------------------------------------------------------

def _local_alternating_sum(values: Sequence[Fraction], s: int, t: int) -> Fraction:
    total = Fraction(0)
    for u in submasks(t & ~s):
        v = values[s | u]
        total += -v if popcount(u) & 1 else v
    return total


def alternating_sum(F: SetFn, S: int, T: int) -> Fraction:
    """``sum over S <= Q <= T of (-1)**|Q - S| * F(Q)``."""
    if not is_subset(S, T):
        raise LatticeError(f"{format_subset(S)} is not a subset of {format_subset(T)}")
    if S not in F.domain or T not in F.domain:
        raise LatticeError(f"[{format_subset(S)},{format_subset(T)}] is outside {F.domain}")
    dom = F.domain
    return _local_alternating_sum(F.values, dom.index(S), dom.index(T))


def mobius_coefficients(F: SetFn) -> list[Fraction]:
    """Möbius transform on local indices: ``m(A) = sum_{B <= A} (-1)**|A-B| F(B)``.

    Signs aside, ``m(A)`` is the alternating sum of ``F`` over ``[X, X + A]``.
    """
    m = np.array(F.values, dtype=object)
    n = F.domain.rank
    for i in range(n):
        step = 1 << i
        view = m.reshape(-1, 2, step)
        view[:, 1, :] -= view[:, 0, :]
    return list(m)


def first_nonzero_interval(F: SetFn, r: int) -> Optional[tuple[int, int, Fraction]]:
    """First ``(S, T, value)`` with ``|T - S| = r`` and a nonzero alternating sum."""
    dom = F.domain
    for s, t in enumerate_intervals(dom, r):
        v = _local_alternating_sum(F.values, dom.index(s), dom.index(t))
        if v:
            return s, t, v
    return None


def in_level_space(F: SetFn, k: int) -> bool:
    """Whether every alternating sum over an interval of rank ``k + 1`` vanishes.

    Uses the Möbius transform: the rank-``(k + 1)`` sums all vanish exactly
    when no Möbius coefficient above level ``k`` is nonzero.
    """
    if k < 0:
        raise LatticeError("level must be non-negative")
    if k >= F.domain.rank:
        return True
    m = mobius_coefficients(F)
    return all(v == 0 for a, v in enumerate(m) if popcount(a) > k)


def min_level(F: SetFn) -> LevelReport:
    m = mobius_coefficients(F)
    k = max((popcount(a) for a, v in enumerate(m) if v), default=0)
    if k == 0:
        return LevelReport(0, None)
    witness = first_nonzero_interval(F, k)
    assert witness is not None
    return LevelReport(k, witness)


# --------------------------------------------------------------------------
# supports and sign conditions
# --------------------------------------------------------------------------

def supports(F: SetFn) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    plus = frozenset(s for s, v in F.items() if v > 0)
    minus = frozenset(s for s, v in F.items() if v < 0)
    return plus | minus, plus, minus


def relu_plus(F: SetFn) -> SetFn:
    """``max(0, F)`` pointwise; total, no conformity precondition."""
    zero = Fraction(0)
    return SetFn(F.domain, (v if v > 0 else zero for v in F.values))


_NONE = np.iinfo(np.int64).max


def _min_below(flags: np.ndarray, n: int) -> np.ndarray:
    """For each local mask, the smallest flagged submask (or ``_NONE``)."""
    idx = np.where(flags, np.arange(flags.size, dtype=np.int64), _NONE)
    for i in range(n):
        view = idx.reshape(-1, 2, 1 << i)
        np.minimum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
    return idx


def hc_violation(F: SetFn) -> Optional[tuple[int, int]]:
    """A pair ``S <= T`` with ``F(S) * F(T) < 0``, or ``None`` if ``F`` is in HC.

    Two subset sweeps record, for every element, the smallest strictly
    positive and strictly negative element below it.
    """
    dom = F.domain
    sign = np.array([(v > 0) - (v < 0) for v in F.values], dtype=np.int8)
    pos_below = _min_below(sign > 0, dom.rank)
    neg_below = _min_below(sign < 0, dom.rank)
    bad = ((sign < 0) & (pos_below != _NONE)) | ((sign > 0) & (neg_below != _NONE))
    hits = np.flatnonzero(bad)
    if hits.size == 0:
        return None
    t = int(hits[0])
    s = int(pos_below[t] if sign[t] < 0 else neg_below[t])
    return dom.deposit(s), dom.deposit(t)


def in_hc(F: SetFn) -> bool:
    return hc_violation(F) is None


# --------------------------------------------------------------------------
# conforming tuples
# --------------------------------------------------------------------------

def _check_tuple(fns: Sequence[SetFn]) -> Interval:
    if not fns:
        raise LatticeError("need at least one set function")
    if len(fns) > MAX_TUPLE:
        raise LatticeError(f"tuples of more than {MAX_TUPLE} functions are not supported")
    dom = fns[0].domain
    for g in fns[1:]:
        if g.domain != dom:
            raise LatticeError(f"domain mismatch: {dom} vs {g.domain}")
    return dom


def argmax_masks(fns: Sequence[SetFn]) -> list[int]:
    """Per local index, the bitmask over tuple positions attaining the maximum."""
    _check_tuple(fns)
    out = []
    for vals in zip(*(g.values for g in fns)):
        top = max(vals)
        out.append(sum(1 << j for j, v in enumerate(vals) if v == top))
    return out


def map_conformity_violation(domain: Interval, masks: Sequence[int]) -> Optional[list[int]]:
    """Maximal chain whose masks have empty intersection, or ``None``.

    ``masks[i]`` is a nonempty subset of tuple positions at local index
    ``i``.  Dynamic programming over the lattice tracks every achievable
    running intersection together with a predecessor, so the first empty
    intersection can be traced back to a chain.
    """
    n = domain.rank
    size = 1 << n
    reach: list[dict[int, tuple[int, int]]] = [dict() for _ in range(size)]
    reach[0][masks[0]] = (-1, -1)
    hit = None
    if masks[0] == 0:
        hit = (0, 0)
    for m in range(1, size):
        if hit:
            break
        here = reach[m]
        am = masks[m]
        b = m
        while b:
            low = b & -b
            b ^= low
            prev = m ^ low
            for inter in reach[prev]:
                nxt = inter & am
                if nxt not in here:
                    here[nxt] = (prev, inter)
                    if nxt == 0:
                        hit = (m, 0)
                        break
            if hit:
                break
    if hit is None:
        return None
    chain = []
    node, inter = hit
    while node != -1:
        chain.append(node)
        node, inter = reach[node][inter]
    chain.reverse()
    top = chain[-1]
    for i in range(n):
        if not top >> i & 1:
            top |= 1 << i
            chain.append(top)
    return [domain.deposit(c) for c in chain]


def conformity_violation(fns: Sequence[SetFn]) -> Optional[list[int]]:
    dom = _check_tuple(fns)
    return map_conformity_violation(dom, argmax_masks(fns))


def is_conforming(fns: Sequence[SetFn]) -> bool:
    return conformity_violation(fns) is None


def pointwise_max(fns: Sequence[SetFn], require_conforming: bool = False) -> SetFn:
    dom = _check_tuple(fns)
    if require_conforming:
        chain = conformity_violation(fns)
        if chain is not None:
            raise ConformityError(
                "tuple is not conforming along chain "
                + " < ".join(format_subset(s) for s in chain),
                chain,
            )
    return SetFn(dom, (max(vals) for vals in zip(*(g.values for g in fns))))


# --------------------------------------------------------------------------
# restriction, spans, low support
# --------------------------------------------------------------------------

def restrict(F: SetFn, interval: Interval) -> SetFn:
    if not F.domain.contains_interval(interval):
        raise LatticeError(f"{interval} is not contained in {F.domain}")
    return SetFn(interval, (F(s) for s in interval.elements))


def span_dimension(fns: Sequence[SetFn]) -> int:
    if not fns:
        return 0
    _check_same_domains(fns)
    return rational_rank(g.values for g in fns)


def _check_same_domains(fns: Sequence[SetFn]) -> None:
    dom = fns[0].domain
    for g in fns[1:]:
        if g.domain != dom:
            raise LatticeError(f"domain mismatch: {dom} vs {g.domain}")


def low_support_witnesses(F: SetFn, k: int) -> Optional[dict[str, Optional[int]]]:
    """Low/high-rank support elements for a two-sided ``F``.

    Returns ``None`` when ``F >= 0`` or ``F <= 0``.  Otherwise a dict with
    keys ``X+``, ``X-`` (rank ``<= k``) and ``Y+``, ``Y-`` (rank ``>= n - k``);
    a missing element is reported as ``None``.
    """
    dom = F.domain
    n = dom.rank
    _, plus, minus = supports(F)
    if not plus or not minus:
        return None

    def pick(pool, ok):
        return min((s for s in pool if ok(dom.rank_of(s))), default=None)

    return {
        "X+": pick(plus, lambda r: r <= k),
        "X-": pick(minus, lambda r: r <= k),
        "Y+": pick(plus, lambda r: r >= n - k),
        "Y-": pick(minus, lambda r: r >= n - k),
    }


def check_low_support(F: SetFn, k: int) -> bool:
    if not in_level_space(F, k):
        raise ValueError(f"low-support check requires F in Sf({k})")
    if not in_hc(F):
        raise ValueError("low-support check requires F in HC")
    found = low_support_witnesses(F, k)
    if found is None:
        return True
    return all(v is not None for v in found.values())
