"""CPWL functions compatible with the braid fan, and their set-function images.

A braid-compatible function is written in the basis of the functions
``sigma_M(x) = max_{i in M} x_i`` plus a constant.  ``phi`` records its
values at the indicator vectors ``1_S``; ``phi_inverse`` recovers the
coefficients by Möbius inversion; ``evaluate_setfn`` interpolates a set
function linearly on each cone ``x_{j1} >= ... >= x_{jd}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lattice import Interval, LatticeError, from_elements, full, popcount, to_elements
from .setfn import SetFn, _frac

RationalPoint = tuple[Fraction, ...]


def point(coords: Iterable) -> RationalPoint:
    return tuple(_frac(c) for c in coords)


def _term_order(item: tuple[int, Fraction]) -> tuple[int, list[int]]:
    return popcount(item[0]), to_elements(item[0])


@dataclass(frozen=True)
class PwlExpr:
    """``constant + sum of coeff * sigma_M`` over nonempty ``M`` in ``[d]``.

    ``terms`` is a canonical tuple of ``(M, coeff)`` pairs: no zero
    coefficients, sorted by ``(|M|, elements of M)``.
    """

    d: int
    terms: tuple[tuple[int, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    @classmethod
    def build(cls, d: int, terms: Mapping[int, object] | Iterable[tuple[int, object]] = (),
              constant=0) -> "PwlExpr":
        if d < 0:
            raise LatticeError("dimension must be non-negative")
        acc: dict[int, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for m, c in items:
            if m == 0:
                raise LatticeError("sigma of the empty set is undefined; use the constant")
            if m & ~full(d):
                raise LatticeError(f"term {to_elements(m)} is outside [1..{d}]")
            acc[m] = acc.get(m, Fraction(0)) + _frac(c)
        kept = sorted(((m, c) for m, c in acc.items() if c), key=_term_order)
        return cls(d, tuple(kept), _frac(constant))

    @classmethod
    def sigma(cls, d: int, elements: Iterable[int], coeff=1) -> "PwlExpr":
        return cls.build(d, {from_elements(elements): coeff})

    @classmethod
    def const(cls, d: int, c) -> "PwlExpr":
        return cls.build(d, (), c)

    def coeffs(self) -> dict[int, Fraction]:
        return dict(self.terms)

    @property
    def lineality_slope(self) -> Fraction:
        """Rate of change along ``(1, ..., 1)``: the sum of all term coefficients."""
        return sum((c for _, c in self.terms), Fraction(0))

    def _combine(self, other: "PwlExpr", sign: int) -> "PwlExpr":
        if self.d != other.d:
            raise LatticeError(f"dimension mismatch: {self.d} vs {other.d}")
        merged = list(self.terms) + [(m, sign * c) for m, c in other.terms]
        return PwlExpr.build(self.d, merged, self.constant + sign * other.constant)

    def __add__(self, other: "PwlExpr") -> "PwlExpr":
        return self._combine(other, 1)

    def __sub__(self, other: "PwlExpr") -> "PwlExpr":
        return self._combine(other, -1)

    def __mul__(self, c) -> "PwlExpr":
        c = _frac(c)
        return PwlExpr.build(self.d, [(m, c * v) for m, v in self.terms], c * self.constant)

    __rmul__ = __mul__

    def __neg__(self) -> "PwlExpr":
        return self * -1

    def __str__(self) -> str:
        parts = [str(self.constant)] if self.constant or not self.terms else []
        for m, c in self.terms:
            label = "sigma_{" + ",".join(map(str, to_elements(m))) + "}"
            parts.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(parts)


def _subset_zeta(table: np.ndarray, n: int) -> np.ndarray:
    """``out[U] = sum of table[M] over M <= U`` (in place on a copy)."""
    out = table.copy()
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return out


def _subset_mobius(table: np.ndarray, n: int) -> np.ndarray:
    out = table.copy()
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]
    return out


def phi(f: PwlExpr) -> SetFn:
    """Set function ``S -> f(1_S) = constant + sum of coeffs of M meeting S``.

    Computed by a subset-sum transform: the coefficients of terms inside the
    complement of ``S`` are exactly the ones missing from ``F(S)``.
    """
    d = f.d
    size = 1 << d
    lam = np.full(size, Fraction(0), dtype=object)
    for m, c in f.terms:
        lam[m] = c
    inside = _subset_zeta(lam, d)
    total = f.lineality_slope
    top = size - 1
    return SetFn(Interval.boolean(d), (f.constant + total - inside[top ^ s] for s in range(size)))


def phi_naive(f: PwlExpr) -> SetFn:
    """Reference implementation of :func:`phi` by direct summation."""
    return SetFn.from_function(
        Interval.boolean(f.d),
        lambda s: f.constant + sum((c for m, c in f.terms if m & s), Fraction(0)),
    )


def _require_full(F: SetFn) -> int:
    if not F.domain.is_full and not (F.domain.X == 0 and F.domain.Y == 0):
        raise LatticeError(f"expected a set function on [{{}}, [d]], got {F.domain}")
    return F.domain.rank


def phi_inverse(F: SetFn) -> PwlExpr:
    """Coefficients by Möbius inversion; the constant is ``F({})``.

    For nonempty ``M`` the coefficient is minus the alternating sum of ``F``
    over ``[[d] - M, [d]]``.
    """
    d = _require_full(F)
    size = 1 << d
    top = size - 1
    flipped = np.array([F.values[top ^ u] for u in range(size)], dtype=object)
    mob = _subset_mobius(flipped, d)
    return PwlExpr.build(d, {m: -mob[m] for m in range(1, size)}, F.values[0])


def evaluate_setfn(F: SetFn, x: Sequence) -> Fraction:
    """Value at ``x`` of the braid-compatible interpolant of ``F``.

    Coordinates are sorted descending (ties by ascending label) into
    ``j1, ..., jd`` with prefixes ``S_i``; the result is
    ``F({}) + sum_i (x_ji - x_j(i+1)) (F(S_i) - F({})) + x_jd (F([d]) - F({}))``.
    """
    d = _require_full(F)
    x = point(x)
    if len(x) != d:
        raise LatticeError(f"point has {len(x)} coordinates, expected {d}")
    if d == 0:
        return F.values[0]
    order = sorted(range(d), key=lambda i: (-x[i], i))
    base = F.values[0]
    total = base
    prefix = 0
    for pos, j in enumerate(order):
        prefix |= 1 << j
        nxt = x[order[pos + 1]] if pos + 1 < d else Fraction(0)
        gap = x[j] - nxt
        if gap:
            total += gap * (F.values[prefix] - base)
    return total


def eval_direct(f: PwlExpr, x: Sequence) -> Fraction:
    """``constant + sum of coeff * max_{i in M} x_i``."""
    x = point(x)
    if len(x) != f.d:
        raise LatticeError(f"point has {len(x)} coordinates, expected {f.d}")
    total = f.constant
    for m, c in f.terms:
        total += c * max(x[i - 1] for i in to_elements(m))
    return total


def change_fan(f: PwlExpr, direction: str, slope=1) -> PwlExpr:
    """Move between the fan with lineality (``B_d``) and the pinned fan ``B0_{d-1}``.

    Functions for ``B0_{d-1}`` are carried as ``d``-variable expressions
    read with ``x_d = 0``.

    ``project`` pins ``x_d = 0`` and returns the representative with zero
    lineality slope (it differs from ``f`` by a multiple of ``sigma_{d}``).
    ``embed`` composes with ``x -> (x_1 - x_d, ..., x_{d-1} - x_d, 0)`` and
    adds ``slope * sigma_{d}``; the default ``slope=1`` turns
    ``max(0, x_1, ..., x_{d-1})`` into ``max(x_1, ..., x_d)``.
    """
    d = f.d
    if d < 2:
        raise LatticeError("changing fans needs d >= 2")
    last = {1 << (d - 1): 1}
    if direction == "project":
        return f - PwlExpr.build(d, last) * f.lineality_slope
    if direction == "embed":
        # f(x - x_d * 1) = f(x) - slope(f) * x_d on the braid fan
        return f + PwlExpr.build(d, last) * (_frac(slope) - f.lineality_slope)
    raise LatticeError(f"unknown direction {direction!r}; use 'embed' or 'project'")
