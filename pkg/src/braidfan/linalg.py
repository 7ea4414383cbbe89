"""Exact rank computations over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


def rational_rank(rows: Iterable[Sequence]) -> int:
    """Rank of a matrix given as rows of ints/Fractions, by exact elimination.

    Rows are reduced one at a time against the pivots found so far, so
    memory stays at ``rank x ncols`` no matter how many rows stream in.
    """
    pivots: dict[int, list[Fraction]] = {}
    for raw in rows:
        row = [Fraction(v) for v in raw]
        for col, prow in pivots.items():
            f = row[col]
            if f:
                for j in range(col, len(row)):
                    if prow[j]:
                        row[j] -= f * prow[j]
        lead = next((j for j, v in enumerate(row) if v), None)
        if lead is None:
            continue
        inv = 1 / row[lead]
        row = [v * inv for v in row]
        # keep existing pivot rows reduced in the new pivot column
        for col, prow in pivots.items():
            f = prow[lead]
            if f:
                for j in range(lead, len(row)):
                    if row[j]:
                        prow[j] -= f * row[j]
        pivots[lead] = row
    return len(pivots)
