import math
import warnings

import pytest
from hypothesis import given, strategies as st

from braidfan.lattice import (
    MAX_CHAIN_RANK,
    GuardError,
    Interval,
    LatticeError,
    decompose_by,
    enumerate_intervals,
    enumerate_maximal_chains,
    format_subset,
    from_elements,
    full,
    interval_info,
    masks_of_popcount,
    submasks,
    table_guard,
    to_elements,
)


class TestSubsets:
    def test_round_trip(self):
        assert from_elements([1, 4, 5]) == 0b11001
        assert to_elements(0b11001) == [1, 4, 5]
        assert from_elements([]) == 0

    def test_rejects_zero_label(self):
        with pytest.raises(LatticeError):
            from_elements([0, 1])

    def test_format(self):
        assert format_subset(0) == "{}"
        assert format_subset(from_elements([2, 3])) == "{2,3}"

    @given(st.integers(min_value=0, max_value=(1 << 12) - 1))
    def test_submasks_ascending_and_complete(self, mask):
        subs = list(submasks(mask))
        assert subs == sorted(subs)
        assert len(subs) == 2 ** bin(mask).count("1")
        assert all(s & ~mask == 0 for s in subs)

    @pytest.mark.parametrize("n,r", [(0, 0), (5, 0), (5, 2), (6, 6), (7, 3), (4, 5)])
    def test_masks_of_popcount(self, n, r):
        got = list(masks_of_popcount(n, r))
        want = [m for m in range(1 << n) if bin(m).count("1") == r]
        assert got == want


class TestInterval:
    def test_basic(self):
        I = Interval.of([1], [1, 2, 4])
        assert I.rank == 2 and I.size == 4
        assert I.elements == (0b0001, 0b0011, 0b1001, 0b1011)
        assert from_elements([1, 4]) in I
        assert from_elements([2]) not in I

    def test_index_and_deposit_are_inverse(self):
        I = Interval.of([2], [1, 2, 3, 5, 6])
        for i, s in enumerate(I.elements):
            assert I.index(s) == i
            assert I.deposit(i) == s

    def test_index_outside_raises(self):
        with pytest.raises(LatticeError):
            Interval.of([1], [1, 2]).index(from_elements([2]))

    def test_bottom_not_below_top(self):
        with pytest.raises(LatticeError):
            Interval.of([3], [1, 2])

    def test_full(self):
        assert Interval.boolean(4).is_full
        assert not Interval.of([1], [1, 2]).is_full
        assert Interval.boolean(0).rank == 0

    def test_info(self):
        assert interval_info(Interval.boolean(4)) == (4, 16, [1, 4, 6, 4, 1])

    def test_contains_interval(self):
        big = Interval.boolean(4)
        assert big.contains_interval(Interval.of([1], [1, 3]))
        assert not Interval.of([1], [1, 3]).contains_interval(big)


class TestEnumeration:
    @pytest.mark.parametrize("n", range(0, 6))
    def test_interval_counts(self, n):
        I = Interval.boolean(n)
        for r in range(n + 1):
            got = list(enumerate_intervals(I, r))
            assert len(got) == math.comb(n, r) * 2 ** (n - r)
            assert all(bin(t & ~s).count("1") == r and s & ~t == 0 for s, t in got)
            assert got == sorted(got)
        assert list(enumerate_intervals(I, n + 1)) == []
        assert list(enumerate_intervals(I, -1)) == []

    def test_intervals_on_shifted_lattice(self):
        I = Interval.of([2], [1, 2, 3])
        assert list(enumerate_intervals(I, 2)) == [(0b010, 0b111)]

    @pytest.mark.parametrize("n", range(0, 6))
    def test_chain_counts(self, n):
        I = Interval.of([], range(1, n + 1)) if n else Interval(0, 0)
        chains = list(enumerate_maximal_chains(I))
        assert len(chains) == math.factorial(n)
        assert len({tuple(c) for c in chains}) == len(chains)
        for c in chains:
            assert c[0] == I.X and c[-1] == I.Y and len(c) == n + 1
            assert all(a & ~b == 0 and bin(b & ~a).count("1") == 1 for a, b in zip(c, c[1:]))

    def test_chain_guard(self):
        with pytest.raises(GuardError):
            next(enumerate_maximal_chains(Interval.boolean(MAX_CHAIN_RANK + 1)))

    def test_table_guard(self):
        with pytest.raises(GuardError):
            table_guard(25)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table_guard(25, allow_large=True)
        assert caught

    def test_decompose_partitions(self):
        I = Interval.boolean(4)
        t = from_elements([1, 2, 3])
        parts = decompose_by(I, t)
        assert [(p.X, p.Y) for p in parts] == [(0, 0b0111), (0b1000, 0b1111)]
        covered = sorted(s for p in parts for s in p.elements)
        assert covered == list(range(16))

    def test_decompose_rejects_outside(self):
        with pytest.raises(LatticeError):
            decompose_by(Interval.of([1], [1, 2]), from_elements([1]))
        assert full(3) == 7
