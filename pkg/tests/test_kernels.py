"""Parity between the pure-Python kernels and the compiled core."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from execaware._kernels import _pure

try:
    from execaware._kernels import _core
    BACKENDS = [_pure, _core]
except ImportError:
    _core = None
    BACKENDS = [_pure]

ids = ["pure", "compiled"][: len(BACKENDS)]


@pytest.fixture(params=BACKENDS, ids=ids)
def backend(request):
    return request.param


class TestLineCounts:
    def test_basic(self, backend):
        assert backend.line_counts([1, 2, 2, 5, 5, 5]) == {1: 1, 2: 2, 5: 3}

    def test_empty(self, backend):
        assert backend.line_counts([]) == {}

    @given(st.lists(st.integers(1, 500), max_size=300))
    def test_parity(self, line_nos):
        expected = _pure.line_counts(line_nos)
        for impl in BACKENDS:
            assert impl.line_counts(line_nos) == expected


class TestA12Counts:
    def test_worked_example(self, backend):
        assert backend.a12_counts([2, 2, 1], [1, 2, 1]) == (4, 4)

    @given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=40),
           st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=40))
    def test_parity_and_brute_force(self, x, y):
        greater = sum(1 for xi in x for yj in y if xi > yj)
        equal = sum(1 for xi in x for yj in y if xi == yj)
        for impl in BACKENDS:
            assert impl.a12_counts(x, y) == (greater, equal)

    def test_mixed_int_float(self, backend):
        assert backend.a12_counts([1, 2.0, 3], [2, 2.5]) == (2, 1)


class TestSignedRankTail:
    def test_all_positive_tail(self, backend):
        assert backend.signed_rank_tail_count([2, 4, 6, 8, 10], 0) == 1

    def test_full_range(self, backend):
        assert backend.signed_rank_tail_count([2, 4, 6], 12) == 8

    def test_negative_cap(self, backend):
        assert backend.signed_rank_tail_count([2, 4], -1) == 0

    def test_enumeration_parity(self, backend):
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randint(1, 10)
            doubled = sorted(rng.randint(1, 12) * 2 for _ in range(n))
            cap = rng.randint(0, sum(doubled))
            brute = sum(
                1 for mask in range(1 << n)
                if sum(doubled[i] for i in range(n) if mask >> i & 1) <= cap)
            assert backend.signed_rank_tail_count(doubled, cap) == brute

    def test_rejects_oversized_input(self, backend):
        with pytest.raises(ValueError):
            backend.signed_rank_tail_count(list(range(1, 64)), 5)
