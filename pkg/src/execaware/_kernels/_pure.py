"""Pure-Python kernels; the fallback when the compiled core is absent.

Both backends implement the same three functions with identical
semantics; parity is enforced by tests/test_kernels.py.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter

NAME = "pure"


def line_counts(line_nos: list[int]) -> dict[int, int]:
    """Per-line occurrence counts of a step line-number sequence."""
    return dict(Counter(line_nos))


def a12_counts(x: list[float], y: list[float]) -> tuple[int, int]:
    """(#{x_i > y_j}, #{x_i == y_j}) over all cross pairs."""
    ys = sorted(y)
    greater = 0
    equal = 0
    for xi in x:
        lo = bisect_left(ys, xi)
        hi = bisect_right(ys, xi)
        greater += lo
        equal += hi - lo
    return greater, equal


def signed_rank_tail_count(doubled_ranks: list[int], w2_cap: int) -> int:
    """Number of sign assignments whose positive rank sum is <= w2_cap.

    Ranks arrive doubled so midranks from ties stay integral. Counts are
    exact; the caller bounds n so they fit in 64 bits.
    """
    n = len(doubled_ranks)
    if n > 62:
        raise ValueError("exact tail counts limited to n <= 62")
    if w2_cap < 0:
        return 0
    total = sum(doubled_ranks)
    if w2_cap >= total:
        return 1 << n
    ways = [0] * (total + 1)
    ways[0] = 1
    for rank in doubled_ranks:
        for s in range(total, rank - 1, -1):
            ways[s] += ways[s - rank]
    return sum(ways[: w2_cap + 1])
