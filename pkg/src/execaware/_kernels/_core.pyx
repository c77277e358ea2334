# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the pure-Python kernels (see _pure.py)."""

from libc.stdlib cimport calloc, free

NAME = "compiled"


def line_counts(list line_nos):
    """Per-line occurrence counts of a step line-number sequence."""
    cdef Py_ssize_t i, n = len(line_nos)
    cdef long line, max_line = 0
    for i in range(n):
        line = line_nos[i]
        if line > max_line:
            max_line = line
        if line < 0:
            raise ValueError("line numbers must be non-negative")
    cdef long long *counts = <long long *> calloc(max_line + 1, sizeof(long long))
    if counts is NULL:
        raise MemoryError()
    try:
        for i in range(n):
            counts[<long> line_nos[i]] += 1
        result = {}
        for line in range(max_line + 1):
            if counts[line]:
                result[line] = counts[line]
        return result
    finally:
        free(counts)


def a12_counts(list x, list y):
    """(#{x_i > y_j}, #{x_i == y_j}) over all cross pairs."""
    cdef list xs = sorted(x)
    cdef list ys = sorted(y)
    cdef Py_ssize_t n = len(xs), m = len(ys)
    cdef Py_ssize_t i, lo = 0, hi = 0
    cdef long long greater = 0, equal = 0
    cdef double xi
    for i in range(n):
        xi = xs[i]
        while lo < m and <double> ys[lo] < xi:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < m and <double> ys[hi] == xi:
            hi += 1
        greater += lo
        equal += hi - lo
    return greater, equal


def signed_rank_tail_count(list doubled_ranks, long long w2_cap):
    """Number of sign assignments whose positive rank sum is <= w2_cap."""
    cdef Py_ssize_t i, n = len(doubled_ranks)
    if n > 62:
        raise ValueError("exact tail counts limited to n <= 62")
    if w2_cap < 0:
        return 0
    cdef long long total = 0
    cdef long rank
    for i in range(n):
        total += <long> doubled_ranks[i]
    if w2_cap >= total:
        return 1 << n
    cdef long long *ways = <long long *> calloc(total + 1, sizeof(long long))
    if ways is NULL:
        raise MemoryError()
    cdef long long s, tail = 0
    try:
        ways[0] = 1
        for i in range(n):
            rank = doubled_ranks[i]
            for s in range(total, rank - 1, -1):
                ways[s] += ways[s - rank]
        for s in range(w2_cap + 1):
            tail += ways[s]
        return tail
    finally:
        free(ways)
