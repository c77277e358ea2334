"""Paired statistical comparison: Wilcoxon signed-rank test,
Vargha-Delaney A12 probability of superiority, and matched-pairs
rank-biserial correlation.

The exact signed-rank p-value is computed from the full null
distribution of the positive rank sum (every sign assignment weighted
equally), identical to brute-force sign enumeration. Zero differences
are removed before ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from ._kernels import a12_counts, signed_rank_tail_count
from .errors import AlignmentError, AllZeroDifferences, EmptyInput

EXACT_MAX_N = 20
ALPHA = 0.05


class Method(str, Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal_approx"
    NO_DIFFERENCE = "no_difference"


@dataclass(frozen=True)
class PairedSample:
    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a paired sample cannot be empty")
        for treatment, baseline in self.pairs:
            if not (math.isfinite(treatment) and math.isfinite(baseline)):
                raise ValueError("paired values must be finite")
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))

    @property
    def differences(self) -> list[float]:
        return [treatment - baseline for treatment, baseline in self.pairs]


@dataclass(frozen=True)
class WilcoxonResult:
    n_nonzero: int
    w_plus: float
    w_minus: float
    p_two_sided: float
    method: Method


@dataclass(frozen=True)
class ComparisonReport:
    n: int
    n_nonzero: int
    w_plus: float
    w_minus: float
    p_two_sided: float
    a12: float
    r: float
    method: Method
    significant: bool
    magnitude: str | None


def _signed_ranks(differences: Sequence[float]) -> tuple[list[float], list[int], list[float]]:
    """Average ranks of |d| for the nonzero differences.

    Returns (nonzero differences, doubled ranks as ints, ranks as floats);
    doubling keeps tie midranks integral for exact counting.
    """
    nonzero = [d for d in differences if d != 0]
    if not nonzero:
        raise AllZeroDifferences("all paired differences are zero")
    order = sorted(range(len(nonzero)), key=lambda i: abs(nonzero[i]))
    doubled = [0] * len(nonzero)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs(nonzero[order[j + 1]]) == abs(nonzero[order[i]]):
            j += 1
        # ranks i+1 .. j+1 share the midrank; doubled midrank = (i+1)+(j+1)
        doubled_rank = (i + 1) + (j + 1)
        for k in range(i, j + 1):
            doubled[order[k]] = doubled_rank
        i = j + 1
    ranks = [d / 2 for d in doubled]
    return nonzero, doubled, ranks


def _exact_two_sided_p(doubled: list[int], w2_low: int) -> float:
    """P(W+ <= low) + P(W+ >= total-low) under the symmetric null."""
    n = len(doubled)
    tail = signed_rank_tail_count(doubled, w2_low)
    return min(1.0, 2.0 * tail / (1 << n))


def _normal_two_sided_p(doubled: list[int], w_plus: float) -> float:
    """Normal approximation with tie-corrected variance, continuity
    correction, and the symmetric Edgeworth kurtosis term (the skew term
    vanishes because the null distribution is symmetric)."""
    n = len(doubled)
    mean = n * (n + 1) / 4
    tie_counts: dict[int, int] = {}
    for d in doubled:
        tie_counts[d] = tie_counts.get(d, 0) + 1
    tie_term = sum(t ** 3 - t for t in tie_counts.values())
    variance = (n * (n + 1) * (2 * n + 1) - tie_term / 2) / 24
    if variance <= 0:
        return 1.0
    w_low = min(w_plus, sum(doubled) / 2 - w_plus)
    z = (w_low + 0.5 - mean) / math.sqrt(variance)
    lower_tail = 0.5 * math.erfc(-z / math.sqrt(2))
    density = math.exp(-z * z / 2) / math.sqrt(2 * math.pi)
    excess_kurtosis = -sum((d / 2) ** 4 for d in doubled) / (8 * variance ** 2)
    lower_tail -= excess_kurtosis / 24 * (z ** 3 - 3 * z) * density
    return max(0.0, min(1.0, 2 * lower_tail))


def wilcoxon_signed_rank(sample: PairedSample) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on a paired sample.

    Exact by full enumeration of the sign distribution for up to 20
    nonzero differences, tie-corrected normal approximation above.
    """
    nonzero, doubled, _ = _signed_ranks(sample.differences)
    w2_plus = sum(dr for d, dr in zip(nonzero, doubled) if d > 0)
    w2_minus = sum(dr for d, dr in zip(nonzero, doubled) if d < 0)
    n = len(nonzero)
    if n <= EXACT_MAX_N:
        p = _exact_two_sided_p(doubled, min(w2_plus, w2_minus))
        method = Method.EXACT
    else:
        p = _normal_two_sided_p(doubled, w2_plus / 2)
        method = Method.NORMAL_APPROX
    return WilcoxonResult(n, w2_plus / 2, w2_minus / 2, p, method)


def vargha_delaney_a12(x: Sequence[float], y: Sequence[float]) -> float:
    """A12 = (#{x_i > y_j} + 0.5 * #{x_i = y_j}) / (|x| * |y|)."""
    if not x or not y:
        raise EmptyInput("both samples must be non-empty")
    greater, equal = a12_counts(list(x), list(y))
    return (greater + 0.5 * equal) / (len(x) * len(y))


def rank_biserial_r(sample: PairedSample) -> float:
    """Matched-pairs rank-biserial correlation (W+ - W-)/(W+ + W-)."""
    nonzero, doubled, _ = _signed_ranks(sample.differences)
    w2_plus = sum(dr for d, dr in zip(nonzero, doubled) if d > 0)
    w2_minus = sum(dr for d, dr in zip(nonzero, doubled) if d < 0)
    return (w2_plus - w2_minus) / (w2_plus + w2_minus)


# A12 magnitude per the standard Vargha-Delaney interpretation, applied
# to the deviation from 0.5 in either direction.
_MAGNITUDE_EDGES = [(0.56, "N"), (0.64, "S"), (0.71, "M")]


def a12_magnitude(a12: float) -> str:
    folded = max(a12, 1.0 - a12)
    for edge, label in _MAGNITUDE_EDGES:
        if folded < edge:
            return label
    return "L"


def compare(treatment: Mapping[str, float], baseline: Mapping[str, float]) -> ComparisonReport:
    """Full paired comparison of two per-pair speedup maps keyed by
    pair_id. Identical samples surface as a no-difference report rather
    than an error."""
    if not treatment or not baseline:
        raise AlignmentError("cannot compare empty record sets")
    if set(treatment) != set(baseline):
        missing = set(treatment) ^ set(baseline)
        raise AlignmentError(f"pair ids do not align; mismatched: {sorted(missing)[:5]}")
    ids = sorted(treatment)
    pairs = tuple((float(treatment[i]), float(baseline[i])) for i in ids)
    sample = PairedSample(pairs)
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    a12 = vargha_delaney_a12(x, y)
    try:
        wilcoxon = wilcoxon_signed_rank(sample)
        r = rank_biserial_r(sample)
    except AllZeroDifferences:
        return ComparisonReport(
            n=len(pairs), n_nonzero=0, w_plus=0.0, w_minus=0.0,
            p_two_sided=1.0, a12=a12, r=0.0,
            method=Method.NO_DIFFERENCE, significant=False, magnitude=None,
        )
    return ComparisonReport(
        n=len(pairs),
        n_nonzero=wilcoxon.n_nonzero,
        w_plus=wilcoxon.w_plus,
        w_minus=wilcoxon.w_minus,
        p_two_sided=wilcoxon.p_two_sided,
        a12=a12,
        r=r,
        method=wilcoxon.method,
        significant=wilcoxon.p_two_sided < ALPHA,
        magnitude=a12_magnitude(a12),
    )
