"""Quantization of concrete execution values into the discrete token
vocabulary: count bins, coverage/branch tokens, and variable-state
buckets/categories.

Token spellings are exact ASCII strings including the angle brackets.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .aspects import BranchClass
from .errors import EmptyInput
from .trace.model import UNASSIGNED, VariableSnapshot

TOKEN_EXEC_ONCE = "<e>"
TOKEN_EXEC_FEW = "<e+>"
TOKEN_EXEC_MANY = "<E>"
TOKEN_EXEC_HOT = "<E+>"
TOKEN_BRANCH_COVERED = "<BC>"
TOKEN_BRANCH_NOT_COVERED = "<BNC>"

CATEGORY_UNKNOWN = "UNK"
CATEGORY_ZERO = "ZERO"
CATEGORY_POSITIVE_REG = "POSITIVE-REG"
CATEGORY_POSITIVE_LARGE = "POSITIVE-LARGE"
CATEGORY_NEGATIVE_REG = "NEGATIVE-REG"
CATEGORY_NEGATIVE_LARGE = "NEGATIVE-LARGE"
CATEGORY_OTHER = "OTHER"


class TypeBucket(str, Enum):
    BASIC_TYPE = "basic_type"
    CLASS = "class"


@dataclass(frozen=True)
class QuantizationScheme:
    """Bin thresholds and bucket rules.

    Count bins: 1 -> <e>, 2..le_mid -> <e+>, le_mid+1..le_high -> <E>,
    above le_high -> <E+>. Unexecuted lines get no token at all.
    """

    le_mid: int = 5
    le_high: int = 20
    magnitude_threshold: float = 1000.0

    def __post_init__(self):
        if not 1 < self.le_mid < self.le_high:
            raise ValueError("need 1 < le_mid < le_high")
        if self.magnitude_threshold <= 0:
            raise ValueError("magnitude_threshold must be positive")

    @classmethod
    def from_file(cls, path: str | Path) -> "QuantizationScheme":
        """Load thresholds from a key=value file (unknown keys rejected)."""
        values: dict[str, float] = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = float(value.strip())
        known = {"le_mid", "le_high", "magnitude_threshold"}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"{path}: unknown scheme keys {sorted(unknown)}")
        return cls(
            le_mid=int(values.get("le_mid", 5)),
            le_high=int(values.get("le_high", 20)),
            magnitude_threshold=values.get("magnitude_threshold", 1000.0),
        )

    def to_file(self, path: str | Path):
        Path(path).write_text(
            f"le_mid = {self.le_mid}\n"
            f"le_high = {self.le_high}\n"
            f"magnitude_threshold = {self.magnitude_threshold:g}\n",
            encoding="utf-8",
        )


DEFAULT_SCHEME = QuantizationScheme()


@dataclass(frozen=True)
class QuantizedVariable:
    name: str
    type_bucket: TypeBucket
    value_category: str


def quantize_le(count: int, scheme: QuantizationScheme = DEFAULT_SCHEME) -> str | None:
    """Count bin token, or None for a line that never executed."""
    if count < 0:
        raise ValueError("execution count cannot be negative")
    if count == 0:
        return None
    if count == 1:
        return TOKEN_EXEC_ONCE
    if count <= scheme.le_mid:
        return TOKEN_EXEC_FEW
    if count <= scheme.le_high:
        return TOKEN_EXEC_MANY
    return TOKEN_EXEC_HOT


def quantize_lc(covered: bool) -> str | None:
    """Coverage re-uses the single-execution token; uncovered stays bare."""
    return TOKEN_EXEC_ONCE if covered else None


def quantize_bc(branch_class: BranchClass) -> str | None:
    if branch_class is BranchClass.COVERED_BRANCH:
        return TOKEN_BRANCH_COVERED
    if branch_class is BranchClass.UNCOVERED_BRANCH:
        return TOKEN_BRANCH_NOT_COVERED
    return None


# Built-in C++ scalar type words; any qualifier/pointer/reference/array
# decoration of these still buckets as basic_type.
_BASIC_WORDS = {
    "void", "bool", "char", "wchar_t", "char8_t", "char16_t", "char32_t",
    "short", "int", "long", "signed", "unsigned", "float", "double",
}
_QUALIFIER_WORDS = {"const", "volatile", "static", "register", "mutable"}
_DECORATION = re.compile(r"[\*&]|\[[0-9]*\]")


def bucket_type(declared_type: str) -> TypeBucket:
    """basic_type for built-in scalars (and their pointer/reference/array
    forms); anything else is a class."""
    text = _DECORATION.sub(" ", declared_type)
    words = [w for w in re.split(r"[\s]+", text) if w]
    meaningful = [w for w in words if w not in _QUALIFIER_WORDS]
    if not meaningful:
        return TypeBucket.CLASS
    if all(w in _BASIC_WORDS for w in meaningful):
        return TypeBucket.BASIC_TYPE
    return TypeBucket.CLASS


def _parse_numeric(value_text: str) -> float | None:
    try:
        value = float(value_text)
    except ValueError:
        return None
    if math.isnan(value) or math.isinf(value):
        return None
    return value


def categorize_value(value_text: str, bucket: TypeBucket,
                     scheme: QuantizationScheme = DEFAULT_SCHEME) -> str:
    if value_text == UNASSIGNED:
        return CATEGORY_UNKNOWN
    if bucket is TypeBucket.CLASS:
        return CATEGORY_OTHER
    value = _parse_numeric(value_text)
    if value is None:
        return CATEGORY_OTHER
    threshold = scheme.magnitude_threshold
    if value == 0:
        return CATEGORY_ZERO
    if value >= threshold:
        return CATEGORY_POSITIVE_LARGE
    if value > 0:
        return CATEGORY_POSITIVE_REG
    if value <= -threshold:
        return CATEGORY_NEGATIVE_LARGE
    return CATEGORY_NEGATIVE_REG


def quantize_variable(snapshot: VariableSnapshot,
                      scheme: QuantizationScheme = DEFAULT_SCHEME) -> QuantizedVariable:
    bucket = bucket_type(snapshot.declared_type)
    return QuantizedVariable(
        name=snapshot.name,
        type_bucket=bucket,
        value_category=categorize_value(snapshot.value, bucket, scheme),
    )


@dataclass(frozen=True)
class CalibratedThresholds:
    """Raw statistics plus their rounded bin edges."""

    raw_mid: float
    raw_high: float
    mid: int
    high: int


def _percentile(sorted_values: list[float], q: float) -> float:
    """Linear interpolation between closest ranks."""
    if not sorted_values:
        raise EmptyInput("no values")
    pos = (len(sorted_values) - 1) * q
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return float(sorted_values[lo])
    frac = pos - lo
    return sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac


def calibrate_le_thresholds(counts: list[int] | list[float],
                            granularity: int = 5) -> CalibratedThresholds:
    """Derive count-bin edges from a corpus of per-line counts.

    raw_high is the outlier bound Q3 + 2.5*IQR, raw_mid the median. The
    rounded edges snap to the granularity: mid up, high down — the pair
    of directions that turns a (4, 23) measurement into (5, 20) bins.
    """
    if not counts:
        raise EmptyInput("no counts to calibrate on")
    if granularity < 1:
        raise ValueError("granularity must be >= 1")
    ordered = sorted(float(c) for c in counts)
    q1 = _percentile(ordered, 0.25)
    q3 = _percentile(ordered, 0.75)
    raw_mid = _percentile(ordered, 0.5)
    raw_high = q3 + 2.5 * (q3 - q1)
    mid = int(math.ceil(raw_mid / granularity)) * granularity
    high = int(math.floor(raw_high / granularity)) * granularity
    return CalibratedThresholds(raw_mid=raw_mid, raw_high=raw_high, mid=mid, high=high)
