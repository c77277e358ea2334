"""Exception types shared across the toolchain."""


class ExecAwareError(Exception):
    """Base class for all toolchain errors."""


# --- trace collection and parsing ---

class MalformedTrace(ExecAwareError):
    """A trace document violates the trace file format."""


class CompileFailed(ExecAwareError):
    """A program could not be compiled for tracing."""


class AdapterUnavailable(ExecAwareError):
    """The configured debugger adapter (or its binary) is missing."""


class IncompleteTrace(ExecAwareError):
    """An operation requiring a complete trace was given a partial one."""


# --- aspect extraction ---

class UnbalancedBraces(ExecAwareError):
    """Source program braces do not balance; branch analysis impossible."""


class EmptyInput(ExecAwareError):
    """An aggregate operation received an empty input."""


# --- dataset construction ---

class AspectMismatch(ExecAwareError):
    """Aspects do not belong to the program/test pair being encoded."""


class EmptyProgram(ExecAwareError):
    """A program produced zero tokens under the corpus tokenizer."""


class ProblemMismatch(ExecAwareError):
    """A slow/fast pair does not share a problem id."""


class FormatterUnavailable(ExecAwareError):
    """The configured external formatter command cannot be found."""


class FormatterFailed(ExecAwareError):
    """The external formatter exited nonzero or changed the token stream."""


class NoCompleteTraces(ExecAwareError):
    """No complete trace is available for an execution-aware instance."""


class MissingTraces(ExecAwareError):
    """A dataset strategy requires traces that were never collected."""


class HygieneViolation(ExecAwareError):
    """Split hygiene failed and the build is configured to fail closed."""


# --- benchmarking ---

class CompileError(ExecAwareError):
    """A candidate program failed to compile; carries the diagnostics."""

    def __init__(self, diagnostics: str):
        super().__init__(diagnostics)
        self.diagnostics = diagnostics


class ToolchainMissing(ExecAwareError):
    """The configured compiler is not installed."""


class BackendUnavailable(ExecAwareError):
    """The configured timing backend cannot run."""


class MismatchedCases(ExecAwareError):
    """Per-case time vectors disagree in length or are empty."""


class NonPositiveTime(ExecAwareError):
    """A measured execution time was zero or negative."""


# --- statistics ---

class AllZeroDifferences(ExecAwareError):
    """Every paired difference is zero; signed-rank statistics undefined."""


class AlignmentError(ExecAwareError):
    """Two record sets do not share the same pair ids."""
