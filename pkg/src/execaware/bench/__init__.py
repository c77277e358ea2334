from .metrics import (
    NON_NEGLIGIBLE_SPEEDUP,
    OPTIMIZED_SPEEDUP,
    EvalRecord,
    MetricsReport,
    aggregate,
    evaluate_pair,
    program_speedup,
)
from .runner import (
    CompilerConfig,
    RunOutcome,
    RunStatus,
    SimulatorBackend,
    TimingBackend,
    WallClockBackend,
    compile_program,
    execute,
    judge_output,
)
