from .build import (
    SEP,
    FilterReport,
    HygieneReport,
    S3Selection,
    annotate_slow_code,
    aspect_tokens,
    build_exec_pretrain,
    build_mlm,
    build_optimize,
    canonicalize,
    cap_per_problem,
    check_split_hygiene,
    derive_seed,
    filter_by_token_limit,
    interleave,
    select_trace_for_s3,
    strip_annotations,
    strip_comments,
    unmask_tokens,
    variable_state_lines,
)
from .io import (
    Aspect,
    CandidateRecord,
    DatasetInstance,
    InstanceMeta,
    Strategy,
    Task,
    instance_from_json,
    instance_to_json,
    read_candidates,
    read_instances,
    write_candidates,
    write_instances,
)
from .tokens import SplitTokenCounter, SubprocessTokenCounter, TokenCounter, split_tokens
