from .errors import (
    DistErrorCode,
    DistError,
    ProtocolError,
    FrameTooLargeError,
    UnknownTagError,
    MalformedMessageError,
    VersionMismatchError,
    UnexpectedMessageError,
    ConnectionClosedError,
    WorkerLostError,
    TooManyWorkersError,
    InvalidRunPlanError,
)
from .plan import Regime, RunPlan, load_run_plan, parse_run_plan
from .results import CSV_COLUMNS, RunResult, StepRecord

__all__ = [
    # Errors
    "DistErrorCode",
    "DistError",
    "ProtocolError",
    "FrameTooLargeError",
    "UnknownTagError",
    "MalformedMessageError",
    "VersionMismatchError",
    "UnexpectedMessageError",
    "ConnectionClosedError",
    "WorkerLostError",
    "TooManyWorkersError",
    "InvalidRunPlanError",
    # Plan
    "Regime",
    "RunPlan",
    "parse_run_plan",
    "load_run_plan",
    # Results
    "CSV_COLUMNS",
    "StepRecord",
    "RunResult",
]
