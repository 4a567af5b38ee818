from .config import (
    DISTRIBUTED_COLUMNS,
    STANDALONE_COLUMNS,
    SYNTH,
    DistributedBenchConfig,
    StandaloneBenchConfig,
    parse_bench_config,
)
from .errors import BenchError, InvalidBenchConfigError, MalformedCSVError

__all__ = [
    "STANDALONE_COLUMNS",
    "DISTRIBUTED_COLUMNS",
    "SYNTH",
    "StandaloneBenchConfig",
    "DistributedBenchConfig",
    "parse_bench_config",
    # Errors
    "BenchError",
    "MalformedCSVError",
    "InvalidBenchConfigError",
]
