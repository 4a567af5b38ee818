"""
deskml-bench - throughput benchmarks.

Main Components:
- bench_standalone: single-process samples/sec against batch size
- bench_distributed: coordinator + K workers, samples/sec against K per regime
- emit_report: medians and scaling ratios from result CSVs
"""

from .bench_types import *  # noqa: F401,F403
from .bench_types import __all__ as _types_all
from .distributed import bench_distributed, median_step, plan_for_point, reap_workers, spawn_workers, worker_command
from .report import NO_DATA, emit_report, read_results, scaling_ratios
from .standalone import bench_dataset, bench_standalone

__all__ = [
    "bench_standalone",
    "bench_dataset",
    "bench_distributed",
    "plan_for_point",
    "median_step",
    "worker_command",
    "spawn_workers",
    "reap_workers",
    "emit_report",
    "read_results",
    "scaling_ratios",
    "NO_DATA",
] + list(_types_all)
