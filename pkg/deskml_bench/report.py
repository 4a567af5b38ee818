"""Summaries of standalone and distributed result CSVs"""

from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import pandas as pd

from deskml_common import get_logger

from .bench_types import DISTRIBUTED_COLUMNS, STANDALONE_COLUMNS, MalformedCSVError

logger = get_logger("deskml_bench.report", enable_file_logging=False)

NO_DATA = "no data"

PathLike = Union[str, Path]


def read_results(path: PathLike) -> Tuple[str, pd.DataFrame]:
    """
    Load one results CSV and tell which sweep produced it.

    Returns ("standalone" | "distributed", frame). An empty file yields an
    empty standalone frame.

    Raises:
        MalformedCSVError: unreadable file, unknown header or non-numeric timings
    """
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        return "standalone", pd.DataFrame(columns=STANDALONE_COLUMNS)
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MalformedCSVError(path, str(e)) from e

    columns = list(frame.columns)
    if columns == STANDALONE_COLUMNS:
        kind, numeric = "standalone", STANDALONE_COLUMNS
    elif columns == DISTRIBUTED_COLUMNS:
        kind, numeric = "distributed", [c for c in DISTRIBUTED_COLUMNS if c != "regime"]
    else:
        raise MalformedCSVError(path, f"unknown header {columns}")

    for column in numeric:
        try:
            frame[column] = pd.to_numeric(frame[column])
        except (ValueError, TypeError) as e:
            raise MalformedCSVError(path, f"column {column!r}: {e}") from e
    return kind, frame


def summarize_standalone(frame: pd.DataFrame) -> pd.DataFrame:
    """Median epoch time and throughput per batch size"""
    return (frame.groupby("batch_size", as_index=False)[["epoch_wall_s", "samples_per_sec"]]
            .median()
            .sort_values("batch_size", ignore_index=True))


def summarize_distributed(frame: pd.DataFrame) -> pd.DataFrame:
    """Median timings per (regime, K); failed points keep their row with empty timings"""
    measured = ["step_wall_s", "compute_s", "comm_s", "samples_per_sec"]
    return (frame.groupby(["regime", "K", "global_batch"], as_index=False)[measured]
            .median()
            .sort_values(["regime", "K"], ignore_index=True))


def scaling_ratios(summary: pd.DataFrame) -> pd.Series:
    """Per regime: samples/sec at the largest measured K over samples/sec at the smallest"""
    ratios = {}
    for regime, group in summary.dropna(subset=["samples_per_sec"]).groupby("regime"):
        group = group.sort_values("K")
        first, last = group.iloc[0], group.iloc[-1]
        ratios[regime] = last["samples_per_sec"] / first["samples_per_sec"] if first["samples_per_sec"] else float("nan")
    return pd.Series(ratios, name="scaling_ratio", dtype=float)


def emit_report(paths: Iterable[PathLike], csv_out: Optional[PathLike] = None) -> str:
    """
    Summary text for the given result CSVs.

    Standalone and distributed files may be mixed; rows of the same kind are
    pooled before taking medians. With csv_out the summary rows are also
    written as CSV, one file holding the standalone and distributed tables
    one after the other when both are present.
    """
    standalone: List[pd.DataFrame] = []
    distributed: List[pd.DataFrame] = []
    for path in paths:
        kind, frame = read_results(path)
        (standalone if kind == "standalone" else distributed).append(frame)
        logger.debug("Results loaded", path=str(path), kind=kind, rows=len(frame))

    sections = []
    tables = []
    standalone_rows = pd.concat(standalone, ignore_index=True) if standalone else None
    if standalone_rows is not None and not standalone_rows.empty:
        summary = summarize_standalone(standalone_rows)
        tables.append(summary)
        sections.append("standalone (median per batch size)\n" + summary.to_string(index=False))

    distributed_rows = pd.concat(distributed, ignore_index=True) if distributed else None
    if distributed_rows is not None and not distributed_rows.empty:
        summary = summarize_distributed(distributed_rows)
        tables.append(summary)
        lines = []
        for regime, group in summary.groupby("regime", sort=True):
            lines.append(f"distributed {regime} (median per K)\n" + group.to_string(index=False))
        ratios = scaling_ratios(summary)
        for regime, ratio in ratios.items():
            lines.append(f"scaling ratio {regime}: {ratio:.3f}")
        failed = summary[summary["samples_per_sec"].isna()]
        for _, row in failed.iterrows():
            lines.append(f"failed: regime={row['regime']} K={int(row['K'])}")
        sections.append("\n\n".join(lines))

    if csv_out is not None:
        with open(csv_out, "w", encoding="utf-8", newline="") as f:
            for table in tables:
                table.to_csv(f, index=False)

    if not sections:
        return NO_DATA
    return "\n\n".join(sections)
