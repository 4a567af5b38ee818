"""bench standalone | distributed | report"""

import asyncio
from pathlib import Path
from typing import List, Optional

import typer

from deskml_common import configure_cli_logging, get_logger
from deskml_data.data_types import DatasetError
from deskml_dist.dist_types import DistError
from deskml_nn.nn_types import NNError, preset_config
from deskml_tensor.tensor_types import ArchiveError

from .bench_types import SYNTH, BenchError, DistributedBenchConfig, StandaloneBenchConfig, parse_bench_config
from .distributed import bench_distributed
from .report import emit_report
from .standalone import bench_standalone

logger = get_logger("deskml_bench.cli", enable_file_logging=False)

app = typer.Typer(add_completion=False, help="Throughput benchmarks for deskml")

_FAILURES = (BenchError, NNError, DatasetError, DistError, ArchiveError, OSError)


def parse_int_list(value: str) -> List[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"expected comma-separated integers, got {value!r}")


def _fail(command: str, e: Exception) -> None:
    logger.error("Benchmark failed", command=command, error=type(e).__name__, detail=str(e))
    typer.echo(str(e), err=True)
    raise typer.Exit(code=1)


@app.command()
def standalone(
    model: str = typer.Option("mlp", help="mlp or small_cnn"),
    dataset: str = typer.Option(SYNTH, help=".dmlt path, IDX 'images,labels' pair or 'synth'"),
    synth_samples: int = typer.Option(1024, help="Synthetic dataset size"),
    batch_sizes: str = typer.Option("4,8,16,32,64,128,256,512", help="Ascending comma-separated batch sizes"),
    epochs: int = typer.Option(1, help="Epochs per batch size"),
    repeats: int = typer.Option(1, help="Fresh-model runs per batch size"),
    seed: int = typer.Option(0, help="Data order and synthetic data seed"),
    lr: float = typer.Option(0.05, help="Learning rate"),
    momentum: float = typer.Option(0.9, help="Momentum"),
    csv: Optional[Path] = typer.Option(None, help="Write rows here instead of stdout"),
    log_level: Optional[str] = typer.Option(None, help="DEBUG, INFO, WARNING or ERROR"),
    log_config: Optional[Path] = typer.Option(None, help="logging.yaml applied with dictConfig"),
):
    """Samples per second against batch size in a single process."""
    configure_cli_logging(log_level, log_config)
    try:
        config = parse_bench_config(StandaloneBenchConfig, {
            "model": preset_config(model),
            "dataset": dataset,
            "synth_samples": synth_samples,
            "batch_sizes": parse_int_list(batch_sizes),
            "epochs": epochs,
            "repeats": repeats,
            "seed": seed,
            "lr": lr,
            "momentum": momentum,
        })
        frame = asyncio.run(bench_standalone(config))
    except _FAILURES as e:
        _fail("standalone", e)
    _write(frame, csv)


@app.command()
def distributed(
    workers: str = typer.Option("1,2,4,8,16", help="Comma-separated worker counts"),
    regime: str = typer.Option("fixed_global", help="fixed_global or fixed_local"),
    batch: int = typer.Option(64, help="Global batch (fixed_global) or local batch (fixed_local)"),
    steps: int = typer.Option(50, help="Steps per sweep point"),
    warmup_steps: int = typer.Option(1, help="Leading steps left out of the medians"),
    bandwidth_cap: Optional[float] = typer.Option(None, help="Per-link cap in bits/sec"),
    shared_link: bool = typer.Option(False, "--shared-link/--per-link", help="One budget for all links"),
    model: str = typer.Option("mlp", help="mlp or small_cnn"),
    dataset: str = typer.Option(SYNTH, help=".dmlt path, IDX 'images,labels' pair or 'synth'"),
    synth_samples: int = typer.Option(1024, help="Synthetic dataset size"),
    seed: int = typer.Option(0, help="Data order seed"),
    lr: float = typer.Option(0.05, help="Learning rate"),
    momentum: float = typer.Option(0.9, help="Momentum"),
    in_process: bool = typer.Option(False, "--in-process/--processes", help="Workers as tasks or subprocesses"),
    csv: Optional[Path] = typer.Option(None, help="Write rows here instead of stdout"),
    log_level: Optional[str] = typer.Option(None, help="DEBUG, INFO, WARNING or ERROR"),
    log_config: Optional[Path] = typer.Option(None, help="logging.yaml applied with dictConfig"),
):
    """Samples per second against worker count under one batch regime."""
    configure_cli_logging(log_level, log_config)
    try:
        config = parse_bench_config(DistributedBenchConfig, {
            "workers": parse_int_list(workers),
            "regime": regime,
            "batch": batch,
            "steps": steps,
            "warmup_steps": warmup_steps,
            "bandwidth_cap": bandwidth_cap,
            "shared_link": shared_link,
            "model": preset_config(model),
            "dataset": dataset,
            "synth_samples": synth_samples,
            "seed": seed,
            "lr": lr,
            "momentum": momentum,
            "in_process": in_process,
        })
        frame = asyncio.run(bench_distributed(config))
    except _FAILURES as e:
        _fail("distributed", e)
    _write(frame, csv)


@app.command()
def report(
    paths: List[Path] = typer.Argument(..., help="Result CSVs from standalone or distributed sweeps"),
    csv: Optional[Path] = typer.Option(None, help="Also write the summary rows as CSV"),
):
    """Per-sweep medians and scaling ratios."""
    try:
        text = emit_report(paths, csv_out=csv)
    except BenchError as e:
        _fail("report", e)
    typer.echo(text)


def _write(frame, csv: Optional[Path]) -> None:
    if csv:
        frame.to_csv(csv, index=False)
        typer.echo(f"wrote {len(frame)} rows to {csv}")
    else:
        typer.echo(frame.to_csv(index=False), nl=False)


def main():
    app()
