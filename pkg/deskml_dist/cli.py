"""coordinator and worker command-line entry points"""

import asyncio
from pathlib import Path
from typing import Optional

import typer

from deskml_common import configure_cli_logging, get_logger
from deskml_data.data_types import DatasetError
from deskml_nn.nn_types import InvalidConfigError, preset_config
from deskml_tensor.tensor_types import ArchiveError

from .coordinator import serve
from .dist_types import DistError, load_run_plan, parse_run_plan
from .worker import parse_address, run_worker

logger = get_logger("deskml_dist.cli", enable_file_logging=False)

coordinator_app = typer.Typer(add_completion=False, help="Parameter-server coordinator")
worker_app = typer.Typer(add_completion=False, help="Training worker")


@coordinator_app.command()
def coordinator(
    listen: str = typer.Option("127.0.0.1:7070", help="host:port to listen on (port 0 picks a free one)"),
    plan: Optional[Path] = typer.Option(None, help="YAML run plan; flags given explicitly override it"),
    regime: Optional[str] = typer.Option(None, help="fixed_global or fixed_local"),
    global_batch: Optional[int] = typer.Option(None, help="Samples per step across all workers"),
    local_batch: Optional[int] = typer.Option(None, help="Samples per worker per step"),
    workers: Optional[int] = typer.Option(None, help="Number of workers K"),
    steps: Optional[int] = typer.Option(None, help="Optimizer steps"),
    lr: Optional[float] = typer.Option(None, help="Learning rate"),
    momentum: Optional[float] = typer.Option(None, help="Momentum"),
    seed: Optional[int] = typer.Option(None, help="Data order seed"),
    bandwidth_cap: Optional[float] = typer.Option(None, help="Per-link cap in bits/sec"),
    shared_link: Optional[bool] = typer.Option(None, "--shared-link/--per-link", help="One budget for all links"),
    model: Optional[str] = typer.Option(None, help="mlp or small_cnn"),
    dataset: Optional[str] = typer.Option(None, help=".dmlt file or IDX 'images,labels' pair; synthetic when omitted"),
    csv: Optional[Path] = typer.Option(None, help="Write per-step timings here"),
    log_level: Optional[str] = typer.Option(None, help="DEBUG, INFO, WARNING or ERROR"),
    log_config: Optional[Path] = typer.Option(None, help="logging.yaml applied with dictConfig"),
):
    """Run a distributed training plan and optionally write the per-step CSV."""
    configure_cli_logging(log_level, log_config)
    overrides = {
        "regime": regime,
        "global_batch": global_batch,
        "local_batch": local_batch,
        "workers": workers,
        "steps": steps,
        "lr": lr,
        "momentum": momentum,
        "seed": seed,
        "bandwidth_cap": bandwidth_cap,
        "shared_link": shared_link,
        "dataset": dataset,
    }
    try:
        if model:
            overrides["model"] = preset_config(model).model_dump()
        run_plan = load_run_plan(plan, **overrides) if plan else parse_run_plan(
            {k: v for k, v in overrides.items() if v is not None})
        host, port = parse_address(listen)
        result = asyncio.run(serve(run_plan, host, port))
    except (DistError, DatasetError, InvalidConfigError, ArchiveError, OSError, ValueError) as e:
        logger.error("Coordinator failed", error=type(e).__name__, detail=str(e))
        typer.echo(str(e), err=True)
        raise typer.Exit(code=1)

    if csv:
        result.write_csv(csv)
    typer.echo(f"completed {result.completed_steps} steps")


@worker_app.command()
def worker(
    connect: str = typer.Option("127.0.0.1:7070", help="Coordinator host:port"),
    name: str = typer.Option("worker", help="Name announced in Join"),
    log_level: Optional[str] = typer.Option(None, help="DEBUG, INFO, WARNING or ERROR"),
    log_config: Optional[Path] = typer.Option(None, help="logging.yaml applied with dictConfig"),
):
    """Join a coordinator and compute gradients until it shuts the session down."""
    configure_cli_logging(log_level, log_config)
    try:
        report = asyncio.run(run_worker(connect, name))
    except (DistError, ArchiveError, OSError, ValueError) as e:
        logger.error("Worker failed", worker=name, error=type(e).__name__, detail=str(e))
        typer.echo(str(e), err=True)
        raise typer.Exit(code=1)
    typer.echo(f"{name}: {report.steps} steps, {report.shutdown_reason}")


def coordinator_main():
    coordinator_app()


def worker_main():
    worker_app()

