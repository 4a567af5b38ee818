#!/usr/bin/env python3
"""Test cases for the coordinator and worker command lines"""

from pathlib import Path

import pytest
from typer.testing import CliRunner

# Add project root to path
project_root = Path(__file__).parent.parent.parent
import sys
sys.path.insert(0, str(project_root))

from deskml_dist.cli import coordinator_app, worker_app


@pytest.fixture
def runner():
    return CliRunner()


class TestCoordinatorCli:
    """Argument and plan errors exit with status 1 before anything listens"""

    @pytest.mark.parametrize("args", [
        ["--global-batch", "2", "--workers", "4"],
        ["--regime", "fixed_local", "--workers", "2"],
        ["--global-batch", "8", "--model", "transformer"],
        ["--global-batch", "8", "--listen", "nowhere"],
    ])
    def test_invalid_arguments(self, runner, args):
        result = runner.invoke(coordinator_app, args)
        assert result.exit_code == 1

    def test_invalid_plan_file(self, runner, temp_dir):
        plan = temp_dir / "plan.yaml"
        plan.write_text("regime: fixed_global\nworkers: 3\nglobal_batch: 1\n", encoding="utf-8")
        result = runner.invoke(coordinator_app, ["--plan", str(plan)])
        assert result.exit_code == 1

    def test_help(self, runner):
        result = runner.invoke(coordinator_app, ["--help"])
        assert result.exit_code == 0
        assert "--bandwidth-cap" in result.output
        assert "--log-config" in result.output


class TestWorkerCli:
    """Worker entry point"""

    def test_bad_address(self, runner):
        result = runner.invoke(worker_app, ["--connect", "no-port-here"])
        assert result.exit_code == 1

    def test_unreachable_coordinator(self, runner, monkeypatch):
        import socket

        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            port = sock.getsockname()[1]
        monkeypatch.setenv("DESKML_CONNECT_RETRIES", "1")
        result = runner.invoke(worker_app, ["--connect", f"127.0.0.1:{port}"])
        assert result.exit_code == 1
