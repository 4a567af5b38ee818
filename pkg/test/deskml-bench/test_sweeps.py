#!/usr/bin/env python3
"""Test cases for the standalone and distributed sweeps"""

import math
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from deskml_bench import (
    DISTRIBUTED_COLUMNS,
    STANDALONE_COLUMNS,
    DistributedBenchConfig,
    InvalidBenchConfigError,
    bench_distributed,
    bench_standalone,
    median_step,
    parse_bench_config,
    plan_for_point,
    worker_command,
)
from deskml_dist import StepRecord

TINY_MLP = {"arch": "mlp", "in_shape": [1, 4, 4], "hidden": [8], "classes": 4}


def record(step: int, wall_ms: float, compute_ms: float = 0.0) -> StepRecord:
    return StepRecord(step=step, wall_ms=wall_ms, compute_ms=compute_ms, comm_ms=wall_ms - compute_ms,
                      samples=8, samples_per_sec=8000.0 / wall_ms, bytes_down=0, bytes_up=0)


class TestStandalone:
    """Samples/sec against batch size"""

    @pytest.mark.asyncio
    async def test_zero_epochs_gives_header_only(self, backend):
        frame = await bench_standalone({"model": TINY_MLP, "batch_sizes": [4], "epochs": 0, "synth_samples": 8},
                                       backend=backend)
        assert list(frame.columns) == STANDALONE_COLUMNS
        assert frame.empty

    @pytest.mark.asyncio
    async def test_rows_per_batch_size_and_epoch(self, backend):
        config = {"model": TINY_MLP, "batch_sizes": [4, 16], "epochs": 2, "synth_samples": 64}
        frame = await bench_standalone(config, backend=backend)
        assert frame["batch_size"].tolist() == [4, 4, 16, 16]
        assert (frame["epoch_wall_s"] > 0).all()
        for _, row in frame.iterrows():
            assert row["samples_per_sec"] == pytest.approx(64 / row["epoch_wall_s"])
        assert backend.live_count == 0

    @pytest.mark.parametrize("data", [
        {"batch_sizes": [8, 4]},
        {"batch_sizes": []},
        {"batch_sizes": [0, 4]},
        {"epochs": -1},
    ])
    def test_invalid_config(self, data):
        from deskml_bench import StandaloneBenchConfig

        with pytest.raises(InvalidBenchConfigError):
            parse_bench_config(StandaloneBenchConfig, data)


class TestDistributed:
    """Samples/sec against worker count"""

    @pytest.mark.asyncio
    async def test_in_process_sweep(self, backend):
        config = {"workers": [1, 2], "batch": 8, "steps": 3, "warmup_steps": 1, "model": TINY_MLP,
                  "synth_samples": 64, "in_process": True}
        frame = await bench_distributed(config, backend=backend)
        assert list(frame.columns) == DISTRIBUTED_COLUMNS
        assert frame["K"].tolist() == [1, 2]
        assert frame["global_batch"].tolist() == [8, 8]
        assert (frame["regime"] == "fixed_global").all()
        for _, row in frame.iterrows():
            assert row["compute_s"] + row["comm_s"] <= row["step_wall_s"] + 1e-9
            assert row["samples_per_sec"] == pytest.approx(8 / row["step_wall_s"])

    @pytest.mark.asyncio
    async def test_fixed_local_grows_global_batch(self, backend):
        config = {"workers": [1, 2], "regime": "fixed_local", "batch": 4, "steps": 2, "model": TINY_MLP,
                  "synth_samples": 64, "in_process": True}
        frame = await bench_distributed(config, backend=backend)
        assert frame["global_batch"].tolist() == [4, 8]

    @pytest.mark.asyncio
    async def test_failed_point_is_kept_empty(self, backend):
        config = {"workers": [1, 4], "batch": 2, "steps": 2, "model": TINY_MLP, "synth_samples": 16,
                  "in_process": True}
        frame = await bench_distributed(config, backend=backend)
        assert frame["K"].tolist() == [1, 4]
        ok, failed = frame.iloc[0], frame.iloc[1]
        assert not math.isnan(ok["samples_per_sec"])
        assert failed["global_batch"] == 2
        for column in ("step_wall_s", "compute_s", "comm_s", "samples_per_sec"):
            assert math.isnan(failed[column])

    def test_warmup_must_leave_steps(self):
        with pytest.raises(InvalidBenchConfigError):
            parse_bench_config(DistributedBenchConfig, {"steps": 2, "warmup_steps": 2})
        with pytest.raises(InvalidBenchConfigError):
            parse_bench_config(DistributedBenchConfig, {"workers": [0]})

    def test_plan_for_point(self):
        config = DistributedBenchConfig(regime="fixed_local", batch=16, steps=5, bandwidth_cap=1e8,
                                        model=TINY_MLP)
        plan = plan_for_point(config, 4)
        assert plan.local_batch == 16
        assert plan.global_batch_size == 64
        assert plan.bandwidth_cap == 1e8
        assert plan.dataset is None

    def test_median_step(self):
        records = [record(0, 900.0), record(1, 100.0), record(2, 300.0), record(3, 200.0)]
        assert median_step(records, warmup_steps=1).step == 3
        assert median_step(records[1:3]).step == 1
        assert median_step(records, warmup_steps=10).step == 3
        with pytest.raises(ValueError):
            median_step([])

    def test_worker_command(self):
        command = worker_command(7070, "worker-3")
        assert command[0] == sys.executable
        assert command[1:] == ["-m", "deskml_dist", "worker", "--connect", "127.0.0.1:7070", "--name", "worker-3"]


@pytest.mark.benchmark
class TestThroughputTrends:
    """Wall-clock trends; deselected by default"""

    CNN = {"arch": "small_cnn", "in_shape": [1, 28, 28], "hidden": [8, 16], "classes": 10}

    @pytest.mark.asyncio
    async def test_standalone_throughput_grows_with_batch(self, backend):
        config = {"model": self.CNN, "batch_sizes": [4, 16, 64], "epochs": 1, "repeats": 3, "synth_samples": 1024}
        frame = await bench_standalone(config, backend=backend)
        medians = frame.groupby("batch_size")["samples_per_sec"].median()
        assert medians[4] < medians[16] < medians[64]

    @pytest.mark.asyncio
    async def test_fixed_local_throughput_does_not_fall_with_workers(self, backend):
        config = {"workers": [1, 2, 4, 8], "regime": "fixed_local", "batch": 32, "steps": 6, "warmup_steps": 1,
                  "model": {"arch": "mlp", "in_shape": [1, 28, 28], "hidden": [128], "classes": 10},
                  "synth_samples": 640, "in_process": True}
        frame = await bench_distributed(config, backend=backend)
        throughput = frame.set_index("K")["samples_per_sec"]
        for smaller, larger in [(1, 2), (2, 4), (4, 8)]:
            assert throughput[larger] >= 0.85 * throughput[smaller]
        assert throughput[8] < 2 * throughput[4]

    @pytest.mark.asyncio
    async def test_one_worker_close_to_standalone(self, backend):
        model = {"arch": "mlp", "in_shape": [1, 28, 28], "hidden": [128], "classes": 10}
        standalone = await bench_standalone({"model": model, "batch_sizes": [64], "epochs": 1, "repeats": 3,
                                             "synth_samples": 640}, backend=backend)
        distributed = await bench_distributed({"workers": [1], "batch": 64, "steps": 10, "warmup_steps": 1,
                                               "model": model, "synth_samples": 640, "in_process": True},
                                              backend=backend)
        standalone_rate = standalone["samples_per_sec"].median()
        assert distributed["samples_per_sec"].iloc[0] >= standalone_rate / 2

    @pytest.mark.asyncio
    async def test_capped_link_fixed_global_stops_scaling(self, backend):
        config = {"workers": [1, 2, 4], "batch": 64, "steps": 6, "warmup_steps": 1,
                  "model": {"arch": "mlp", "in_shape": [1, 28, 28], "hidden": [256], "classes": 10},
                  "bandwidth_cap": 1e8, "shared_link": True, "synth_samples": 640, "in_process": True}
        frame = await bench_distributed(config, backend=backend)
        throughput = frame.set_index("K")["samples_per_sec"]
        comm_share = (frame["comm_s"] / frame["step_wall_s"]).tolist()
        assert throughput[4] < throughput[1]
        assert comm_share[-1] > comm_share[0]
