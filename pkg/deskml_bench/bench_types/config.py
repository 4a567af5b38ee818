"""Sweep configurations and the CSV schemas they produce"""

from typing import Any, List, Mapping, Optional, Type, TypeVar, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from deskml_dist.dist_types import Regime
from deskml_nn.nn_types import ModelConfig

from .errors import InvalidBenchConfigError

STANDALONE_COLUMNS = ["batch_size", "epoch_wall_s", "samples_per_sec"]
DISTRIBUTED_COLUMNS = ["K", "regime", "global_batch", "step_wall_s", "compute_s", "comm_s", "samples_per_sec"]

SYNTH = "synth"


class StandaloneBenchConfig(BaseModel):
    """Single-process throughput against batch size"""

    model: ModelConfig = Field(default_factory=ModelConfig)
    dataset: str = Field(default=SYNTH, description=".dmlt path, IDX 'images,labels' pair or 'synth'")
    synth_samples: int = Field(default=1024, ge=1)
    batch_sizes: List[int] = Field(default_factory=lambda: [4, 8, 16, 32, 64, 128, 256, 512])
    epochs: int = Field(default=1, ge=0)
    repeats: int = Field(default=1, ge=1, description="Fresh-model runs per batch size")
    seed: int = Field(default=0, ge=0)
    lr: float = Field(default=0.05, gt=0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)

    @field_validator("batch_sizes")
    @classmethod
    def _ascending(cls, value):
        if not value or any(b < 1 for b in value):
            raise ValueError(f"batch sizes must be positive, got {value}")
        if any(a >= b for a, b in zip(value, value[1:])):
            raise ValueError(f"batch sizes must be strictly ascending, got {value}")
        return value


class DistributedBenchConfig(BaseModel):
    """Coordinator throughput against worker count under one batch regime"""

    workers: List[int] = Field(default_factory=lambda: [1, 2, 4, 8, 16])
    regime: Regime = Field(default="fixed_global")
    batch: int = Field(default=64, ge=1, description="Global batch (fixed_global) or local batch (fixed_local)")
    steps: int = Field(default=50, ge=1)
    warmup_steps: int = Field(default=1, ge=0, description="Leading steps left out of the medians")
    bandwidth_cap: Optional[float] = Field(default=None, gt=0, description="bits/sec per link")
    shared_link: bool = Field(default=False)
    model: ModelConfig = Field(default_factory=ModelConfig)
    dataset: str = Field(default=SYNTH)
    synth_samples: int = Field(default=1024, ge=1)
    seed: int = Field(default=0, ge=0)
    lr: float = Field(default=0.05, gt=0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    in_process: bool = Field(default=False, description="Run workers as tasks instead of subprocesses")

    @field_validator("workers")
    @classmethod
    def _worker_counts(cls, value):
        if not value or any(k < 1 for k in value):
            raise ValueError(f"worker counts must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def _warmup_below_steps(self):
        if self.warmup_steps >= self.steps:
            raise ValueError(f"warmup_steps {self.warmup_steps} leaves no measured step out of {self.steps}")
        return self


ConfigT = TypeVar("ConfigT", bound=BaseModel)


def parse_bench_config(kind: Type[ConfigT], data: Union[ConfigT, Mapping[str, Any]]) -> ConfigT:
    if isinstance(data, kind):
        return data
    try:
        return kind.model_validate(data)
    except ValidationError as e:
        raise InvalidBenchConfigError(str(e)) from None
