"""Run plan: regime, batch sizing, optimizer settings and the optional bandwidth cap"""

from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator

from deskml_nn.nn_types import ModelConfig

from .errors import InvalidRunPlanError

Regime = Literal["fixed_global", "fixed_local"]


class RunPlan(BaseModel):
    """One distributed training run"""

    regime: Regime = Field(default="fixed_global", description="Which batch size is held constant as K grows")
    global_batch: Optional[int] = Field(default=None, ge=1, description="Total samples per step (fixed_global)")
    local_batch: Optional[int] = Field(default=None, ge=1, description="Samples per worker per step (fixed_local)")
    workers: int = Field(default=1, ge=1, description="Worker count K")
    steps: int = Field(default=10, ge=0, description="Total optimizer steps")
    lr: float = Field(default=0.05, gt=0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0, description="Seed of the per-epoch sample order")
    bandwidth_cap: Optional[float] = Field(default=None, gt=0, description="bits/sec per link, None for uncapped")
    shared_link: bool = Field(default=False, description="All links draw from one bandwidth budget")
    model: ModelConfig = Field(default_factory=ModelConfig)
    dataset: Optional[str] = Field(default=None, description=".dmlt path or IDX 'images,labels' pair; None for a synthetic set")
    synth_samples: int = Field(default=1024, ge=1, description="Synthetic dataset size when dataset is None")

    @model_validator(mode="after")
    def _regime_batches(self):
        if self.regime == "fixed_global":
            if self.global_batch is None:
                raise ValueError("fixed_global needs global_batch")
            if self.global_batch < self.workers:
                raise ValueError(f"global_batch {self.global_batch} is smaller than workers {self.workers}")
        else:
            if self.local_batch is None:
                raise ValueError("fixed_local needs local_batch")
            expected = self.local_batch * self.workers
            if self.global_batch is not None and self.global_batch != expected:
                raise ValueError(f"fixed_local: global_batch must equal workers x local_batch = {expected}")
        return self

    @property
    def global_batch_size(self) -> int:
        if self.regime == "fixed_local":
            return self.local_batch * self.workers
        return self.global_batch


def parse_run_plan(data: Union[RunPlan, Mapping[str, Any]]) -> RunPlan:
    if isinstance(data, RunPlan):
        return data
    try:
        return RunPlan.model_validate(data)
    except ValidationError as e:
        raise InvalidRunPlanError(str(e)) from None


def load_run_plan(path: Union[str, Path], **overrides: Any) -> RunPlan:
    """Read a YAML run plan; keyword overrides replace file values when not None"""
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise InvalidRunPlanError(f"{path} must contain a mapping")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return parse_run_plan(data)
