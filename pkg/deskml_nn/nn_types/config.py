"""Model configuration"""

from typing import List, Literal, Tuple

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .errors import InvalidConfigError

Architecture = Literal["mlp", "small_cnn"]


class ModelConfig(BaseModel):
    """Fully determines a model's parameters: architecture, widths, input shape, classes and seed"""

    arch: Architecture = Field(default="mlp", description="Model architecture id")
    in_shape: Tuple[int, int, int] = Field(default=(1, 28, 28), description="Input shape [C, H, W]")
    hidden: List[int] = Field(default_factory=lambda: [32],
                              description="mlp: hidden widths; small_cnn: the two conv channel counts")
    classes: int = Field(default=10, ge=2, description="Number of output classes")
    seed: int = Field(default=0, ge=0, description="Initialization seed")

    @field_validator("in_shape")
    @classmethod
    def _positive_shape(cls, value):
        if any(v <= 0 for v in value):
            raise ValueError(f"in_shape extents must be positive, got {list(value)}")
        return value

    @field_validator("hidden")
    @classmethod
    def _positive_widths(cls, value):
        if not value or any(v <= 0 for v in value):
            raise ValueError(f"hidden widths must be a non-empty list of positive integers, got {value}")
        return value

    @model_validator(mode="after")
    def _arch_widths(self):
        if self.arch == "small_cnn" and len(self.hidden) != 2:
            raise ValueError("small_cnn takes exactly two channel counts in hidden")
        return self

    @property
    def in_features(self) -> int:
        c, h, w = self.in_shape
        return c * h * w


def parse_model_config(data) -> ModelConfig:
    """Validate a mapping, JSON string/bytes or ModelConfig; errors become InvalidConfigError"""
    if isinstance(data, ModelConfig):
        return data
    try:
        if isinstance(data, (str, bytes, bytearray)):
            return ModelConfig.model_validate_json(data)
        return ModelConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidConfigError(str(e)) from None


ARCH_DEFAULTS = {
    "mlp": {"hidden": [32]},
    "small_cnn": {"hidden": [8, 16]},
}


def preset_config(arch: str, **overrides) -> ModelConfig:
    """ModelConfig with the architecture's default widths; overrides that are None are ignored"""
    if arch not in ARCH_DEFAULTS:
        raise InvalidConfigError(f"unknown architecture {arch!r}, expected one of {sorted(ARCH_DEFAULTS)}")
    data = {"arch": arch, **ARCH_DEFAULTS[arch]}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return parse_model_config(data)
