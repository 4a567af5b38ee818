from .config import ARCH_DEFAULTS, Architecture, ModelConfig, parse_model_config, preset_config
from .errors import (
    NNError,
    NonScalarLossError,
    LabelOutOfRangeError,
    MissingGradientError,
    InvalidConfigError,
    NameMismatchError,
    ParameterShapeMismatchError,
)

__all__ = [
    "Architecture",
    "ModelConfig",
    "parse_model_config",
    "preset_config",
    "ARCH_DEFAULTS",
    # Errors
    "NNError",
    "NonScalarLossError",
    "LabelOutOfRangeError",
    "MissingGradientError",
    "InvalidConfigError",
    "NameMismatchError",
    "ParameterShapeMismatchError",
]
