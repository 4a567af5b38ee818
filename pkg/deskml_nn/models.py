"""Model definitions and the config-driven builder"""

from typing import Any, List, Mapping, Sequence, Union

import numpy as np

from deskml_common import get_logger
from deskml_tensor.kernels import conv_output_size

from .autograd import Variable, functions as F
from .layers import Conv2d, Layer, Linear
from .nn_types.config import ModelConfig, parse_model_config

logger = get_logger("deskml_nn.models", enable_file_logging=False)


class MLP(Layer):
    """Fully connected stack l1..ln with relu between layers; inputs are flattened first"""

    def __init__(self, in_features: int, hidden: Sequence[int], classes: int, rng: np.random.Generator):
        super().__init__()
        widths = [in_features, *hidden, classes]
        self.depth = len(widths) - 1
        for i in range(self.depth):
            setattr(self, f"l{i + 1}", Linear(widths[i], widths[i + 1], rng=rng))

    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        (x,) = inputs
        if x.ndim > 2:
            x = F.flatten(x)
        for i in range(self.depth):
            x = await getattr(self, f"l{i + 1}").c(x)
            if i < self.depth - 1:
                x = F.relu(x)
        return [x]


class SmallCNN(Layer):
    """conv(3x3, stride 1) -> relu -> conv(3x3, stride 2) -> relu -> linear head"""

    def __init__(self, in_shape: Sequence[int], channels: Sequence[int], classes: int, rng: np.random.Generator):
        super().__init__()
        c, h, w = in_shape
        c1, c2 = channels
        self.conv1 = Conv2d(c, c1, 3, stride=1, padding=1, rng=rng)
        self.conv2 = Conv2d(c1, c2, 3, stride=2, padding=1, rng=rng)
        oh = conv_output_size(h, 3, 2, 1)
        ow = conv_output_size(w, 3, 2, 1)
        self.fc = Linear(c2 * oh * ow, classes, rng=rng)

    async def forward(self, inputs: List[Variable]) -> List[Variable]:
        (x,) = inputs
        x = F.relu(await self.conv1.c(x))
        x = F.relu(await self.conv2.c(x))
        return [await self.fc.c(F.flatten(x))]


def build_model(cfg: Union[ModelConfig, Mapping[str, Any], str]) -> Layer:
    """
    Instantiate and initialize a model.

    Weights are drawn from one generator seeded with cfg.seed, in parameter
    registration order, so the same config always yields the same bits.

    Raises:
        InvalidConfigError: cfg fails validation
    """
    cfg = parse_model_config(cfg)
    rng = np.random.default_rng(cfg.seed)
    if cfg.arch == "mlp":
        model: Layer = MLP(cfg.in_features, cfg.hidden, cfg.classes, rng)
    else:
        model = SmallCNN(cfg.in_shape, cfg.hidden, cfg.classes, rng)
    logger.debug("Model built", arch=cfg.arch, seed=cfg.seed, parameters=model.parameter_count())
    return model
