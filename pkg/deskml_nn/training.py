"""The training loop: one tidy-scoped step, an epoch driver and an accuracy pass"""

from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from deskml_common import get_logger
from deskml_tensor import Tensor, TrackedBackend, kernels, tidy

from .autograd import Variable, functions as F, no_grad
from .layers import Layer
from .optim import Optimizer

logger = get_logger("deskml_nn.training", enable_file_logging=False)

Batch = Tuple[Union[Tensor, Variable], Tensor]


async def compute_loss(model: Layer, images: Union[Tensor, Variable], labels: Tensor) -> Variable:
    logits = await model.c(images)
    return F.softmax_cross_entropy(logits, labels)


async def train_step(model: Layer, optimizer: Optimizer, images: Union[Tensor, Variable], labels: Tensor,
                     backend: Optional[TrackedBackend] = None) -> float:
    """
    forward, loss, zero_grad, backward, step inside one tidy scope.

    Only the model and optimizer are returned from the scope, so every
    intermediate (activations, saved tensors, gradients) is released on exit
    and the live-buffer count is unchanged by the step.
    """

    async def body():
        loss = await compute_loss(model, images, labels)
        optimizer.zero_grad()
        await loss.backward()
        await optimizer.step()
        return model, optimizer, float(loss.item())

    _, _, loss_value = await tidy(body, backend)
    return loss_value


async def train_epoch(model: Layer, optimizer: Optimizer, batches: Iterable[Batch],
                      backend: Optional[TrackedBackend] = None) -> List[float]:
    """Run train_step over every batch; batch tensors are disposed once used. Returns per-step losses."""
    losses = []
    for images, labels in batches:
        try:
            losses.append(await train_step(model, optimizer, images, labels, backend))
        finally:
            _dispose(images, labels)
    if losses:
        logger.debug("Epoch finished", steps=len(losses), last_loss=losses[-1])
    return losses


async def evaluate_accuracy(model: Layer, batches: Iterable[Batch],
                            backend: Optional[TrackedBackend] = None) -> float:
    """Fraction of correctly classified samples; batches are disposed once used"""
    correct = 0
    total = 0
    for images, labels in batches:
        async def body():
            with no_grad():
                logits = await model.c(images)
            predicted = kernels.argmax(logits.data, axis=1)
            return int(np.count_nonzero(predicted.numpy() == labels.numpy()))

        try:
            correct += await tidy(body, backend)
            total += labels.shape[0]
        finally:
            _dispose(images, labels)
    return correct / total if total else 0.0


def _dispose(*items) -> None:
    for item in items:
        tensor = item.data if isinstance(item, Variable) else item
        if isinstance(tensor, Tensor):
            tensor.dispose()
