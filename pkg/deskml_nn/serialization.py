"""Model weights and gradients as tensor archives"""

from pathlib import Path
from typing import Union

from deskml_common import get_logger
from deskml_tensor import TensorArchive, load_archive, save_archive, to_contiguous

from .layers import Layer
from .nn_types.errors import MissingGradientError, NameMismatchError, ParameterShapeMismatchError

logger = get_logger("deskml_nn.serialization", enable_file_logging=False)


def archive_model(model: Layer) -> TensorArchive:
    """Parameter data keyed by dotted name, in enumeration order"""
    return TensorArchive((name, to_contiguous(p.data)) for name, p in model.named_parameters())


def archive_gradients(model: Layer) -> TensorArchive:
    """
    Parameter gradients keyed by the same names as archive_model.

    Raises:
        MissingGradientError: a parameter has no gradient
    """
    archive = TensorArchive()
    for name, p in model.named_parameters():
        if p.grad is None:
            raise MissingGradientError(name)
        archive.add(name, to_contiguous(p.grad))
    return archive


def restore_model(model: Layer, archive: TensorArchive) -> Layer:
    """
    Overwrite parameter data in place from an archive.

    The archive must hold exactly the model's parameter names, in enumeration
    order, with matching shapes and dtypes. Nothing is written unless every
    entry checks out.

    Raises:
        NameMismatchError, ParameterShapeMismatchError
    """
    named = model.named_parameters()
    expected = [n for n, _ in named]
    actual = archive.names()
    if expected != actual:
        missing = [n for n in expected if n not in archive]
        unexpected = [n for n in actual if n not in set(expected)]
        raise NameMismatchError(missing, unexpected, order_differs=not missing and not unexpected)

    for name, p in named:
        t = archive[name]
        if t.shape != p.shape or t.dtype is not p.dtype:
            raise ParameterShapeMismatchError(name, p.shape, t.shape)

    for name, p in named:
        p.data._assign_(archive[name])
    return model


def save_checkpoint(model: Layer, path: Union[str, Path]) -> int:
    """Write the model's parameters to a .dmlt file; returns bytes written"""
    written = save_archive(archive_model(model), path)
    logger.info("Checkpoint saved", path=str(path), bytes=written)
    return written


def load_checkpoint(model: Layer, path: Union[str, Path]) -> Layer:
    archive = load_archive(path)
    try:
        return restore_model(model, archive)
    finally:
        for t in archive.iter_tensors():
            t.dispose()
