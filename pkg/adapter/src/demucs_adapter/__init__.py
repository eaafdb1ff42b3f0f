"""Pretrained-model separator behind the vocals/accompaniment file contract."""

from .core import (
    ACCOMPANIMENT_FILENAME,
    DEFAULT_MODEL_NAME,
    EXIT_INPUT,
    EXIT_MODEL,
    EXIT_OK,
    VOCALS_FILENAME,
    AdapterConfig,
    run_adapter,
)
from .wavio import WavFormatError, read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "run_adapter",
    "read_wav",
    "write_wav",
    "WavFormatError",
    "VOCALS_FILENAME",
    "ACCOMPANIMENT_FILENAME",
    "DEFAULT_MODEL_NAME",
    "EXIT_OK",
    "EXIT_INPUT",
    "EXIT_MODEL",
]
