"""Stateless word vectorizer and metric-embedding toolkit."""

from retcore._core import (
    WEIGHTS_FORMAT_VERSION,
    Augmenter,
    ConfigError,
    IoError,
    Model,
    NumericError,
    __version__,
    encode_words,
    tokenize,
    train,
)

__all__ = [
    "WEIGHTS_FORMAT_VERSION",
    "Augmenter",
    "ConfigError",
    "IoError",
    "Model",
    "NumericError",
    "__version__",
    "encode_words",
    "tokenize",
    "train",
]
