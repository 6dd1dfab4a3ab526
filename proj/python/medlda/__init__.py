"""Gibbs max-margin supervised topic models."""

from ._core import (
    Corpus,
    CorpusError,
    Model,
    SnapshotError,
    evaluate,
    load_corpus,
    load_model,
    make_binary_benchmark,
    make_multiclass_benchmark,
    make_multilabel_benchmark,
    make_regression_benchmark,
    parse_svmlight,
    predict,
    train,
    train_test_split,
)

__all__ = [
    "Corpus",
    "CorpusError",
    "Model",
    "SnapshotError",
    "evaluate",
    "load_corpus",
    "load_model",
    "make_binary_benchmark",
    "make_multiclass_benchmark",
    "make_multilabel_benchmark",
    "make_regression_benchmark",
    "parse_svmlight",
    "predict",
    "train",
    "train_test_split",
]
