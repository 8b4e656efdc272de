"""Relation-classifier trainer over harmonized instance files."""

from reltrainer.data import DataError, Instance, parse_instances, write_predictions
from reltrainer.model import PRESETS, RelationClassifier, TrainConfig
from reltrainer.tokenizer import Tokenizer
from reltrainer.train import TrainedModel, load_model, predict, save_model, train

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "Instance",
    "PRESETS",
    "RelationClassifier",
    "Tokenizer",
    "TrainConfig",
    "TrainedModel",
    "load_model",
    "parse_instances",
    "predict",
    "save_model",
    "train",
    "write_predictions",
]
