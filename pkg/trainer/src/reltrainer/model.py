"""Classifier architecture and training configuration."""

from dataclasses import dataclass

import torch
from torch import nn

# Named architecture presets selectable via TrainConfig.model_name.
PRESETS = {
    "tiny": {"dim": 32, "heads": 2, "layers": 1, "feedforward": 64},
    "small": {"dim": 64, "heads": 4, "layers": 2, "feedforward": 128},
    "base": {"dim": 128, "heads": 4, "layers": 2, "feedforward": 256},
}

DEFAULT_MODEL_NAME = "tiny"

# JSON/flag spelling of each config field.
CONFIG_KEYS = {
    "model_name": "modelName",
    "epochs": "epochs",
    "batch_size": "batchSize",
    "learning_rate": "learningRate",
    "max_sequence_length": "maxSequenceLength",
    "seed": "seed",
}


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run; seed fixes the setup."""

    model_name: str = DEFAULT_MODEL_NAME
    epochs: int = 5
    batch_size: int = 32
    learning_rate: float = 1e-3
    max_sequence_length: int = 128
    seed: int = 13

    def __post_init__(self):
        if self.model_name not in PRESETS:
            raise ValueError(
                f"unknown model name: {self.model_name!r}"
                f" (choose from {', '.join(sorted(PRESETS))})"
            )
        for field in ("epochs", "batch_size", "max_sequence_length"):
            value = getattr(self, field)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{field} must be a positive integer")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an integer")

    def to_json_dict(self):
        return {json_key: getattr(self, field) for field, json_key in CONFIG_KEYS.items()}

    @classmethod
    def from_json_dict(cls, raw):
        unknown = [key for key in raw if key not in CONFIG_KEYS.values()]
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        fields = {
            field: raw[json_key]
            for field, json_key in CONFIG_KEYS.items()
            if json_key in raw
        }
        return cls(**fields)


class RelationClassifier(nn.Module):
    """Transformer encoder with a label head over the sequence-start slot."""

    def __init__(self, vocab_size, num_labels, config):
        super().__init__()
        preset = PRESETS[config.model_name]
        dim = preset["dim"]
        self.token_embedding = nn.Embedding(vocab_size, dim, padding_idx=0)
        self.position_embedding = nn.Embedding(config.max_sequence_length, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim,
            nhead=preset["heads"],
            dim_feedforward=preset["feedforward"],
            dropout=0.1,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=preset["layers"], enable_nested_tensor=False
        )
        self.head = nn.Linear(dim, num_labels)

    def forward(self, token_ids):
        # token_ids: (batch, length), 0 = padding; position 0 is [CLS].
        positions = torch.arange(token_ids.shape[1], device=token_ids.device)
        hidden = self.token_embedding(token_ids) + self.position_embedding(positions)
        padding_mask = token_ids.eq(0)
        encoded = self.encoder(hidden, src_key_padding_mask=padding_mask)
        return self.head(encoded[:, 0])
