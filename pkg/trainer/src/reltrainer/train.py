"""Training loop, artifact persistence, and batch prediction."""

import json
import os
from dataclasses import dataclass

import torch
from torch import nn

from reltrainer.model import RelationClassifier, TrainConfig
from reltrainer.tokenizer import Tokenizer

MODEL_FILE = "model.pt"
VOCAB_FILE = "vocab.json"
LABELS_FILE = "labels.json"
CONFIG_FILE = "config.json"


@dataclass(frozen=True)
class TrainedModel:
    """A classifier plus everything needed to apply it to new instances."""

    model: RelationClassifier
    tokenizer: Tokenizer
    labels: tuple
    config: TrainConfig


def _pad_batch(sequences):
    length = max(len(seq) for seq in sequences)
    return torch.tensor(
        [seq + [0] * (length - len(seq)) for seq in sequences], dtype=torch.long
    )


def train(instances, config):
    """Train a classifier; returns (TrainedModel, truncated_count)."""
    if not instances:
        raise ValueError("no training instances")
    labels = tuple(sorted({inst.label for inst in instances}))
    label_ids = {label: index for index, label in enumerate(labels)}
    tokenizer = Tokenizer.build(instances)

    encoded = []
    truncated_count = 0
    for inst in instances:
        ids, truncated = tokenizer.encode(inst, config.max_sequence_length)
        encoded.append((ids, label_ids[inst.label]))
        truncated_count += truncated

    torch.manual_seed(config.seed)
    model = RelationClassifier(len(tokenizer), len(labels), config)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    generator = torch.Generator().manual_seed(config.seed)

    model.train()
    for _ in range(config.epochs):
        order = torch.randperm(len(encoded), generator=generator).tolist()
        for start in range(0, len(order), config.batch_size):
            batch = [encoded[i] for i in order[start : start + config.batch_size]]
            token_ids = _pad_batch([ids for ids, _ in batch])
            targets = torch.tensor([target for _, target in batch], dtype=torch.long)
            optimizer.zero_grad()
            loss = loss_fn(model(token_ids), targets)
            loss.backward()
            optimizer.step()
    model.eval()
    return TrainedModel(model, tokenizer, labels, config), truncated_count


def save_model(trained, directory):
    """Write model.pt, vocab.json, labels.json, and config.json."""
    os.makedirs(directory, exist_ok=True)
    torch.save(trained.model.state_dict(), os.path.join(directory, MODEL_FILE))
    _write_json(directory, VOCAB_FILE, list(trained.tokenizer.tokens))
    _write_json(directory, LABELS_FILE, list(trained.labels))
    _write_json(directory, CONFIG_FILE, trained.config.to_json_dict())


def load_model(directory):
    """Rebuild a TrainedModel from a saved artifact directory."""
    config = TrainConfig.from_json_dict(_read_json(directory, CONFIG_FILE))
    tokenizer = Tokenizer(_read_json(directory, VOCAB_FILE))
    labels = tuple(_read_json(directory, LABELS_FILE))
    model = RelationClassifier(len(tokenizer), len(labels), config)
    state = torch.load(
        os.path.join(directory, MODEL_FILE), weights_only=True, map_location="cpu"
    )
    model.load_state_dict(state)
    model.eval()
    return TrainedModel(model, tokenizer, labels, config)


def predict_logits(trained, instances, batch_size=32):
    """Per-instance label logits, independent of batch composition."""
    if batch_size <= 0:
        raise ValueError("batch_size must be positive")
    trained.model.eval()
    rows = []
    with torch.no_grad():
        for start in range(0, len(instances), batch_size):
            batch = instances[start : start + batch_size]
            token_ids = _pad_batch(
                [
                    trained.tokenizer.encode(inst, trained.config.max_sequence_length)[0]
                    for inst in batch
                ]
            )
            rows.append(trained.model(token_ids))
    if not rows:
        return torch.empty((0, len(trained.labels)))
    return torch.cat(rows)


def predict(trained, instances, batch_size=32):
    """Predicted label text per instance (argmax over the trained head)."""
    known = set(trained.labels)
    unknown = sorted({inst.label for inst in instances} - known)
    if unknown:
        raise ValueError(
            f"unknown label at prediction time: {', '.join(unknown)}"
        )
    logits = predict_logits(trained, instances, batch_size=batch_size)
    return [trained.labels[index] for index in logits.argmax(dim=1).tolist()]


def _write_json(directory, name, payload):
    with open(os.path.join(directory, name), "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, indent=2)
        handle.write("\n")


def _read_json(directory, name):
    with open(os.path.join(directory, name), encoding="utf-8") as handle:
        return json.load(handle)
