"""Training loop with validation-driven checkpoint selection.

Defaults mirror the standard fine-tuning recipe for this task family:
10 epochs, batch size 8, sequence cap 512, Adam at 4e-5, and the
checkpoint with the highest validation macro-F1 wins, earliest epoch
on ties. Every knob is overridable; training a small model from
scratch (no pretrained weights) typically wants a larger learning
rate than the fine-tuning default.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from sentscorer.examples import Example
from sentscorer.metrics import macro_f1
from sentscorer.model import (ModelConfig, SentenceClassifier, Vocab,
                              collate, encode_example, tokenize)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    batch_size: int = 8
    max_len: int = 512
    lr: float = 4e-5
    seed: int = 0
    model: ModelConfig = field(default_factory=ModelConfig)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_macro_f1: float


@dataclass
class TrainedScorer:
    model: SentenceClassifier
    vocab: Vocab
    config: TrainConfig
    history: tuple[EpochStats, ...]
    best_epoch: int


def _encode_all(vocab: Vocab, examples: list[Example], max_len: int):
    return [encode_example(vocab, ex.text_a, ex.text_b, max_len)
            for ex in examples]


def _predict_labels(model: SentenceClassifier, encoded, batch_size: int):
    model.eval()
    labels = []
    with torch.no_grad():
        for start in range(0, len(encoded), batch_size):
            ids, segments, mask = collate(encoded[start:start + batch_size])
            logits = model(ids, segments, mask)
            labels.extend(int(i) for i in logits.argmax(dim=1))
    return labels


def train_scorer(train_examples: list[Example], val_examples: list[Example],
                 config: TrainConfig = TrainConfig()) -> TrainedScorer:
    """Train on the train split, pick the best epoch on the val split."""
    if not train_examples or not val_examples:
        raise ValueError("need non-empty train and validation splits")
    if config.epochs < 1:
        raise ValueError("epochs must be at least 1")
    torch.manual_seed(config.seed)
    token_lists = []
    for ex in train_examples:
        token_lists.append(tokenize(ex.text_a))
        if ex.text_b is not None:
            token_lists.append(tokenize(ex.text_b))
    vocab = Vocab.build(token_lists)
    cap = min(config.max_len, config.model.max_len)
    train_enc = _encode_all(vocab, train_examples, cap)
    val_enc = _encode_all(vocab, val_examples, cap)
    train_labels = torch.tensor([ex.label for ex in train_examples])
    val_labels = [ex.label for ex in val_examples]

    model = SentenceClassifier(len(vocab), config.model)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    loss_fn = nn.CrossEntropyLoss()
    shuffler = torch.Generator().manual_seed(config.seed)

    history = []
    best_f1 = -1.0
    best_epoch = 0
    best_state = None
    for epoch in range(1, config.epochs + 1):
        model.train()
        order = torch.randperm(len(train_enc), generator=shuffler)
        total_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch_idx = order[start:start + config.batch_size]
            ids, segments, mask = collate([train_enc[i] for i in batch_idx])
            logits = model(ids, segments, mask)
            loss = loss_fn(logits, train_labels[batch_idx])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach()) * len(batch_idx)
        train_loss = total_loss / len(train_enc)
        predicted = _predict_labels(model, val_enc, config.batch_size)
        f1 = macro_f1(val_labels, predicted)
        history.append(EpochStats(epoch, train_loss, f1))
        if f1 > best_f1:
            best_f1 = f1
            best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
    model.load_state_dict(best_state)
    return TrainedScorer(model=model, vocab=vocab, config=config,
                         history=tuple(history), best_epoch=best_epoch)


def predict_proba(scorer: TrainedScorer, examples: list[Example],
                  batch_size: int = 64) -> np.ndarray:
    """Softmax class probabilities, one row per example."""
    cap = min(scorer.config.max_len, scorer.config.model.max_len)
    encoded = _encode_all(scorer.vocab, examples, cap)
    scorer.model.eval()
    rows = []
    with torch.no_grad():
        for start in range(0, len(encoded), batch_size):
            ids, segments, mask = collate(encoded[start:start + batch_size])
            logits = scorer.model(ids, segments, mask)
            rows.append(torch.softmax(logits, dim=1).numpy())
    return np.concatenate(rows, axis=0)
