"""Vocabulary, example encoding, and the classifier network.

The network is a small transformer encoder trained from scratch: token,
position and segment embeddings feed a stack of encoder layers, and the
first position's state is classified into the four value labels. Sizes
are configurable; defaults are deliberately small so the model trains
on CPU in seconds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import torch
from torch import nn

PAD, UNK, CLS, SEP = 0, 1, 2, 3
_SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]")

N_CLASSES = 4


def tokenize(text: str) -> list[str]:
    return text.lower().split()


@dataclass(frozen=True)
class Vocab:
    index: dict

    @classmethod
    def build(cls, token_lists) -> "Vocab":
        counts = Counter()
        for tokens in token_lists:
            counts.update(tokens)
        index = {t: i for i, t in enumerate(_SPECIALS)}
        for token, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            index[token] = len(index)
        return cls(index=index)

    def __len__(self) -> int:
        return len(self.index)

    def encode(self, tokens: list[str]) -> list[int]:
        return [self.index.get(t, UNK) for t in tokens]


def encode_example(vocab: Vocab, text_a: str, text_b: str | None,
                   max_len: int) -> tuple[list[int], list[int]]:
    """Token ids and segment ids for one example, at most max_len long.

    Single texts are [CLS] a [SEP], truncated at the tail. Pairs are
    [CLS] a [SEP] b [SEP] with segments 0/1; on overflow the second
    text (the sentence being classified) is kept intact and the first
    text keeps only its head, because the head of a provision carries
    its operative words.
    """
    a = vocab.encode(tokenize(text_a))
    if text_b is None:
        a = a[: max_len - 2]
        ids = [CLS] + a + [SEP]
        return ids, [0] * len(ids)
    b = vocab.encode(tokenize(text_b))
    b = b[: max_len - 4]
    budget_a = max_len - 3 - len(b)
    a = a[:budget_a]
    ids = [CLS] + a + [SEP] + b + [SEP]
    segments = [0] * (len(a) + 2) + [1] * (len(b) + 1)
    return ids, segments


def collate(encoded: list[tuple[list[int], list[int]]]):
    """Pad a batch to its longest sequence; returns ids, segments, mask."""
    width = max(len(ids) for ids, _ in encoded)
    ids = torch.zeros(len(encoded), width, dtype=torch.long)
    segments = torch.zeros(len(encoded), width, dtype=torch.long)
    mask = torch.zeros(len(encoded), width, dtype=torch.bool)
    for row, (seq, segs) in enumerate(encoded):
        ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        segments[row, : len(segs)] = torch.tensor(segs, dtype=torch.long)
        mask[row, : len(seq)] = True
    return ids, segments, mask


@dataclass(frozen=True)
class ModelConfig:
    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 2
    d_ffn: int = 128
    dropout: float = 0.1
    max_len: int = 512


class SentenceClassifier(nn.Module):
    def __init__(self, vocab_size: int, config: ModelConfig):
        super().__init__()
        self.config = config
        d = config.d_model
        self.tok_emb = nn.Embedding(vocab_size, d, padding_idx=PAD)
        self.pos_emb = nn.Embedding(config.max_len, d)
        self.seg_emb = nn.Embedding(2, d)
        self.input_norm = nn.LayerNorm(d)
        self.input_dropout = nn.Dropout(config.dropout)
        layer = nn.TransformerEncoderLayer(
            d_model=d, nhead=config.n_heads, dim_feedforward=config.d_ffn,
            dropout=config.dropout, batch_first=True)
        self.encoder = nn.TransformerEncoder(layer, config.n_layers,
                                             enable_nested_tensor=False)
        self.head = nn.Linear(d, N_CLASSES)

    def forward(self, ids: torch.Tensor, segments: torch.Tensor,
                mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.size(1), device=ids.device)
        x = self.tok_emb(ids) + self.pos_emb(positions) + self.seg_emb(segments)
        x = self.input_dropout(self.input_norm(x))
        hidden = self.encoder(x, src_key_padding_mask=~mask)
        return self.head(hidden[:, 0])
