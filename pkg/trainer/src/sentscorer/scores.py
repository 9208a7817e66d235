"""Score-file output in the evaluation pipeline's interchange format.

One file per test fold:

  line 1:  # setup=<name> fold=<id>
  line 2+: sentence_id TAB p_no TAB p_potential TAB p_certain TAB p_high

Probabilities are written with 8 decimals in the fixed class order
(no, potential, certain, high). The write is atomic: content goes to a
temporary sibling first and is renamed into place, so a crash never
leaves a half-written file where the evaluator would look for one.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np


def write_score_file(path: str | Path, setup_name: str, fold_id: int,
                     sentence_ids: list[str], probs: np.ndarray) -> None:
    path = Path(path)
    if len(sentence_ids) != len(probs):
        raise ValueError("one probability row per sentence id required")
    if probs.ndim != 2 or probs.shape[1] != 4:
        raise ValueError("probability rows must have 4 columns")
    lines = [f"# setup={setup_name} fold={fold_id}"]
    for sid, row in zip(sentence_ids, probs):
        lines.append(sid + "\t" + "\t".join(f"{p:.8f}" for p in row))
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path)
