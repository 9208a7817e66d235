"""Turning queries into classifier examples, one of three input setups.

snt      the sentence text alone
qry2snt  the concept phrase paired with the sentence
sp2snt   the statutory provision paired with the sentence

Pair setups put the query-side text first so the encoder can condition
the sentence on it; overflow handling (the provision can be long) is
the tokenizer's job and keeps the sentence intact, see encode_example.
"""

from __future__ import annotations

from dataclasses import dataclass

from sentscorer.data import FoldPlan, Query

SETUPS = ("snt", "qry2snt", "sp2snt")


@dataclass(frozen=True)
class Example:
    sentence_id: str
    text_a: str
    text_b: str | None
    label: int


def make_examples(queries: list[Query], setup: str) -> list[Example]:
    if setup not in SETUPS:
        raise ValueError(f"unknown setup {setup!r}; expected one of {SETUPS}")
    examples = []
    for query in queries:
        for s in query.sentences:
            if setup == "snt":
                ex = Example(s.sentence_id, s.text, None, s.label)
            elif setup == "qry2snt":
                ex = Example(s.sentence_id, query.concept, s.text, s.label)
            else:
                ex = Example(s.sentence_id, query.provision_text, s.text,
                             s.label)
            examples.append(ex)
    return examples


def split_rotation(queries: list[Query], plan: FoldPlan,
                   entry: dict[str, object], setup: str):
    """Examples for one cross-validation iteration: (train, val, test)."""
    by_id = {q.query_id: q for q in queries}

    def fold_queries(fold_ids) -> list[Query]:
        picked = []
        for fold_id in fold_ids:
            for qid in plan.members[fold_id]:
                picked.append(by_id[qid])
        return picked

    train = make_examples(fold_queries(entry["train"]), setup)
    val = make_examples(fold_queries([entry["validation"]]), setup)
    test = make_examples(fold_queries([entry["test"]]), setup)
    return train, val, test
