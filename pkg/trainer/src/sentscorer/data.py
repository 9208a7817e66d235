"""Readers for the two files this package consumes.

Both formats are produced and validated by the companion ranking
package (its `validate-data` and `folds` commands); the readers here
parse them independently so the two packages share nothing but the
files themselves.

Dataset: JSONL, one sentence per line. `query_id`, `sentence_id`,
`text`, `label` and `case_id` appear on every line; `concept` and
`provision_text` appear at least on the first line of their query and
are inherited. Labels are the four text forms.

Folds: a JSON object with a "folds" list of {"fold_id", "members"}
and, optionally, a "rotation" list of {"test", "validation", "train"}.
When the rotation is absent it is derived as validation = test + 1
cyclically, train = the rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

LABEL_CODES = {
    "no value": 0,
    "potential value": 1,
    "certain value": 2,
    "high value": 3,
}


class CorpusError(ValueError):
    """Malformed dataset or folds file."""


@dataclass(frozen=True)
class Sentence:
    sentence_id: str
    text: str
    label: int
    case_id: str


@dataclass(frozen=True)
class Query:
    query_id: str
    concept: str
    provision_text: str
    sentences: tuple[Sentence, ...]


def _label_code(raw: object, source: str, lineno: int) -> int:
    if not isinstance(raw, str):
        raise CorpusError(f"{source}:{lineno}: label must be a string")
    key = " ".join(raw.split()).lower()
    if key not in LABEL_CODES:
        raise CorpusError(f"{source}:{lineno}: unknown label {raw!r}")
    return LABEL_CODES[key]


def load_corpus(path: str | Path) -> list[Query]:
    """Parse a canonical dataset file into queries with coded labels."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    heads: dict[str, dict[str, str]] = {}
    sentences: dict[str, list[Sentence]] = {}
    order: list[str] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise CorpusError(
                    f"{path}:{lineno}: malformed JSON record") from None
            try:
                qid = record["query_id"]
                sid = record["sentence_id"]
                text = record["text"]
                label = _label_code(record["label"], str(path), lineno)
                case_id = record["case_id"]
            except KeyError as e:
                raise CorpusError(
                    f"{path}:{lineno}: missing field {e.args[0]!r}") from None
            if qid not in heads:
                heads[qid] = {}
                sentences[qid] = []
                order.append(qid)
            for field in ("concept", "provision_text"):
                if field in record:
                    heads[qid].setdefault(field, record[field])
            sentences[qid].append(Sentence(
                sentence_id=sid, text=text, label=label, case_id=case_id))
    if not order:
        raise CorpusError(f"{path}: empty dataset")
    queries = []
    for qid in order:
        head = heads[qid]
        for field in ("concept", "provision_text"):
            if field not in head:
                raise CorpusError(
                    f"{path}: query {qid!r} never states {field!r}")
        queries.append(Query(
            query_id=qid, concept=head["concept"],
            provision_text=head["provision_text"],
            sentences=tuple(sentences[qid])))
    return queries


@dataclass(frozen=True)
class FoldPlan:
    members: dict[int, tuple[str, ...]]
    rotation: tuple[dict[str, object], ...]

    @property
    def n_folds(self) -> int:
        return len(self.members)


def load_fold_plan(path: str | Path) -> FoldPlan:
    """Read a folds file; derive the rotation when it is not embedded."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"folds file not found: {path}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    try:
        folds = payload["folds"]
    except (TypeError, KeyError):
        raise CorpusError(f"{path}: no 'folds' list") from None
    members = {int(f["fold_id"]): tuple(f["members"]) for f in folds}
    if sorted(members) != list(range(len(members))):
        raise CorpusError(f"{path}: fold ids are not contiguous from 0")
    n = len(members)
    rotation = payload.get("rotation")
    if rotation is None:
        rotation = [
            {"test": t, "validation": (t + 1) % n,
             "train": [f for f in range(n) if f not in (t, (t + 1) % n)]}
            for t in range(n)
        ]
    entries = tuple(
        {"test": int(e["test"]), "validation": int(e["validation"]),
         "train": tuple(int(f) for f in e["train"])}
        for e in rotation
    )
    return FoldPlan(members=members, rotation=entries)
