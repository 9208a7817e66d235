"""Loading, validation and description of the labeled sentence corpus.

Canonical format: UTF-8 JSON lines, one sentence per line.  Every line
carries ``query_id``, ``sentence_id``, ``text``, ``label`` and ``case_id``;
the query-level fields ``concept`` and ``provision_text`` must appear on a
query's first line and may be omitted (inherited) afterwards, as may
``case_text`` after the first line of its case.  Unknown fields are kept in
a pass-through ``extra`` map and survive a save/load round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from lexsent.labels import UnknownLabelError, ValueLabel, label_text, parse_label

CORE_FIELDS = frozenset(
    {"query_id", "concept", "provision_text", "sentence_id", "text", "label",
     "case_id", "case_text"}
)


class DatasetError(ValueError):
    """Invalid dataset content; message carries file/line context."""


@dataclass(frozen=True)
class SentenceRecord:
    sentence_id: str
    text: str
    label: ValueLabel
    case_id: str
    case_text: str | None = None
    extra: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ConceptQuery:
    query_id: str
    concept: str
    provision_text: str
    sentences: tuple[SentenceRecord, ...]
    extra: Mapping[str, Any] = field(default_factory=dict)

    def sentence_ids(self) -> tuple[str, ...]:
        return tuple(s.sentence_id for s in self.sentences)

    def labels_by_id(self) -> dict[str, ValueLabel]:
        return {s.sentence_id: s.label for s in self.sentences}


@dataclass(frozen=True)
class Dataset:
    queries: tuple[ConceptQuery, ...]

    @property
    def total_sentences(self) -> int:
        return sum(len(q.sentences) for q in self.queries)

    def query(self, query_id: str) -> ConceptQuery:
        for q in self.queries:
            if q.query_id == query_id:
                return q
        raise KeyError(query_id)


def _require(raw: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in raw or raw[key] is None:
        raise DatasetError(f"{where}: missing field {key!r}")
    return raw[key]


def _non_empty_str(value: Any, key: str, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise DatasetError(f"{where}: field {key!r} must be a non-empty string")
    return value


class _QueryBuilder:
    def __init__(self, query_id: str, concept: str, provision_text: str,
                 extra: dict[str, Any]):
        self.query_id = query_id
        self.concept = concept
        self.provision_text = provision_text
        self.extra = extra
        self.sentences: list[SentenceRecord] = []
        self.seen_ids: set[str] = set()
        self.case_texts: dict[str, str] = {}

    def build(self) -> ConceptQuery:
        return ConceptQuery(
            query_id=self.query_id,
            concept=self.concept,
            provision_text=self.provision_text,
            sentences=tuple(self.sentences),
            extra=self.extra,
        )


def _records_from_lines(lines: Iterable[str], source: str) -> Iterator[tuple[int, dict]]:
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as e:
            raise DatasetError(f"{source}:{lineno}: malformed JSON record: {e}") from None
        if not isinstance(raw, dict):
            raise DatasetError(f"{source}:{lineno}: record must be a JSON object")
        yield lineno, raw


def load_canonical(path: str | Path) -> Dataset:
    """Load a canonical line-delimited dataset file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    builders: dict[str, _QueryBuilder] = {}
    source = str(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in _records_from_lines(fh, source):
            where = f"{source}:{lineno}"
            query_id = _non_empty_str(_require(raw, "query_id", where), "query_id", where)
            builder = builders.get(query_id)
            if builder is None:
                concept = _non_empty_str(
                    _require(raw, "concept", where), "concept", where)
                provision = _non_empty_str(
                    _require(raw, "provision_text", where), "provision_text", where)
                qextra = {k: v for k, v in raw.items() if k not in CORE_FIELDS}
                builder = _QueryBuilder(query_id, concept, provision, qextra)
                builders[query_id] = builder
            else:
                if "concept" in raw and raw["concept"] != builder.concept:
                    raise DatasetError(
                        f"{where}: field 'concept' conflicts with earlier value "
                        f"for query {query_id!r}")
                if ("provision_text" in raw
                        and raw["provision_text"] != builder.provision_text):
                    raise DatasetError(
                        f"{where}: field 'provision_text' conflicts with earlier "
                        f"value for query {query_id!r}")
            sentence_id = _non_empty_str(
                _require(raw, "sentence_id", where), "sentence_id", where)
            if sentence_id in builder.seen_ids:
                raise DatasetError(
                    f"{where}: duplicate sentence_id {sentence_id!r} in query "
                    f"{query_id!r}")
            builder.seen_ids.add(sentence_id)
            text = _non_empty_str(_require(raw, "text", where), "text", where)
            try:
                label = parse_label(_non_empty_str(
                    _require(raw, "label", where), "label", where))
            except UnknownLabelError as e:
                raise DatasetError(f"{where}: {e}") from None
            case_id = _non_empty_str(_require(raw, "case_id", where), "case_id", where)
            case_text = raw.get("case_text")
            if case_text is not None:
                case_text = _non_empty_str(case_text, "case_text", where)
                builder.case_texts.setdefault(case_id, case_text)
            else:
                case_text = builder.case_texts.get(case_id)
            extra = {k: v for k, v in raw.items() if k not in CORE_FIELDS}
            builder.sentences.append(SentenceRecord(
                sentence_id=sentence_id, text=text, label=label,
                case_id=case_id, case_text=case_text, extra=extra))
    if not builders:
        raise DatasetError(f"{source}: empty dataset")
    return Dataset(queries=tuple(b.build() for b in builders.values()))


def save_canonical(dataset: Dataset, path: str | Path) -> None:
    """Write the canonical format; inherited fields are emitted once."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for q in dataset.queries:
            cases_written: set[str] = set()
            for i, s in enumerate(q.sentences):
                row: dict[str, Any] = {"query_id": q.query_id}
                if i == 0:
                    row["concept"] = q.concept
                    row["provision_text"] = q.provision_text
                    row.update(q.extra)
                row["sentence_id"] = s.sentence_id
                row["text"] = s.text
                row["label"] = label_text(s.label)
                row["case_id"] = s.case_id
                if s.case_text is not None and s.case_id not in cases_written:
                    row["case_text"] = s.case_text
                    cases_written.add(s.case_id)
                row.update(s.extra)
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


# Key aliases the upstream-adapter tries, in order, for each canonical field.
UPSTREAM_KEY_ALIASES: dict[str, tuple[str, ...]] = {
    "concept": ("concept", "name", "term", "query"),
    "provision_text": ("provision_text", "provision", "source_provision", "statute"),
    "sentences": ("sentences", "items", "examples"),
    "sentence_id": ("sentence_id", "id", "sid"),
    "text": ("text", "sentence", "snippet"),
    "label": ("label", "value", "category", "class"),
    "case_id": ("case_id", "case", "decision_id", "doc_id"),
    "case_text": ("case_text", "decision_text", "context"),
}


def _pick(raw: Mapping[str, Any], field_name: str, where: str,
          aliases: Mapping[str, tuple[str, ...]], required: bool = True) -> Any:
    for key in aliases[field_name]:
        if key in raw and raw[key] is not None:
            return raw[key]
    if required:
        tried = ", ".join(repr(k) for k in aliases[field_name])
        raise DatasetError(f"{where}: no {field_name!r} field (tried {tried})")
    return None


def load_upstream(directory: str | Path,
                  key_aliases: Mapping[str, tuple[str, ...]] | None = None) -> Dataset:
    """Adapt a directory of per-concept JSON files to the canonical model.

    Each ``*.json`` file holds one concept: an object with the concept
    name, its provision text, and a list of sentence objects.  Field names
    vary between releases, so each canonical field is resolved through an
    alias list (override via ``key_aliases``).  File stem is the query_id.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"upstream dataset directory not found: {directory}")
    aliases = dict(UPSTREAM_KEY_ALIASES)
    if key_aliases:
        aliases.update(key_aliases)
    queries = []
    files = sorted(directory.glob("*.json"))
    if not files:
        raise DatasetError(f"{directory}: empty dataset (no *.json concept files)")
    for f in files:
        where = str(f)
        try:
            raw = json.loads(f.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DatasetError(f"{where}: malformed JSON: {e}") from None
        concept = _non_empty_str(_pick(raw, "concept", where, aliases), "concept", where)
        provision = _non_empty_str(
            _pick(raw, "provision_text", where, aliases), "provision_text", where)
        items = _pick(raw, "sentences", where, aliases)
        if not isinstance(items, list) or not items:
            raise DatasetError(f"{where}: sentence list is missing or empty")
        sentences = []
        seen: set[str] = set()
        for i, item in enumerate(items):
            iw = f"{where}[{i}]"
            if not isinstance(item, dict):
                raise DatasetError(f"{iw}: sentence entry must be an object")
            sid = str(_pick(item, "sentence_id", iw, aliases))
            if sid in seen:
                raise DatasetError(f"{iw}: duplicate sentence_id {sid!r}")
            seen.add(sid)
            try:
                label = parse_label(str(_pick(item, "label", iw, aliases)))
            except UnknownLabelError as e:
                raise DatasetError(f"{iw}: {e}") from None
            case_text = _pick(item, "case_text", iw, aliases, required=False)
            sentences.append(SentenceRecord(
                sentence_id=sid,
                text=_non_empty_str(_pick(item, "text", iw, aliases), "text", iw),
                label=label,
                case_id=str(_pick(item, "case_id", iw, aliases)),
                case_text=case_text,
            ))
        queries.append(ConceptQuery(
            query_id=f.stem, concept=concept, provision_text=provision,
            sentences=tuple(sentences)))
    return Dataset(queries=tuple(queries))


def load_dataset(path: str | Path, format: str = "canonical") -> Dataset:
    if format == "canonical":
        return load_canonical(path)
    if format == "upstream-adapter":
        return load_upstream(path)
    raise ValueError(f"unknown dataset format {format!r}")


@dataclass(frozen=True)
class QuerySummary:
    query_id: str
    concept: str
    sentence_count: int
    label_counts: dict[ValueLabel, int]

    @property
    def modal_label(self) -> ValueLabel:
        # lowest label wins ties, matching the "less valuable dominate" reading
        return max(sorted(self.label_counts), key=lambda l: self.label_counts[l])


def dataset_summary(dataset: Dataset) -> tuple[list[QuerySummary], dict[ValueLabel, int]]:
    """Per-query label histograms plus the overall histogram."""
    per_query = []
    overall = {label: 0 for label in ValueLabel}
    for q in dataset.queries:
        counts = {label: 0 for label in ValueLabel}
        for s in q.sentences:
            counts[s.label] += 1
            overall[s.label] += 1
        per_query.append(QuerySummary(
            query_id=q.query_id, concept=q.concept,
            sentence_count=len(q.sentences), label_counts=counts))
    return per_query, overall


@dataclass(frozen=True)
class AnnotationTable:
    """(item_id, annotator_id, label) triples for agreement computation."""

    items: tuple[tuple[str, str, ValueLabel], ...]

    def __post_init__(self) -> None:
        seen = set()
        for item_id, annotator_id, _ in self.items:
            key = (item_id, annotator_id)
            if key in seen:
                raise DatasetError(
                    f"duplicate annotation for item {item_id!r} by {annotator_id!r}")
            seen.add(key)
