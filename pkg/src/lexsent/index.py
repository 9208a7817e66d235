"""Per-query inverted indexes over sentences and over full case texts.

Indexes are built per concept/query because ranking happens within an
already-retrieved result list; there is no corpus-global index.  The
resulting structures are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from lexsent.dataset import ConceptQuery
from lexsent.textprep import AnalyzerConfig, analyze

INDEX_CACHE_VERSION = 1


class NoCaseContextError(ValueError):
    """Raised when a query carries no case_text anywhere: no context available."""


@dataclass(frozen=True)
class InvertedIndex:
    """Term postings plus the document statistics BM25 needs.

    postings maps term -> tuple of (doc_id, term_frequency) sorted by
    doc_id; doc_lengths covers every document, including zero-length ones
    that survive analysis with no tokens.
    """

    postings: Mapping[str, tuple[tuple[str, int], ...]]
    doc_lengths: Mapping[str, int]
    doc_count: int
    avg_doc_length: float

    def __post_init__(self) -> None:
        if self.doc_count < 1:
            raise ValueError("index must contain at least one document")

    def doc_frequency(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def term_frequency(self, term: str, doc_id: str) -> int:
        for did, tf in self.postings.get(term, ()):
            if did == doc_id:
                return tf
        return 0

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.doc_lengths


def build_index(docs: Iterable[tuple[str, str]], config: AnalyzerConfig) -> InvertedIndex:
    """Index (doc_id, text) pairs; deterministic regardless of input order."""
    doc_lengths: dict[str, int] = {}
    term_docs: dict[str, dict[str, int]] = {}
    for doc_id, text in docs:
        if doc_id in doc_lengths:
            raise ValueError(f"duplicate document id {doc_id!r}")
        tokens = analyze(text, config)
        doc_lengths[doc_id] = len(tokens)
        for tok in tokens:
            counts = term_docs.setdefault(tok, {})
            counts[doc_id] = counts.get(doc_id, 0) + 1
    if not doc_lengths:
        raise ValueError("index must contain at least one document")
    postings = {
        term: tuple(sorted(counts.items()))
        for term, counts in sorted(term_docs.items())
    }
    doc_lengths = dict(sorted(doc_lengths.items()))
    n = len(doc_lengths)
    avg = sum(doc_lengths.values()) / n
    return InvertedIndex(postings=postings, doc_lengths=doc_lengths,
                         doc_count=n, avg_doc_length=avg)


def build_sentence_index(query: ConceptQuery, config: AnalyzerConfig) -> InvertedIndex:
    """One document per sentence in the query's result list."""
    return build_index(((s.sentence_id, s.text) for s in query.sentences), config)


def build_case_index(
    query: ConceptQuery, config: AnalyzerConfig
) -> tuple[InvertedIndex, tuple[str, ...]]:
    """One document per distinct case that carries a full decision text.

    Returns the index together with the ids of sentences whose case has no
    case_text anywhere in the query (flagged for the caller to warn about).
    The first non-empty case_text seen for a case wins.
    """
    case_texts: dict[str, str] = {}
    for s in query.sentences:
        if s.case_text and s.case_id not in case_texts:
            case_texts[s.case_id] = s.case_text
    if not case_texts:
        raise NoCaseContextError(
            f"no context available: query {query.query_id!r} has no case_text"
        )
    uncovered = tuple(
        s.sentence_id for s in query.sentences if s.case_id not in case_texts
    )
    index = build_index(sorted(case_texts.items()), config)
    return index, uncovered


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Write a versioned on-disk cache (format may change between releases)."""
    payload = {
        "version": INDEX_CACHE_VERSION,
        "doc_count": index.doc_count,
        "avg_doc_length": index.avg_doc_length,
        "doc_lengths": dict(index.doc_lengths),
        "postings": {t: [list(p) for p in plist] for t, plist in index.postings.items()},
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def load_index(path: str | Path) -> InvertedIndex:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("version") != INDEX_CACHE_VERSION:
        raise ValueError(
            f"unsupported index cache version {payload.get('version')!r} in {path}"
        )
    postings = {
        term: tuple((doc_id, int(tf)) for doc_id, tf in plist)
        for term, plist in payload["postings"].items()
    }
    return InvertedIndex(
        postings=postings,
        doc_lengths={k: int(v) for k, v in payload["doc_lengths"].items()},
        doc_count=int(payload["doc_count"]),
        avg_doc_length=float(payload["avg_doc_length"]),
    )
