"""Baseline rankers: random permutation, BM25, BM25-c and the
expected-value scoring rule for classifier probability distributions.

All scoring is pure given immutable indexes, and every ordering is made
deterministic by breaking score ties on ascending sentence_id.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from lexsent.dataset import ConceptQuery
from lexsent.index import InvertedIndex, NoCaseContextError, build_case_index, \
    build_sentence_index
from lexsent.textprep import AnalyzerConfig, analyze


@dataclass(frozen=True)
class Bm25Params:
    """Defaults encode the length-penalty-free configuration (b = 0)."""

    k1: float = 1.2
    b: float = 0.0

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


@dataclass(frozen=True)
class ScoredSentence:
    sentence_id: str
    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise ValueError(
                f"non-finite score {self.score!r} for {self.sentence_id!r}")


@dataclass(frozen=True)
class RankedList:
    """Scores sorted descending, ties broken by ascending sentence_id."""

    query_id: str
    entries: tuple[ScoredSentence, ...]

    def sentence_ids(self) -> tuple[str, ...]:
        return tuple(e.sentence_id for e in self.entries)


class CoverageError(ValueError):
    """Scores do not cover exactly the query's sentence ids."""


def rank(query: ConceptQuery, scores: Mapping[str, float]) -> RankedList:
    """Order the query's sentences by score; the score map must cover
    exactly the query's sentence ids."""
    expected = set(query.sentence_ids())
    got = set(scores)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        parts = []
        if missing:
            parts.append(f"missing ids: {', '.join(missing[:10])}"
                         + (" ..." if len(missing) > 10 else ""))
        if extra:
            parts.append(f"extra ids: {', '.join(extra[:10])}"
                         + (" ..." if len(extra) > 10 else ""))
        raise CoverageError(
            f"score coverage mismatch for query {query.query_id!r}: "
            + "; ".join(parts))
    entries = tuple(
        ScoredSentence(sid, float(scores[sid]))
        for sid in sorted(expected, key=lambda s: (-scores[s], s))
    )
    return RankedList(query_id=query.query_id, entries=entries)


class UnknownDocumentError(KeyError):
    pass


def _idf(index: InvertedIndex, term: str) -> float:
    # non-negative variant: stays positive even when df > N/2, which is
    # common in small per-query universes
    df = index.doc_frequency(term)
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def _tf_component(tf: int, doc_len: int, index: InvertedIndex, p: Bm25Params) -> float:
    denom = tf + p.k1 * (1.0 - p.b + p.b * doc_len / index.avg_doc_length)
    return tf * (p.k1 + 1.0) / denom


def bm25_score(query_tokens: Sequence[str], doc_id: str, index: InvertedIndex,
               params: Bm25Params = Bm25Params()) -> float:
    """Okapi BM25 of one document against the query token multiset.

    Each query token occurrence contributes IDF(t) * tf(k1+1)/(tf + k1 *
    (1 - b + b*len/avglen)); repeated query tokens therefore weigh their
    term proportionally.
    """
    if doc_id not in index:
        raise UnknownDocumentError(doc_id)
    doc_len = index.doc_lengths[doc_id]
    score = 0.0
    for term in query_tokens:
        tf = index.term_frequency(term, doc_id)
        if tf == 0:
            continue
        score += _idf(index, term) * _tf_component(tf, doc_len, index, params)
    return score


def bm25_scores_all(query_tokens: Sequence[str], index: InvertedIndex,
                    params: Bm25Params = Bm25Params()) -> dict[str, float]:
    """BM25 of every indexed document, via a single postings traversal."""
    scores = {doc_id: 0.0 for doc_id in index.doc_lengths}
    term_counts: dict[str, int] = {}
    for term in query_tokens:
        term_counts[term] = term_counts.get(term, 0) + 1
    for term, qtf in term_counts.items():
        idf = _idf(index, term)
        for doc_id, tf in index.postings.get(term, ()):
            scores[doc_id] += qtf * idf * _tf_component(
                tf, index.doc_lengths[doc_id], index, params)
    return scores


def _min_max_normalize(values: Mapping[str, float]) -> dict[str, float]:
    # constant components normalize to 0.0: they carry no ranking signal
    if not values:
        return {}
    lo = min(values.values())
    hi = max(values.values())
    if hi == lo:
        return {k: 0.0 for k in values}
    span = hi - lo
    return {k: (v - lo) / span for k, v in values.items()}


@dataclass(frozen=True)
class Bm25cResult:
    ranked: RankedList
    missing_context: tuple[str, ...]  # sentence ids scored without a case


def bm25c_components(
    query: ConceptQuery,
    config: AnalyzerConfig,
    sent_index: InvertedIndex,
    case_index: InvertedIndex | None,
    params: Bm25Params,
) -> tuple[dict[str, float], dict[str, float], tuple[str, ...]]:
    """Min-max normalized sentence and context components per sentence.

    Sentences whose case is absent from the case index (or when no case
    index exists at all) get context component 0.0 and are reported back.
    """
    query_tokens = analyze(query.concept, config)
    sent_raw = bm25_scores_all(query_tokens, sent_index, params)
    sent_norm = _min_max_normalize(sent_raw)

    missing: list[str] = []
    ctx_norm: dict[str, float] = {}
    if case_index is None:
        missing = list(query.sentence_ids())
        ctx_norm = {sid: 0.0 for sid in missing}
    else:
        provision_tokens = analyze(query.provision_text, config)
        case_raw = bm25_scores_all(provision_tokens, case_index, params)
        covered = {
            s.sentence_id: case_raw[s.case_id]
            for s in query.sentences if s.case_id in case_index
        }
        ctx_norm = _min_max_normalize(covered)
        for s in query.sentences:
            if s.sentence_id not in ctx_norm:
                ctx_norm[s.sentence_id] = 0.0
                missing.append(s.sentence_id)
    return sent_norm, ctx_norm, tuple(missing)


def bm25c_score(
    query_tokens: Sequence[str],
    provision_tokens: Sequence[str],
    sentence_id: str,
    case_id: str,
    sent_index: InvertedIndex,
    case_index: InvertedIndex,
    params: Bm25Params = Bm25Params(),
    lam: float = 0.5,
) -> float:
    """Interpolated score lam*sentence + (1-lam)*context for one sentence.

    Both components are min-max normalized across the query's result list
    before interpolation (sentence-level and case-level BM25 live on
    incomparable scales).  A sentence whose case is not indexed falls back
    to its normalized sentence component alone.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    if sentence_id not in sent_index:
        raise UnknownDocumentError(sentence_id)
    sent_norm = _min_max_normalize(bm25_scores_all(query_tokens, sent_index, params))
    if case_id not in case_index:
        return sent_norm[sentence_id]
    case_norm = _min_max_normalize(bm25_scores_all(provision_tokens, case_index, params))
    return lam * sent_norm[sentence_id] + (1.0 - lam) * case_norm[case_id]


def bm25_ranking(query: ConceptQuery, config: AnalyzerConfig,
                 params: Bm25Params = Bm25Params(),
                 sent_index: InvertedIndex | None = None) -> RankedList:
    if sent_index is None:
        sent_index = build_sentence_index(query, config)
    query_tokens = analyze(query.concept, config)
    return rank(query, bm25_scores_all(query_tokens, sent_index, params))


def bm25c_ranking(query: ConceptQuery, config: AnalyzerConfig,
                  params: Bm25Params = Bm25Params(), lam: float = 0.5,
                  sent_index: InvertedIndex | None = None,
                  case_index: InvertedIndex | None = None) -> Bm25cResult:
    """Rank by the interpolated score; falls back to pure sentence BM25
    (with every sentence flagged) when the query has no case context."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    if sent_index is None:
        sent_index = build_sentence_index(query, config)
    if case_index is None:
        try:
            case_index, _ = build_case_index(query, config)
        except NoCaseContextError:
            case_index = None
    sent_norm, ctx_norm, missing = bm25c_components(
        query, config, sent_index, case_index, params)
    scores = {
        sid: lam * sent_norm[sid] + (1.0 - lam) * ctx_norm[sid]
        for sid in query.sentence_ids()
    }
    return Bm25cResult(ranked=rank(query, scores), missing_context=missing)


class InvalidDistributionError(ValueError):
    pass


def classifier_expected_value(probs: Sequence[float]) -> float:
    """Inner product of a 4-class probability vector with (0, 1, 2, 3).

    The class order is (no, potential, certain, high); using the expected
    ordinal value rather than the argmax keeps prediction confidence in
    the score.
    """
    if len(probs) != 4:
        raise InvalidDistributionError(f"expected 4 probabilities, got {len(probs)}")
    if any(p < 0.0 for p in probs):
        raise InvalidDistributionError(f"negative probability in {tuple(probs)}")
    total = sum(probs)
    if abs(total - 1.0) > 1e-4:
        raise InvalidDistributionError(
            f"non-normalized distribution (sum {total!r})")
    return float(sum(i * p for i, p in enumerate(probs)))


def _derived_rng(seed: int, query_id: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}|{query_id}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def random_permutation_ids(query: ConceptQuery, seed: int) -> list[str]:
    """Uniformly random order of the query's sentence ids, deterministic
    for a fixed (seed, query_id) and independent of file order."""
    ids = sorted(query.sentence_ids())
    rng = _derived_rng(seed, query.query_id)
    return [ids[i] for i in rng.permutation(len(ids))]


def random_ranking(query: ConceptQuery, seed: int) -> RankedList:
    """Random permutation packaged as a RankedList; scores are descending
    position pseudo-scores so the stored order survives re-sorting."""
    ordered = random_permutation_ids(query, seed)
    n = len(ordered)
    scores = {sid: float(n - pos) for pos, sid in enumerate(ordered)}
    return rank(query, scores)


def write_run(path, ranked_lists: Sequence[RankedList]) -> None:
    """TSV run file: query_id, rank, sentence_id, score (6 decimals)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rl in ranked_lists:
            for pos, entry in enumerate(rl.entries, start=1):
                fh.write(f"{rl.query_id}\t{pos}\t{entry.sentence_id}\t"
                         f"{entry.score:.6f}\n")


def read_run(path) -> dict[str, list[tuple[str, float]]]:
    """Read a run file back as query_id -> [(sentence_id, score), ...] in
    rank order."""
    runs: dict[str, list[tuple[str, float]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            query_id, rank_str, sentence_id, score_str = parts
            entries = runs.setdefault(query_id, [])
            if int(rank_str) != len(entries) + 1:
                raise ValueError(f"{path}:{lineno}: rank out of sequence")
            entries.append((sentence_id, float(score_str)))
    return runs
