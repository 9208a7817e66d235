"""Concrete rankers wired into the cross-validation loop."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from lexsent.dataset import ConceptQuery, Dataset
from lexsent.evaluation import DEFAULT_K_VALUES, Ranker, ndcg, rel
from lexsent.index import InvertedIndex, NoCaseContextError, build_case_index, \
    build_sentence_index
from lexsent.rankers import Bm25Params, RankedList, ScoredSentence, _derived_rng, \
    bm25_ranking, bm25c_ranking, random_ranking, rank
from lexsent.scorer_io import ScoreFile, scores_to_ranking
from lexsent.textprep import AnalyzerConfig

# grid searched when BM25-c's interpolation weight is tuned on validation
LAMBDA_GRID = tuple(i / 20 for i in range(21))


class RandomRanker(Ranker):
    def __init__(self, seed: int):
        self.seed = seed
        self.name = "random"

    def rank_query(self, query: ConceptQuery) -> RankedList:
        return random_ranking(query, self.seed)


class OracleRanker(Ranker):
    """Ideal ordering by true label; an upper bound used in tests."""

    name = "oracle"

    def rank_query(self, query: ConceptQuery) -> RankedList:
        scores = {s.sentence_id: float(s.label) for s in query.sentences}
        return rank(query, scores)


class _IndexCache:
    """Per-query index cache shared across fold iterations."""

    def __init__(self, config: AnalyzerConfig):
        self.config = config
        self._sentence: dict[str, InvertedIndex] = {}
        self._case: dict[str, InvertedIndex | None] = {}

    def sentence_index(self, query: ConceptQuery) -> InvertedIndex:
        idx = self._sentence.get(query.query_id)
        if idx is None:
            idx = build_sentence_index(query, self.config)
            self._sentence[query.query_id] = idx
        return idx

    def case_index(self, query: ConceptQuery) -> InvertedIndex | None:
        if query.query_id not in self._case:
            try:
                idx, _ = build_case_index(query, self.config)
            except NoCaseContextError:
                idx = None
            self._case[query.query_id] = idx
        return self._case[query.query_id]


class Bm25Ranker(Ranker):
    def __init__(self, config: AnalyzerConfig = AnalyzerConfig(),
                 params: Bm25Params = Bm25Params()):
        self.config = config
        self.params = params
        self.name = "bm25"
        self._cache = _IndexCache(config)

    def rank_query(self, query: ConceptQuery) -> RankedList:
        return bm25_ranking(query, self.config, self.params,
                            sent_index=self._cache.sentence_index(query))


class Bm25cRanker(Ranker):
    """BM25 interpolated with provision-to-case-context BM25.

    With ``lam="tune"`` the interpolation weight is grid-searched on each
    iteration's validation fold, maximizing mean NDCG at ``tune_k``
    (lowest grid value wins ties, so runs are reproducible).
    """

    def __init__(self, config: AnalyzerConfig = AnalyzerConfig(),
                 params: Bm25Params = Bm25Params(),
                 lam: float | str = 0.5, tune_k: int = 100):
        if lam != "tune" and not 0.0 <= float(lam) <= 1.0:
            raise ValueError("lambda must be in [0, 1] or 'tune'")
        self.config = config
        self.params = params
        self.lam = lam
        self.tune_k = tune_k
        self.name = "bm25c"
        self._cache = _IndexCache(config)
        self._current_lam = 0.5 if lam == "tune" else float(lam)
        self.tuned_lambdas: dict[int, float] = {}
        self.missing_context: dict[str, tuple[str, ...]] = {}

    def prepare_fold(self, fold_id: int, train: list[ConceptQuery],
                     validation: list[ConceptQuery]) -> None:
        if self.lam != "tune":
            return
        best_lam, best_score = None, None
        for lam in LAMBDA_GRID:
            total = 0.0
            for query in validation:
                result = self._rank_with(query, lam)
                total += ndcg(result, query.labels_by_id(), self.tune_k)
            score = total / len(validation) if validation else 0.0
            if best_score is None or score > best_score:
                best_lam, best_score = lam, score
        assert best_lam is not None
        self._current_lam = best_lam
        self.tuned_lambdas[fold_id] = best_lam

    def _rank_with(self, query: ConceptQuery, lam: float) -> RankedList:
        result = bm25c_ranking(
            query, self.config, self.params, lam,
            sent_index=self._cache.sentence_index(query),
            case_index=self._cache.case_index(query))
        self.missing_context[query.query_id] = result.missing_context
        return result.ranked

    def rank_query(self, query: ConceptQuery) -> RankedList:
        return self._rank_with(query, self._current_lam)


class ScoreSetRanker(Ranker):
    """Ranks from externally produced score files, one per test fold."""

    def __init__(self, score_files: Mapping[int, ScoreFile], name: str | None = None):
        self.score_files = dict(score_files)
        setups = {sf.setup_name for sf in self.score_files.values()}
        self.name = name or "+".join(sorted(setups))
        self._current: ScoreFile | None = None

    def prepare_fold(self, fold_id: int, train: list[ConceptQuery],
                     validation: list[ConceptQuery]) -> None:
        if fold_id not in self.score_files:
            raise KeyError(f"no score file for test fold {fold_id}")
        self._current = self.score_files[fold_id]

    def rank_query(self, query: ConceptQuery) -> RankedList:
        if self._current is None:
            raise RuntimeError("prepare_fold was never called")
        return scores_to_ranking(query, self._current)


class FixedRunRanker(Ranker):
    """Replays a run file, preserving its stored order exactly.

    Re-sorting is deliberately avoided: scores in run files are rounded to
    6 decimals, so re-ranking could break ties differently than the run
    that produced them.
    """

    def __init__(self, runs: Mapping[str, list[tuple[str, float]]], name: str):
        self.runs = runs
        self.name = name

    def rank_query(self, query: ConceptQuery) -> RankedList:
        if query.query_id not in self.runs:
            raise KeyError(f"run has no ranking for query {query.query_id!r}")
        entries = self.runs[query.query_id]
        got = {sid for sid, _ in entries}
        expected = set(query.sentence_ids())
        if got != expected:
            raise ValueError(
                f"run entries for query {query.query_id!r} do not match its "
                f"sentence ids ({len(got ^ expected)} difference(s))")
        return RankedList(
            query_id=query.query_id,
            entries=tuple(ScoredSentence(sid, score) for sid, score in entries))


def random_baseline_per_query(
    dataset: Dataset,
    k_values: Sequence[int] = DEFAULT_K_VALUES,
    n_seeds: int = 1000,
    base_seed: int = 0,
) -> dict[int, dict[str, float]]:
    """Per-query NDCG of the random ranker averaged over many seeds.

    Permutes relevance gains directly instead of materializing ranked
    lists, but consumes the (seed, query_id)-derived generator exactly
    like random_ranking does, so any single seed reproduces the full
    pipeline's numbers.  Returns {k: {query_id: mean NDCG}}.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    results: dict[int, dict[str, float]] = {k: {} for k in k_values}
    for query in dataset.queries:
        ids = sorted(query.sentence_ids())
        labels = query.labels_by_id()
        rels = np.array([float(rel(labels[sid])) for sid in ids])
        n = len(rels)
        discounts = 1.0 / np.log2(np.arange(2, n + 2))
        ideal = np.sort(rels)[::-1]
        idcg = {k: float(np.dot(ideal[:k], discounts[:k])) for k in k_values}
        totals = {k: 0.0 for k in k_values}
        for offset in range(n_seeds):
            rng = _derived_rng(base_seed + offset, query.query_id)
            permuted = rels[rng.permutation(n)]
            for k in k_values:
                z = idcg[k]
                if z == 0.0:
                    totals[k] += 1.0
                else:
                    kk = min(k, n)
                    totals[k] += float(np.dot(permuted[:kk], discounts[:kk])) / z
        for k in k_values:
            results[k][query.query_id] = totals[k] / n_seeds
    return results
