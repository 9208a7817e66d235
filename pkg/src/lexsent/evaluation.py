"""Graded-relevance evaluation: gain mappings, NDCG@k, richness,
size/richness stratification, 6-fold construction and cross-validation.

Group means are unweighted: every query counts equally no matter how many
sentences its result list holds.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from lexsent.dataset import ConceptQuery, Dataset
from lexsent.labels import ValueLabel
from lexsent.rankers import RankedList

LARGE_QUERY_THRESHOLD = 550   # strictly more sentences than this is "large"
DENSE_RICHNESS_THRESHOLD = 2.0
DEFAULT_K_VALUES = (10, 100)
N_FOLDS = 6

# richness weights per label; the 0..10 scale counters the dominance of
# the low-value categories
VAL_WEIGHTS = {
    ValueLabel.NO_VALUE: 0,
    ValueLabel.POTENTIAL_VALUE: 1,
    ValueLabel.CERTAIN_VALUE: 5,
    ValueLabel.HIGH_VALUE: 10,
}


def rel(label: ValueLabel) -> int:
    """NDCG gain of a label: no/potential/certain/high -> 0/1/2/3."""
    return int(label)


def val(label: ValueLabel) -> int:
    """Richness weight of a label: no/potential/certain/high -> 0/1/5/10."""
    return VAL_WEIGHTS[ValueLabel(label)]


def dcg_at_k(gains: Sequence[float], k: int) -> float:
    """Sum of gain_i / log2(i + 1) over the first min(k, n) positions."""
    top = np.asarray(gains[: min(k, len(gains))], dtype=float)
    if top.size == 0:
        return 0.0
    discounts = np.log2(np.arange(2, top.size + 2))
    return float(np.sum(top / discounts))


def ndcg_from_rels(rels: Sequence[int], k: int) -> float:
    """NDCG@k of a ranked gain sequence against its own ideal reordering.

    When the ideal DCG is zero (every label carries no value) any ordering
    attains the ideal, so the result is defined as 1.0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ideal = sorted(rels, reverse=True)
    z = dcg_at_k(ideal, k)
    if z == 0.0:
        return 1.0
    return dcg_at_k(list(rels), k) / z


def ndcg(ranking: RankedList, labels: Mapping[str, ValueLabel], k: int) -> float:
    """NDCG@k of a ranked list, gains taken from the label map."""
    missing = [sid for sid in ranking.sentence_ids() if sid not in labels]
    if missing:
        raise KeyError(
            f"labels missing for {len(missing)} ranked sentence(s), "
            f"e.g. {missing[:5]}")
    rels = [rel(labels[sid]) for sid in ranking.sentence_ids()]
    return ndcg_from_rels(rels, k)


def richness(query: ConceptQuery) -> float:
    """Mean richness weight over the query's sentences, in [0, 10]."""
    if not query.sentences:
        raise ValueError(f"query {query.query_id!r} has no sentences")
    return sum(val(s.label) for s in query.sentences) / len(query.sentences)


class StratumLabel(Enum):
    SM_SP = "SmSp"
    SM_DS = "SmDs"
    LG_SP = "LgSp"
    LG_DS = "LgDs"

    @property
    def code(self) -> str:
        return self.value


STRATUM_ORDER = (StratumLabel.SM_SP, StratumLabel.SM_DS,
                 StratumLabel.LG_SP, StratumLabel.LG_DS)


def stratum_of(sentence_count: int, query_richness: float) -> StratumLabel:
    large = sentence_count > LARGE_QUERY_THRESHOLD
    dense = query_richness >= DENSE_RICHNESS_THRESHOLD
    if large:
        return StratumLabel.LG_DS if dense else StratumLabel.LG_SP
    return StratumLabel.SM_DS if dense else StratumLabel.SM_SP


def stratify(dataset: Dataset) -> dict[str, StratumLabel]:
    return {
        q.query_id: stratum_of(len(q.sentences), richness(q))
        for q in dataset.queries
    }


@dataclass(frozen=True)
class FoldAssignment:
    fold_id: int
    members: tuple[str, ...]


def make_folds(dataset: Dataset, seed: int, n_folds: int = N_FOLDS) -> list[FoldAssignment]:
    """Stratified fold assignment: shuffle each stratum under the seed,
    then deal its queries round-robin so every fold gets the same
    per-stratum composition."""
    strata = stratify(dataset)
    by_stratum: dict[StratumLabel, list[str]] = {s: [] for s in STRATUM_ORDER}
    for qid in sorted(strata):
        by_stratum[strata[qid]].append(qid)
    for stratum in STRATUM_ORDER:
        count = len(by_stratum[stratum])
        if count % n_folds != 0:
            raise ValueError(
                f"stratum {stratum.code} has {count} queries, not divisible "
                f"into {n_folds} folds")
    members: list[list[str]] = [[] for _ in range(n_folds)]
    for stratum in STRATUM_ORDER:
        ids = sorted(by_stratum[stratum])
        digest = hashlib.sha256(f"folds|{seed}|{stratum.code}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        rng.shuffle(ids)
        for i, qid in enumerate(ids):
            members[i % n_folds].append(qid)
    return [
        FoldAssignment(fold_id=i, members=tuple(sorted(ms)))
        for i, ms in enumerate(members)
    ]


def fold_rotation(n_folds: int = N_FOLDS) -> list[dict[str, object]]:
    """Test/validation/train fold ids for each cross-validation iteration;
    validation is the fold after the test fold, cyclically."""
    plan = []
    for test in range(n_folds):
        validation = (test + 1) % n_folds
        train = [f for f in range(n_folds) if f not in (test, validation)]
        plan.append({"test": test, "validation": validation, "train": train})
    return plan


def save_folds(path: str | Path, folds: Sequence[FoldAssignment], seed: int) -> None:
    payload = {
        "seed": seed,
        "n_folds": len(folds),
        "folds": [{"fold_id": f.fold_id, "members": list(f.members)} for f in folds],
        "rotation": fold_rotation(len(folds)),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_folds(path: str | Path) -> list[FoldAssignment]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    folds = [
        FoldAssignment(fold_id=int(f["fold_id"]), members=tuple(f["members"]))
        for f in sorted(payload["folds"], key=lambda f: f["fold_id"])
    ]
    if [f.fold_id for f in folds] != list(range(len(folds))):
        raise ValueError(f"fold ids in {path} are not contiguous from 0")
    return folds


@dataclass
class GroupStats:
    mean: float
    std: float
    count: int


def aggregate(per_query: Mapping[str, float],
              strata: Mapping[str, StratumLabel]) -> tuple[dict[str, GroupStats], list[str]]:
    """Unweighted group means with sample standard deviation.

    Returns ({group code -> stats, plus "Overall"}, notices) where notices
    name strata with no member queries (omitted from the stats).
    """
    if not per_query:
        raise ValueError("no per-query values to aggregate")
    stats: dict[str, GroupStats] = {}
    notices: list[str] = []
    for stratum in STRATUM_ORDER:
        values = [v for qid, v in per_query.items() if strata[qid] == stratum]
        if not values:
            notices.append(f"group {stratum.code} has no queries; omitted")
            continue
        stats[stratum.code] = _mean_std(values)
    stats["Overall"] = _mean_std(list(per_query.values()))
    return stats, notices


def _mean_std(values: list[float]) -> GroupStats:
    n = len(values)
    mean = sum(values) / n
    # sample (n-1) std; a single value has no spread to estimate
    std = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
    return GroupStats(mean=mean, std=std, count=n)


class Ranker:
    """Interface cross_validate drives.

    prepare_fold is called once per cross-validation iteration with the
    train and validation queries (baselines typically ignore them);
    rank_query must produce a RankedList for each test query.
    """

    name = "ranker"

    def prepare_fold(self, fold_id: int, train: list[ConceptQuery],
                     validation: list[ConceptQuery]) -> None:
        pass

    def rank_query(self, query: ConceptQuery) -> RankedList:
        raise NotImplementedError


@dataclass
class EvalReport:
    method: str
    k_values: tuple[int, ...]
    per_query: dict[str, dict[int, float]]      # query_id -> {k -> NDCG@k}
    strata: dict[str, StratumLabel]
    query_fold: dict[str, int]                  # query_id -> test fold
    fold_plan: list[dict[str, object]]          # test/validation/train ids
    notices: list[str] = field(default_factory=list)

    def group_stats(self, k: int) -> dict[str, GroupStats]:
        values = {qid: ks[k] for qid, ks in self.per_query.items()}
        stats, _ = aggregate(values, self.strata)
        return stats

    def overall_mean(self, k: int) -> float:
        return self.group_stats(k)["Overall"].mean


def cross_validate(dataset: Dataset, folds: Sequence[FoldAssignment],
                   ranker: Ranker,
                   k_values: Sequence[int] = DEFAULT_K_VALUES) -> EvalReport:
    """Evaluate a ranker over the fold rotation.

    Each query is scored exactly once, in the iteration where its fold is
    the test fold; the validation fold identity is recorded in the fold
    plan for downstream checkpoint selection.
    """
    by_id = {q.query_id: q for q in dataset.queries}
    fold_members = {f.fold_id: f.members for f in folds}
    assigned = [qid for f in folds for qid in f.members]
    if sorted(assigned) != sorted(by_id):
        raise ValueError("fold assignment does not partition the dataset's queries")
    plan = fold_rotation(len(folds))
    per_query: dict[str, dict[int, float]] = {}
    query_fold: dict[str, int] = {}
    for step in plan:
        test_fold = int(step["test"])  # type: ignore[arg-type]
        validation_fold = int(step["validation"])  # type: ignore[arg-type]
        train_ids = [qid for f in step["train"] for qid in fold_members[int(f)]]  # type: ignore[union-attr]
        ranker.prepare_fold(
            test_fold,
            [by_id[qid] for qid in train_ids],
            [by_id[qid] for qid in fold_members[validation_fold]],
        )
        for qid in fold_members[test_fold]:
            query = by_id[qid]
            ranked = ranker.rank_query(query)
            labels = query.labels_by_id()
            per_query[qid] = {k: ndcg(ranked, labels, k) for k in k_values}
            query_fold[qid] = test_fold
    strata = stratify(dataset)
    report = EvalReport(
        method=ranker.name, k_values=tuple(k_values), per_query=per_query,
        strata=strata, query_fold=query_fold, fold_plan=plan)
    for k in k_values:
        _, notices = aggregate({q: v[k] for q, v in per_query.items()}, strata)
        for n in notices:
            if n not in report.notices:
                report.notices.append(n)
    return report
