"""Acceptance gate: one test per headline requirement.

Every test prints a [PASS] or [FAIL] line naming its criterion, then
asserts it.  Run with ``pytest tests/test_acceptance.py -v -s`` to see
the lines; a plain run shows the same information as test outcomes.

Criteria covered, with tolerances:

  1. corpus size      42 queries / 26,959 sentences, strata 12/18/6/6
  2. fold composition 6 folds, each 2 SmSp + 3 SmDs + 1 LgSp + 1 LgDs
  3. random baseline  overall NDCG@100 = 0.63 +- 0.03 over >= 1000
                      permutation seeds, under 2 minutes
  4. sentence BM25    cross-validated overall NDCG@100 = 0.68 +- 0.04,
                      under 5 minutes
  5. context mix      tuned-lambda overall NDCG@100 = 0.70 +- 0.04,
                      under 5 minutes, and not worse than sentence BM25
  6. metric checks    brute-force NDCG validation finishes in under
                      1 minute
  7. statistics       rank test chi2 = 6.0 exactly and p = 0.0498
                      +- 1e-3 on the canonical 3x3 matrix; step-down
                      decisions match hand fixtures; normal tail
                      matches frozen high-precision values to 1e-6
  8. determinism      two identical evaluate commands write
                      byte-identical CSV and Markdown outputs
  9. score files      hand-written score files drive a full evaluation
                      with no trained model involved
 10. command line     the shipped corpus reports its released size
"""

import itertools
import math
import time
from collections import Counter
from pathlib import Path

import pytest

from lexsent import cli
from lexsent.evaluation import (cross_validate, fold_rotation, load_folds,
                                ndcg_from_rels, stratify)
from lexsent.methods import Bm25cRanker, Bm25Ranker, ScoreSetRanker, \
    random_baseline_per_query
from lexsent.scorer_io import load_scores, validate_fold_coverage
from lexsent.stats import RunMatrix, friedman_test, holm_bonferroni, normal_sf

pytestmark = pytest.mark.acceptance

FIXTURES = Path(__file__).resolve().parent / "fixtures"

RANDOM_TARGET, RANDOM_TOL = 0.63, 0.03
BM25_TARGET, BM25_TOL = 0.68, 0.04
BM25C_TARGET, BM25C_TOL = 0.70, 0.04


def _criterion(label: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}"
    if detail:
        line += f": {detail}"
    print(line)
    assert ok, line


def test_corpus_size_and_strata(released):
    sentences = released.total_sentences
    strata = Counter(stratify(released).values())
    by_code = {code.value: n for code, n in strata.items()}
    ok = (len(released.queries) == 42 and sentences == 26959
          and by_code == {"SmSp": 12, "SmDs": 18, "LgSp": 6, "LgDs": 6})
    _criterion("corpus size and strata", ok,
               f"{len(released.queries)} queries / {sentences:,} sentences, "
               f"strata {by_code}")


def test_fold_composition(released, released_folds):
    strata = stratify(released)
    expected = {"SmSp": 2, "SmDs": 3, "LgSp": 1, "LgDs": 1}
    per_fold = []
    for fold in released_folds:
        mix = Counter(strata[qid].value for qid in fold.members)
        per_fold.append(dict(mix))
    ok = len(released_folds) == 6 and all(m == expected for m in per_fold)
    _criterion("fold composition", ok,
               f"6 folds, each {expected}" if ok else f"got {per_fold}")


def test_random_baseline_level_and_budget(released):
    start = time.perf_counter()
    by_k = random_baseline_per_query(released, k_values=(100,), n_seeds=1000)
    elapsed = time.perf_counter() - start
    values = list(by_k[100].values())
    overall = sum(values) / len(values)
    ok = (abs(overall - RANDOM_TARGET) <= RANDOM_TOL) and elapsed < 120
    _criterion("random baseline overall NDCG@100", ok,
               f"{overall:.4f} (target {RANDOM_TARGET} +- {RANDOM_TOL}), "
               f"1000 seeds in {elapsed:.1f}s (budget 120s)")


def test_bm25_level_and_budget(released, released_folds):
    start = time.perf_counter()
    report = cross_validate(released, released_folds, Bm25Ranker(),
                            k_values=(10, 100))
    elapsed = time.perf_counter() - start
    overall = report.overall_mean(100)
    ok = (abs(overall - BM25_TARGET) <= BM25_TOL) and elapsed < 300
    _criterion("sentence BM25 overall NDCG@100", ok,
               f"{overall:.4f} (target {BM25_TARGET} +- {BM25_TOL}) "
               f"in {elapsed:.1f}s (budget 300s)")


def test_bm25_context_mix_level_and_budget(released, released_folds):
    start = time.perf_counter()
    plain = cross_validate(released, released_folds, Bm25Ranker(),
                           k_values=(100,)).overall_mean(100)
    ranker = Bm25cRanker(lam="tune")
    report = cross_validate(released, released_folds, ranker,
                            k_values=(10, 100))
    elapsed = time.perf_counter() - start
    overall = report.overall_mean(100)
    ok = (abs(overall - BM25C_TARGET) <= BM25C_TOL
          and overall >= plain and elapsed < 300)
    lams = {f: round(v, 2) for f, v in sorted(ranker.tuned_lambdas.items())}
    _criterion("context-mix BM25 overall NDCG@100", ok,
               f"{overall:.4f} (target {BM25C_TARGET} +- {BM25C_TOL}, "
               f"sentence-only {plain:.4f}) in {elapsed:.1f}s, "
               f"tuned lambdas {lams}")


def test_metric_brute_force_budget():
    start = time.perf_counter()
    checked = 0
    for rels in [(3, 2, 1, 0), (0, 0, 1, 3, 2), (2, 2, 3, 0, 1, 1),
                 (1, 0, 0, 0, 0, 3), (3, 3, 3, 3), (0, 1, 2, 3, 3, 2)]:
        for k in range(1, len(rels) + 1):
            best = max(
                sum(g / math.log2(i + 2) for i, g in enumerate(perm[:k]))
                for perm in itertools.permutations(rels))
            got = sum(g / math.log2(i + 2)
                      for i, g in enumerate(rels[:k]))
            expected = got / best if best > 0 else 1.0
            assert ndcg_from_rels(list(rels), k=k) == \
                pytest.approx(expected, rel=1e-12)
            checked += 1
    elapsed = time.perf_counter() - start
    ok = elapsed < 60 and checked >= 30
    _criterion("brute-force metric validation", ok,
               f"{checked} cutoff cases in {elapsed:.1f}s (budget 60s)")


def test_statistics_fixtures():
    matrix = RunMatrix(methods=("A", "B", "C"),
                       queries=("q1", "q2", "q3"),
                       values=((0.9, 0.5, 0.1),
                               (0.8, 0.6, 0.2),
                               (0.7, 0.5, 0.3)))
    result = friedman_test(matrix)
    chi2_ok = abs(result.statistic - 6.0) < 1e-12
    p_ok = abs(result.p_value - math.exp(-3)) < 1e-3
    holm_ok = (holm_bonferroni([0.01, 0.04, 0.03], alpha=0.05)
               == [True, False, False])
    tail_ok = (abs(normal_sf(5.0) / 2.8665157187919391e-7 - 1) < 1e-6
               and abs(normal_sf(1.0) - 0.15865525393145705) < 1e-6)
    ok = chi2_ok and p_ok and holm_ok and tail_ok
    _criterion("statistics fixtures", ok,
               f"chi2 = {result.statistic:.6f} (want 6), "
               f"p = {result.p_value:.6f} "
               f"(want {math.exp(-3):.6f} +- 1e-3), step-down and normal "
               f"tail checks {'pass' if holm_ok and tail_ok else 'FAIL'}")


def test_pipeline_determinism(tmp_path, capsys):
    data = tmp_path / "tiny.jsonl"
    assert cli.main(["make-reference", "--profile", "tiny",
                     "--out", str(data)]) == 0
    folds = tmp_path / "folds.json"
    assert cli.main(["folds", "--data", str(data),
                     "--out", str(folds)]) == 0
    outputs = []
    for name in ["first", "second"]:
        out_dir = tmp_path / name
        assert cli.main(["evaluate", "--data", str(data), "--ranker", "bm25",
                         "--folds", str(folds), "--out", str(out_dir)]) == 0
        outputs.append(out_dir)
    capsys.readouterr()
    same = all((outputs[0] / f).read_bytes() == (outputs[1] / f).read_bytes()
               for f in ["per_query.csv", "summary.csv", "report.md"])
    _criterion("byte-identical reruns", same,
               "per_query.csv, summary.csv and report.md identical "
               "across two evaluate runs")


def test_score_files_stand_alone():
    from lexsent.dataset import load_canonical
    dataset = load_canonical(FIXTURES / "mini.jsonl")
    folds = load_folds(FIXTURES / "mini_folds.json")
    by_fold = {}
    for path in sorted((FIXTURES / "scores").glob("*.tsv")):
        sf = load_scores(path)
        by_fold[sf.fold_id] = sf
    for entry in fold_rotation(len(folds)):
        test_queries = [dataset.query(qid)
                        for qid in folds[entry["test"]].members]
        validate_fold_coverage(by_fold[entry["test"]], test_queries)
    report = cross_validate(dataset, folds, ScoreSetRanker(by_fold),
                            k_values=(10,))
    reversed_ndcg = ndcg_from_rels([0, 1, 2, 3], k=10)
    ok = (report.per_query["q1"][10] == pytest.approx(reversed_ndcg)
          and all(report.per_query[q][10] == 1.0
                  for q in ["q2", "q3", "q4", "q5", "q6"]))
    _criterion("score files drive evaluation stand-alone", ok,
               f"6 hand-written fold files, q1 reversed -> "
               f"{report.per_query['q1'][10]:.4f}, others 1.0")


def test_cli_reports_released_size(tmp_path, capsys):
    out = tmp_path / "released.jsonl"
    code = cli.main(["make-reference", "--profile", "released",
                     "--out", str(out)])
    captured = capsys.readouterr()
    ok = code == 0 and captured.out == "42 queries / 26,959 sentences\n"
    _criterion("command line reports released corpus size", ok,
               captured.out.strip())
