"""Command-line entry point for the ranking benchmark.

Subcommands
-----------
validate-data    check a dataset file and print its size
index            build and cache per-query inverted indexes
rank             rank every query with one method, write a run file
folds            build stratified cross-validation folds
evaluate         cross-validated NDCG for one method, write CSV and report
significance     compare per-query CSVs of several methods
report           merge summary CSVs into one Markdown table
make-reference   generate the bundled benchmark corpus
validate-scores  check external score files against a dataset and folds

Relative paths are resolved against --workdir (default: the current
directory).  Options can also come from a JSON config file (--config,
a flat object keyed by option name); explicit flags win over the file.
Commands write the resolved option values next to their outputs so a
run can be reproduced exactly; identical options and seed produce
byte-identical output files.

Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from lexsent.dataset import Dataset, DatasetError, load_dataset
from lexsent.evaluation import (DEFAULT_K_VALUES, EvalReport, cross_validate,
                                fold_rotation, load_folds, make_folds,
                                save_folds, stratify)
from lexsent.index import build_case_index, build_sentence_index, \
    NoCaseContextError, save_index
from lexsent.methods import Bm25cRanker, Bm25Ranker, FixedRunRanker, \
    OracleRanker, RandomRanker, ScoreSetRanker, random_baseline_per_query
from lexsent.rankers import Bm25Params, CoverageError, read_run, write_run
from lexsent.reports import (read_per_query_csv, read_summary_csv, summarize,
                             write_markdown_report, write_per_query_csv,
                             write_significance_files, write_summary_csv)
from lexsent.scorer_io import ScoreFileError, load_scores, validate_fold_coverage
from lexsent.stats import RunMatrix, posthoc_pairwise
from lexsent.textprep import AnalyzerConfig


class UsageError(Exception):
    """Bad invocation (missing/contradictory options); exit code 2."""


def _resolve(workdir: str, path: str) -> Path:
    p = Path(path)
    return p if p.is_absolute() else Path(workdir) / p


def _merge_options(args: argparse.Namespace, defaults: dict) -> dict:
    """Resolve each option as: explicit flag > config file > default."""
    config = {}
    if args.config is not None:
        cfg_path = _resolve(args.workdir, args.config)
        try:
            config = json.loads(cfg_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise UsageError(f"config file {cfg_path}: invalid JSON ({e})") from None
        if not isinstance(config, dict):
            raise UsageError(f"config file {cfg_path}: expected a JSON object")
    merged = {}
    for dest, default in defaults.items():
        value = getattr(args, dest)
        if value is None:
            value = config.get(dest, default)
        merged[dest] = value
    return merged


def _require(opts: dict, *names: str) -> None:
    missing = [n for n in names if opts[n] is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join(f"--{n.replace('_', '-')}" for n in missing))


def _write_resolved_config(path: Path, command: str, opts: dict) -> None:
    payload = {"command": command}
    payload.update(sorted(opts.items()))
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _load(opts: dict, workdir: str) -> Dataset:
    return load_dataset(_resolve(workdir, opts["data"]), format=opts["format"])


def _parse_ks(raw) -> tuple[int, ...]:
    ks = tuple(int(k) for k in raw)
    if not ks or any(k < 1 for k in ks):
        raise UsageError("cutoffs must be positive integers")
    return ks


def _print_dataset_size(dataset: Dataset) -> None:
    print(f"{len(dataset.queries)} queries / {dataset.total_sentences:,} sentences")


def cmd_validate_data(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {"data": None, "format": "canonical"})
    _require(opts, "data")
    dataset = _load(opts, args.workdir)
    _print_dataset_size(dataset)
    return 0


def cmd_make_reference(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {"profile": "released", "out": None})
    _require(opts, "out")
    from lexsent.reference import write_reference
    out = _resolve(args.workdir, opts["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    dataset = write_reference(out, profile=opts["profile"])
    _write_resolved_config(Path(str(out) + ".config.json"), "make-reference", opts)
    _print_dataset_size(dataset)
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {"data": None, "format": "canonical", "out": None})
    _require(opts, "data", "out")
    dataset = _load(opts, args.workdir)
    out = _resolve(args.workdir, opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    config = AnalyzerConfig()
    with_context = 0
    for query in dataset.queries:
        save_index(build_sentence_index(query, config),
                   out / f"sent_{query.query_id}.json")
        try:
            case_index, _ = build_case_index(query, config)
        except NoCaseContextError:
            continue
        save_index(case_index, out / f"case_{query.query_id}.json")
        with_context += 1
    _write_resolved_config(out / "resolved_config.json", "index", opts)
    print(f"indexed {len(dataset.queries)} queries "
          f"({with_context} with case context)")
    return 0


def _bm25_params(opts: dict) -> Bm25Params:
    return Bm25Params(k1=float(opts["k1"]), b=float(opts["b"]))


def cmd_rank(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {
        "data": None, "format": "canonical", "ranker": None, "out": None,
        "seed": 0, "lam": 0.5, "k1": 1.2, "b": 0.0,
    })
    _require(opts, "data", "ranker", "out")
    dataset = _load(opts, args.workdir)
    name = opts["ranker"]
    if name == "random":
        ranker = RandomRanker(seed=int(opts["seed"]))
    elif name == "oracle":
        ranker = OracleRanker()
    elif name == "bm25":
        ranker = Bm25Ranker(params=_bm25_params(opts))
    elif name == "bm25c":
        try:
            lam = float(opts["lam"])
        except (TypeError, ValueError):
            raise UsageError("rank needs a numeric --lam; tuning requires "
                             "folds, use the evaluate command") from None
        ranker = Bm25cRanker(params=_bm25_params(opts), lam=lam)
    else:
        raise UsageError(f"unknown ranker {name!r}")
    ranked = [ranker.rank_query(q) for q in dataset.queries]
    out = _resolve(args.workdir, opts["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    write_run(out, ranked)
    _write_resolved_config(Path(str(out) + ".config.json"), "rank", opts)
    print(f"ranked {len(ranked)} queries with {name}")
    return 0


def cmd_folds(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {"data": None, "format": "canonical",
                                 "seed": 0, "out": None})
    _require(opts, "data", "out")
    dataset = _load(opts, args.workdir)
    folds = make_folds(dataset, seed=int(opts["seed"]))
    out = _resolve(args.workdir, opts["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    save_folds(out, folds, seed=int(opts["seed"]))
    _write_resolved_config(Path(str(out) + ".config.json"), "folds", opts)
    sizes = " ".join(str(len(f.members)) for f in folds)
    print(f"{len(folds)} folds of sizes {sizes}")
    return 0


def _load_score_files(scores_dir: Path) -> dict[int, object]:
    paths = sorted(scores_dir.glob("*.tsv"))
    if not paths:
        raise UsageError(f"no .tsv score files in {scores_dir}")
    by_fold = {}
    setups = set()
    for path in paths:
        sf = load_scores(path)
        if sf.fold_id in by_fold:
            raise ScoreFileError(
                f"two score files claim fold {sf.fold_id} in {scores_dir}")
        by_fold[sf.fold_id] = sf
        setups.add(sf.setup_name)
    if len(setups) != 1:
        raise ScoreFileError(
            f"score files in {scores_dir} mix setups: {sorted(setups)}")
    return by_fold


def _check_score_coverage(dataset: Dataset, folds, by_fold: dict) -> None:
    plan = fold_rotation(len(folds))
    for entry in plan:
        fold_id = entry["test"]
        if fold_id not in by_fold:
            raise CoverageError(f"no score file for fold {fold_id}")
        test_queries = [dataset.query(qid)
                        for qid in folds[fold_id].members]
        validate_fold_coverage(by_fold[fold_id], test_queries)


def cmd_evaluate(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {
        "data": None, "format": "canonical", "ranker": None, "out": None,
        "folds": None, "seed": 0, "seeds": 1, "lam": "tune",
        "k1": 1.2, "b": 0.0, "scores": None, "run": None,
        "k": None, "method_name": None,
    })
    _require(opts, "data", "ranker", "out")
    dataset = _load(opts, args.workdir)
    k_values = _parse_ks(opts["k"]) if opts["k"] else DEFAULT_K_VALUES
    if opts["folds"]:
        folds = load_folds(_resolve(args.workdir, opts["folds"]))
    else:
        folds = make_folds(dataset, seed=int(opts["seed"]))
    name = opts["ranker"]
    tuned_ranker = None
    if name == "random":
        report = _random_report(dataset, folds, k_values,
                                seed=int(opts["seed"]),
                                n_seeds=int(opts["seeds"]))
    else:
        if name == "oracle":
            ranker = OracleRanker()
        elif name == "bm25":
            ranker = Bm25Ranker(params=_bm25_params(opts))
        elif name == "bm25c":
            lam = opts["lam"]
            lam = lam if lam == "tune" else float(lam)
            ranker = Bm25cRanker(params=_bm25_params(opts), lam=lam)
            tuned_ranker = ranker
        elif name == "scores":
            _require(opts, "scores")
            by_fold = _load_score_files(_resolve(args.workdir, opts["scores"]))
            _check_score_coverage(dataset, folds, by_fold)
            ranker = ScoreSetRanker(by_fold)
        elif name == "run":
            _require(opts, "run")
            runs = read_run(_resolve(args.workdir, opts["run"]))
            ranker = FixedRunRanker(runs, name="run")
        else:
            raise UsageError(f"unknown ranker {name!r}")
        if opts["method_name"]:
            ranker.name = opts["method_name"]
        report = cross_validate(dataset, folds, ranker, k_values=k_values)
    if opts["method_name"]:
        report.method = opts["method_name"]
    out = _resolve(args.workdir, opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_per_query_csv(out / "per_query.csv", report)
    summary = summarize(report)
    write_summary_csv(out / "summary.csv", summary)
    write_markdown_report(out / "report.md", [summary])
    _write_resolved_config(out / "resolved_config.json", "evaluate", opts)
    if tuned_ranker is not None and tuned_ranker.tuned_lambdas:
        tuned = "  ".join(f"fold{f}={v:g}" for f, v
                          in sorted(tuned_ranker.tuned_lambdas.items()))
        print(f"tuned lambda: {tuned}")
    for notice in report.notices:
        print(f"notice: {notice}", file=sys.stderr)
    for k in k_values:
        print(f"{report.method} ndcg@{k} overall = {report.overall_mean(k):.6f}")
    return 0


def _random_report(dataset: Dataset, folds, k_values, seed: int,
                   n_seeds: int) -> EvalReport:
    """Analytic-speed random baseline: averages permutations per query."""
    per_query_by_k = random_baseline_per_query(
        dataset, k_values=k_values, n_seeds=n_seeds, base_seed=seed)
    per_query: dict[str, dict[int, float]] = {}
    for k, by_qid in per_query_by_k.items():
        for qid, value in by_qid.items():
            per_query.setdefault(qid, {})[k] = value
    query_fold = {qid: f.fold_id for f in folds for qid in f.members}
    return EvalReport(method="random", k_values=tuple(k_values),
                      per_query=per_query, strata=stratify(dataset),
                      query_fold=query_fold,
                      fold_plan=fold_rotation(len(folds)))


def cmd_significance(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {
        "per_query": None, "out": None, "k": None, "alpha": 0.05,
        "control": None, "all_pairs": None,
    })
    _require(opts, "per_query", "out")
    paths = opts["per_query"]
    if isinstance(paths, str):
        paths = [paths]
    if len(paths) < 2:
        raise UsageError("significance needs at least two per-query files")
    tables = [read_per_query_csv(_resolve(args.workdir, p)) for p in paths]
    k = int(opts["k"]) if opts["k"] else 100
    names = [t.method for t in tables]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate method names across inputs: {names}")
    queries = sorted(tables[0].values)
    for t in tables[1:]:
        if sorted(t.values) != queries:
            only_first = sorted(set(tables[0].values) - set(t.values))
            only_other = sorted(set(t.values) - set(tables[0].values))
            raise ValueError(
                f"methods {names[0]!r} and {t.method!r} scored different "
                f"query sets; only in first: {only_first[:5]}, "
                f"only in second: {only_other[:5]}")
    for t in tables:
        if k not in t.k_values:
            raise ValueError(f"method {t.method!r} has no ndcg@{k} column")
    values = [[t.values[qid][k] for t in tables] for qid in queries]
    matrix = RunMatrix(methods=tuple(names), queries=tuple(queries),
                       values=tuple(tuple(row) for row in values))
    control = opts["control"] or names[0]
    sig = posthoc_pairwise(matrix, control=control,
                           alpha=float(opts["alpha"]),
                           all_pairs=bool(opts["all_pairs"]))
    out = _resolve(args.workdir, opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_significance_files(out, sig)
    _write_resolved_config(out / "resolved_config.json", "significance", opts)
    sys.stdout.write((out / "significance.txt").read_text(encoding="utf-8"))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {"summaries": None, "out": None})
    _require(opts, "summaries", "out")
    paths = opts["summaries"]
    if isinstance(paths, str):
        paths = [paths]
    summaries = [read_summary_csv(_resolve(args.workdir, p)) for p in paths]
    out = _resolve(args.workdir, opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_markdown_report(out / "report.md", summaries)
    _write_resolved_config(out / "resolved_config.json", "report", opts)
    print(f"wrote report for {len(summaries)} method(s)")
    return 0


def cmd_validate_scores(args: argparse.Namespace) -> int:
    opts = _merge_options(args, {"data": None, "format": "canonical",
                                 "folds": None, "scores": None})
    _require(opts, "data", "folds", "scores")
    dataset = _load(opts, args.workdir)
    folds = load_folds(_resolve(args.workdir, opts["folds"]))
    by_fold = _load_score_files(_resolve(args.workdir, opts["scores"]))
    _check_score_coverage(dataset, folds, by_fold)
    setup = next(iter(by_fold.values())).setup_name
    print(f"ok: setup {setup!r} covers {len(by_fold)} fold(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexsent",
        description="Rank case-law sentences by usefulness for explaining "
                    "statutory concepts; evaluate with graded-relevance NDCG.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--workdir", default=".",
                       help="base directory for relative paths")
        p.add_argument("--config", default=None,
                       help="JSON file with option defaults (flags win)")

    def data_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", default=None, help="dataset file")
        p.add_argument("--format", default=None,
                       choices=["canonical", "upstream-adapter"],
                       help="dataset format (default canonical)")

    p = sub.add_parser("validate-data", help="check a dataset file")
    common(p)
    data_opts(p)
    p.set_defaults(func=cmd_validate_data)

    p = sub.add_parser("make-reference", help="generate the bundled corpus")
    common(p)
    p.add_argument("--profile", default=None, choices=["released", "tiny"])
    p.add_argument("--out", default=None, help="output dataset file")
    p.set_defaults(func=cmd_make_reference)

    p = sub.add_parser("index", help="build per-query inverted indexes")
    common(p)
    data_opts(p)
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("rank", help="rank every query once, write a run file")
    common(p)
    data_opts(p)
    p.add_argument("--ranker", default=None,
                   choices=["random", "oracle", "bm25", "bm25c"])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lam", default=None, help="context mix weight")
    p.add_argument("--k1", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--out", default=None, help="output run file (TSV)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("folds", help="build stratified cross-validation folds")
    common(p)
    data_opts(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output folds file (JSON)")
    p.set_defaults(func=cmd_folds)

    p = sub.add_parser("evaluate", help="cross-validated NDCG for one method")
    common(p)
    data_opts(p)
    p.add_argument("--ranker", default=None,
                   choices=["random", "oracle", "bm25", "bm25c", "scores", "run"])
    p.add_argument("--folds", default=None, help="folds file from the folds command")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None,
                   help="random ranker: average over this many seeds")
    p.add_argument("--lam", default=None,
                   help="context mix weight, a number or 'tune'")
    p.add_argument("--k1", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--scores", default=None,
                   help="directory of score files (ranker=scores)")
    p.add_argument("--run", default=None, help="run file (ranker=run)")
    p.add_argument("--k", action="append", type=int, default=None,
                   help="NDCG cutoff, repeatable (default 10 and 100)")
    p.add_argument("--method-name", default=None,
                   help="override the method name in outputs")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("significance",
                       help="compare methods from per-query CSV files")
    common(p)
    p.add_argument("--per-query", dest="per_query", action="append",
                   default=None, help="per-query CSV, repeat per method")
    p.add_argument("--k", type=int, default=None,
                   help="cutoff to compare at (default 100)")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--control", default=None,
                   help="control method (default: first file's method)")
    p.add_argument("--all-pairs", dest="all_pairs", action="store_true",
                   default=None, help="compare every pair, not just vs control")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("report", help="merge summary CSVs into one table")
    common(p)
    p.add_argument("--summaries", action="append", default=None,
                   help="summary CSV, repeat per method")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate-scores",
                       help="check score files against a dataset and folds")
    common(p)
    data_opts(p)
    p.add_argument("--folds", default=None, help="folds file")
    p.add_argument("--scores", default=None, help="directory of score files")
    p.set_defaults(func=cmd_validate_scores)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except IsADirectoryError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (DatasetError, ScoreFileError, CoverageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
