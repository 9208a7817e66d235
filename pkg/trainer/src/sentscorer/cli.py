"""Command line: train one setup across all folds and emit score files.

    sentscorer --data corpus.jsonl --folds folds.json --setup qry2snt \
        --out-dir scores/qry2snt [training overrides]

For each rotation entry in the folds file this trains a fresh model on
the train folds, selects the checkpoint by validation macro-F1, scores
the test fold, and writes scores/<setup>/fold<id>.tsv. Exit codes:
0 success, 1 malformed data, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from sentscorer.data import CorpusError, load_corpus, load_fold_plan
from sentscorer.examples import SETUPS, split_rotation
from sentscorer.model import ModelConfig
from sentscorer.scores import write_score_file
from sentscorer.train import TrainConfig, predict_proba, train_scorer


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentscorer",
        description="Train transformer sentence-value classifiers and "
                    "write per-fold score files.")
    parser.add_argument("--data", required=True, help="dataset file (JSONL)")
    parser.add_argument("--folds", required=True, help="folds file (JSON)")
    parser.add_argument("--setup", required=True, choices=SETUPS)
    parser.add_argument("--out-dir", required=True,
                        help="directory for fold<N>.tsv score files")
    parser.add_argument("--epochs", type=int, default=10)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--max-len", type=int, default=512)
    parser.add_argument("--lr", type=float, default=4e-5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--d-model", type=int, default=64)
    parser.add_argument("--n-heads", type=int, default=4)
    parser.add_argument("--n-layers", type=int, default=2)
    parser.add_argument("--d-ffn", type=int, default=128)
    parser.add_argument("--dropout", type=float, default=0.1)
    return parser


def run(args: argparse.Namespace) -> int:
    queries = load_corpus(args.data)
    plan = load_fold_plan(args.folds)
    known = {q.query_id for q in queries}
    for fold_id, members in plan.members.items():
        missing = [qid for qid in members if qid not in known]
        if missing:
            raise CorpusError(
                f"fold {fold_id} names queries absent from the dataset: "
                + ", ".join(missing[:5]))
    model_config = ModelConfig(
        d_model=args.d_model, n_heads=args.n_heads, n_layers=args.n_layers,
        d_ffn=args.d_ffn, dropout=args.dropout, max_len=args.max_len)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in plan.rotation:
        fold_id = entry["test"]
        train, val, test = split_rotation(queries, plan, entry, args.setup)
        config = TrainConfig(
            epochs=args.epochs, batch_size=args.batch_size,
            max_len=args.max_len, lr=args.lr,
            seed=args.seed * plan.n_folds + fold_id, model=model_config)
        scorer = train_scorer(train, val, config)
        probs = predict_proba(scorer, test)
        path = out_dir / f"fold{fold_id}.tsv"
        write_score_file(path, args.setup, fold_id,
                         [ex.sentence_id for ex in test], probs)
        best = scorer.history[scorer.best_epoch - 1]
        print(f"fold {fold_id}: {len(train)} train / {len(val)} val / "
              f"{len(test)} test examples, best epoch {scorer.best_epoch} "
              f"(val macro-F1 {best.val_macro_f1:.4f}) -> {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CorpusError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
