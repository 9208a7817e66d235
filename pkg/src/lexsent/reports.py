"""Result serialization: per-query CSV, group-summary CSV, Markdown tables,
and significance reports.  All writers emit byte-identical output for
identical inputs: rows are explicitly ordered and floats fixed-format.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from lexsent.evaluation import STRATUM_ORDER, EvalReport, GroupStats
from lexsent.stats import SignificanceReport

_GROUP_ORDER = tuple(s.code for s in STRATUM_ORDER) + ("Overall",)


def write_per_query_csv(path, report: EvalReport) -> None:
    ks = list(report.k_values)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "query_id", "stratum", "fold"]
                        + [f"ndcg@{k}" for k in ks])
        for qid in sorted(report.per_query):
            writer.writerow(
                [report.method, qid, report.strata[qid].code,
                 report.query_fold.get(qid, -1)]
                + [f"{report.per_query[qid][k]:.6f}" for k in ks])


@dataclass
class PerQueryTable:
    """A method's per-query metric values as read back from CSV."""

    method: str
    k_values: tuple[int, ...]
    values: dict[str, dict[int, float]]   # query_id -> {k -> NDCG@k}
    strata: dict[str, str]
    folds: dict[str, int]


def read_per_query_csv(path) -> PerQueryTable:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:4] != ["method", "query_id", "stratum", "fold"]:
            raise ValueError(f"{path}: not a per-query metrics file")
        ks = []
        for column in header[4:]:
            if not column.startswith("ndcg@"):
                raise ValueError(f"{path}: unexpected column {column!r}")
            ks.append(int(column[len("ndcg@"):]))
        methods = set()
        values: dict[str, dict[int, float]] = {}
        strata: dict[str, str] = {}
        folds: dict[str, int] = {}
        for row in reader:
            if not row:
                continue
            methods.add(row[0])
            qid = row[1]
            strata[qid] = row[2]
            folds[qid] = int(row[3])
            values[qid] = {k: float(cell) for k, cell in zip(ks, row[4:])}
        if len(methods) != 1:
            raise ValueError(
                f"{path}: expected exactly one method, found {sorted(methods)}")
        if not values:
            raise ValueError(f"{path}: no data rows")
        return PerQueryTable(method=methods.pop(), k_values=tuple(ks),
                             values=values, strata=strata, folds=folds)


@dataclass
class MethodSummary:
    """Group means/stds for one method, keyed group code -> k -> stats."""

    method: str
    k_values: tuple[int, ...]
    cells: dict[str, dict[int, GroupStats]]


def summarize(report: EvalReport) -> MethodSummary:
    cells: dict[str, dict[int, GroupStats]] = {}
    for k in report.k_values:
        for group, stats in report.group_stats(k).items():
            cells.setdefault(group, {})[k] = stats
    return MethodSummary(method=report.method, k_values=tuple(report.k_values),
                         cells=cells)


def write_summary_csv(path, summary: MethodSummary) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "group", "k", "mean", "std", "count"])
        for group in _GROUP_ORDER:
            if group not in summary.cells:
                continue
            for k in summary.k_values:
                s = summary.cells[group][k]
                writer.writerow([summary.method, group, k,
                                 f"{s.mean:.6f}", f"{s.std:.6f}", s.count])


def read_summary_csv(path) -> MethodSummary:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["method", "group", "k", "mean", "std", "count"]:
            raise ValueError(f"{path}: not a summary file")
        methods = set()
        cells: dict[str, dict[int, GroupStats]] = {}
        ks: list[int] = []
        for row in reader:
            if not row:
                continue
            methods.add(row[0])
            k = int(row[2])
            if k not in ks:
                ks.append(k)
            cells.setdefault(row[1], {})[k] = GroupStats(
                mean=float(row[3]), std=float(row[4]), count=int(row[5]))
        if len(methods) != 1:
            raise ValueError(
                f"{path}: expected exactly one method, found {sorted(methods)}")
        return MethodSummary(method=methods.pop(), k_values=tuple(ks), cells=cells)


def _cell(stats: GroupStats | None) -> str:
    if stats is None:
        return "n/a"
    return f"{stats.mean:.2f}+-{stats.std:.2f}"


def render_markdown(summaries: Sequence[MethodSummary]) -> str:
    """One row per method, one column per (group, k) pair."""
    if not summaries:
        raise ValueError("nothing to report")
    ks = summaries[0].k_values
    for s in summaries:
        if s.k_values != ks:
            raise ValueError("summaries evaluated at different cutoffs")
    groups = [g for g in _GROUP_ORDER if any(g in s.cells for s in summaries)]
    header = ["Method"] + [f"{g} @{k}" for g in groups for k in ks]
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    for s in summaries:
        row = [s.method]
        for g in groups:
            for k in ks:
                row.append(_cell(s.cells.get(g, {}).get(k)))
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def write_markdown_report(path, summaries: Sequence[MethodSummary]) -> None:
    Path(path).write_text(render_markdown(summaries), encoding="utf-8")


def render_significance(report: SignificanceReport) -> str:
    lines = [
        f"friedman chi2 = {report.friedman_statistic:.6f}",
        f"friedman p = {report.friedman_p:.6f}",
        f"iman davenport F = {report.iman_davenport:.6f}"
        if report.iman_davenport != float("inf") else "iman davenport F = inf",
        "average ranks: " + "  ".join(
            f"{m}={r:.4f}" for m, r in zip(report.methods, report.average_ranks)),
        f"alpha = {report.alpha:g}",
    ]
    for pc in report.pairwise:
        verdict = "reject" if pc.reject else "accept"
        lines.append(f"{pc.pair[0]} vs {pc.pair[1]}: z = {pc.z:+.4f}  "
                     f"raw p = {pc.raw_p:.6f}  {verdict}")
    return "\n".join(lines) + "\n"


def write_significance_files(out_dir, report: SignificanceReport) -> None:
    out = Path(out_dir)
    with open(out / "significance.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method_a", "method_b", "z", "raw_p", "reject"])
        for pc in report.pairwise:
            writer.writerow([pc.pair[0], pc.pair[1], f"{pc.z:.6f}",
                             f"{pc.raw_p:.6f}", int(pc.reject)])
    (out / "significance.txt").write_text(
        render_significance(report), encoding="utf-8")
