"""File contract for plugging external classifiers into the ranker.

A score file delivers one 4-class probability distribution per sentence.
The format (bit-exact, also documented in docs/score_file_format.md):

  line 1:  ``# setup=<setup_name> fold=<fold_id>``  (single spaces)
  line 2+: ``<sentence_id>\t<p_no>\t<p_potential>\t<p_certain>\t<p_high>``

Probabilities are written with at least 6 decimal places, are
non-negative, and sum to 1 within 1e-4.  Class order matches the ranking
weight vector (no, potential, certain, high) = (0, 1, 2, 3).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from lexsent.dataset import ConceptQuery
from lexsent.rankers import CoverageError, RankedList, classifier_expected_value, \
    InvalidDistributionError, rank

_HEADER_RE = re.compile(r"^# setup=(\S+) fold=(\d+)$")


class ScoreFileError(ValueError):
    """Malformed score file; message carries file/line context."""


@dataclass(frozen=True)
class ScoreRecord:
    sentence_id: str
    p: tuple[float, float, float, float]


@dataclass(frozen=True)
class ScoreFile:
    setup_name: str
    fold_id: int
    records: tuple[ScoreRecord, ...]

    def by_id(self) -> dict[str, ScoreRecord]:
        return {r.sentence_id: r for r in self.records}


def load_scores(path: str | Path) -> ScoreFile:
    """Load and validate a score file; violations report line numbers."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"score file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        m = _HEADER_RE.match(header)
        if not m:
            raise ScoreFileError(
                f"{path}:1: bad header {header!r}; expected "
                f"'# setup=<name> fold=<int>'")
        setup_name, fold_id = m.group(1), int(m.group(2))
        records: list[ScoreRecord] = []
        seen: set[str] = set()
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ScoreFileError(
                    f"{path}:{lineno}: expected 5 tab-separated fields, "
                    f"got {len(parts)}")
            sid = parts[0]
            if sid in seen:
                raise ScoreFileError(f"{path}:{lineno}: duplicate sentence_id {sid!r}")
            seen.add(sid)
            try:
                p = tuple(float(x) for x in parts[1:])
            except ValueError:
                raise ScoreFileError(
                    f"{path}:{lineno}: non-numeric probability") from None
            try:
                classifier_expected_value(p)
            except InvalidDistributionError as e:
                raise ScoreFileError(f"{path}:{lineno}: {e}") from None
            records.append(ScoreRecord(sentence_id=sid, p=p))  # type: ignore[arg-type]
    return ScoreFile(setup_name=setup_name, fold_id=fold_id, records=tuple(records))


def write_scores(path: str | Path, sf: ScoreFile) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"# setup={sf.setup_name} fold={sf.fold_id}\n")
        for r in sf.records:
            fh.write(r.sentence_id + "\t"
                     + "\t".join(f"{x:.8f}" for x in r.p) + "\n")


def validate_fold_coverage(sf: ScoreFile, test_queries: list[ConceptQuery]) -> None:
    """Check that a score file covers its test fold exactly.

    Every sentence of every test query must be scored exactly once, and
    every record must belong to some test query; both directions are
    reported together at join time.
    """
    expected: set[str] = set()
    for q in test_queries:
        expected.update(q.sentence_ids())
    got = {r.sentence_id for r in sf.records}
    missing = sorted(expected - got)
    unknown = sorted(got - expected)
    problems = []
    if missing:
        problems.append(f"{len(missing)} uncovered sentence id(s): "
                        + ", ".join(missing[:10])
                        + (" ..." if len(missing) > 10 else ""))
    if unknown:
        problems.append(f"{len(unknown)} unknown sentence id(s): "
                        + ", ".join(unknown[:10])
                        + (" ..." if len(unknown) > 10 else ""))
    if problems:
        raise CoverageError(
            f"score file {sf.setup_name!r} fold {sf.fold_id}: "
            + "; ".join(problems))


def scores_to_ranking(query: ConceptQuery, sf: ScoreFile) -> RankedList:
    """Rank a query by expected ordinal value of each record's distribution.

    The score file must cover the query's sentences exactly; missing or
    unknown ids are reported together at join time.
    """
    by_id = sf.by_id()
    expected = set(query.sentence_ids())
    missing = sorted(expected - set(by_id))
    if missing:
        raise CoverageError(
            f"score file {sf.setup_name!r} fold {sf.fold_id} misses "
            f"{len(missing)} sentence(s) of query {query.query_id!r}: "
            + ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else ""))
    scores = {
        sid: classifier_expected_value(by_id[sid].p) for sid in expected
    }
    return rank(query, scores)
