"""Significance testing of k ranking methods over N queries.

Friedman's rank test provides the omnibus decision; pairwise follow-ups
compare each method against a control through rank-difference z scores
whose p-values pass through Holm-Bonferroni step-down correction.  Tail
probabilities are evaluated from the regularized incomplete gamma
function (series / continued fraction) and the complementary error
function, accurate well past the 1e-6 verification target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_GAMMA_EPS = 1e-15
_GAMMA_MAX_ITER = 500


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by power series (x < a+1)."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_GAMMA_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by Lentz continued
    fraction (x >= a+1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_q(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a), the upper tail, for a > 0, x >= 0."""
    if a <= 0.0:
        raise ValueError("shape parameter must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_gamma_series(a, x)
    return _upper_gamma_cf(a, x)


def chi2_sf(x: float, df: int) -> float:
    """Survival function of the chi-square distribution."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x < 0.0:
        raise ValueError("chi-square statistic must be non-negative")
    return regularized_gamma_q(df / 2.0, x / 2.0)


def normal_sf(z: float) -> float:
    """Upper tail of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_two_sided_p(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


@dataclass(frozen=True)
class RunMatrix:
    """Per-query metric values for k methods: values[i][j] is query i
    under method j."""

    methods: tuple[str, ...]
    queries: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        k, n = len(self.methods), len(self.queries)
        if k < 2 or n < 2:
            raise ValueError("need at least 2 methods and 2 queries")
        if len(set(self.methods)) != k:
            raise ValueError("method names must be unique")
        if values.shape != (n, k):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"{n} queries x {k} methods")
        if not np.all(np.isfinite(values)):
            raise ValueError("run matrix has missing or non-finite cells")


def _row_ranks(row: np.ndarray) -> np.ndarray:
    """Ranks within a row, 1 = best (highest value); ties get the average
    of the ranks they span."""
    order = np.argsort(-row, kind="stable")
    ranks = np.empty(len(row), dtype=float)
    i = 0
    while i < len(row):
        j = i
        while j + 1 < len(row) and row[order[j + 1]] == row[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for idx in range(i, j + 1):
            ranks[order[idx]] = avg
        i = j + 1
    return ranks


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    p_value: float
    average_ranks: tuple[float, ...]
    iman_davenport: float


def friedman_test(matrix: RunMatrix) -> FriedmanResult:
    """Friedman chi-square over per-row ranks (rank 1 = best method).

    chi2_F = 12N/(k(k+1)) * (sum R_j^2 - k(k+1)^2/4) with p from the
    chi-square distribution on k-1 degrees of freedom.  The Iman-Davenport
    F correction (N-1)chi2/(N(k-1) - chi2) is reported alongside; it is
    infinite when rankings agree perfectly on every row.
    """
    n, k = matrix.values.shape
    ranks = np.vstack([_row_ranks(row) for row in matrix.values])
    avg_ranks = ranks.mean(axis=0)
    chi2 = 12.0 * n / (k * (k + 1)) * (
        float(np.sum(avg_ranks ** 2)) - k * (k + 1) ** 2 / 4.0)
    chi2 = max(chi2, 0.0)  # guard tiny negative float error on constant rows
    p = chi2_sf(chi2, k - 1)
    denom = n * (k - 1) - chi2
    iman_davenport = math.inf if denom <= 0.0 else (n - 1) * chi2 / denom
    return FriedmanResult(
        statistic=chi2, p_value=p,
        average_ranks=tuple(float(r) for r in avg_ranks),
        iman_davenport=iman_davenport)


def holm_bonferroni(raw_p: Sequence[float], alpha: float) -> list[bool]:
    """Step-down decisions, returned in the input order.

    P-values are visited smallest first against thresholds alpha/(m-i+1);
    the first failure stops the procedure and everything from there on is
    accepted.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    for p in raw_p:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p!r} outside [0, 1]")
    m = len(raw_p)
    decisions = [False] * m
    order = sorted(range(m), key=lambda i: raw_p[i])
    for step, idx in enumerate(order, start=1):
        if raw_p[idx] <= alpha / (m - step + 1):
            decisions[idx] = True
        else:
            break
    return decisions


@dataclass(frozen=True)
class PairwiseComparison:
    pair: tuple[str, str]
    z: float
    raw_p: float
    reject: bool


@dataclass(frozen=True)
class SignificanceReport:
    methods: tuple[str, ...]
    friedman_statistic: float
    friedman_p: float
    iman_davenport: float
    average_ranks: tuple[float, ...]
    alpha: float
    pairwise: tuple[PairwiseComparison, ...]


def posthoc_pairwise(matrix: RunMatrix, control: str, alpha: float = 0.05,
                     all_pairs: bool = False) -> SignificanceReport:
    """Rank-difference z tests with Holm-Bonferroni corrected decisions.

    Default mode compares every method against the control; all_pairs
    compares each unordered pair.  z = (R_a - R_b) / sqrt(k(k+1)/(6N)).
    """
    if control not in matrix.methods:
        raise ValueError(f"control {control!r} is not one of the methods")
    fr = friedman_test(matrix)
    n, k = matrix.values.shape
    se = math.sqrt(k * (k + 1) / (6.0 * n))
    rank_of = dict(zip(matrix.methods, fr.average_ranks))
    if all_pairs:
        pairs = [(a, b) for i, a in enumerate(matrix.methods)
                 for b in matrix.methods[i + 1:]]
    else:
        pairs = [(control, m) for m in matrix.methods if m != control]
    zs = [(rank_of[a] - rank_of[b]) / se for a, b in pairs]
    raw_ps = [normal_two_sided_p(z) for z in zs]
    decisions = holm_bonferroni(raw_ps, alpha)
    pairwise = tuple(
        PairwiseComparison(pair=pair, z=z, raw_p=p, reject=rej)
        for pair, z, p, rej in zip(pairs, zs, raw_ps, decisions))
    return SignificanceReport(
        methods=matrix.methods, friedman_statistic=fr.statistic,
        friedman_p=fr.p_value, iman_davenport=fr.iman_davenport,
        average_ranks=fr.average_ranks, alpha=alpha, pairwise=pairwise)
