"""Krippendorff's alpha over the four-level value labels.

Implemented from the coincidence-matrix definition: alpha = 1 - D_o/D_e
where D_o is observed and D_e expected disagreement.  Two distance
metrics: nominal (0/1) and ordinal, which here uses squared differences of
the ordinal codes 0..3 because the labels are explicitly graded.
"""

from __future__ import annotations

from collections import defaultdict

from lexsent.dataset import AnnotationTable


class DegenerateAgreementError(ValueError):
    """Observed and expected disagreement are both zero: single label only."""


def _distance(metric: str, a: int, b: int) -> float:
    if metric == "nominal":
        return 0.0 if a == b else 1.0
    if metric == "ordinal":
        return float((a - b) ** 2)
    raise ValueError(f"unknown metric {metric!r}")


def krippendorff_alpha(table: AnnotationTable, metric: str = "nominal") -> float:
    """Inter-annotator agreement in [-1, 1]; 1.0 for perfect agreement.

    Requires at least one item rated by two or more annotators and at
    least two distinct labels overall; raises DegenerateAgreementError
    when only a single label appears (alpha is undefined there).
    """
    units: dict[str, list[int]] = defaultdict(list)
    annotators = set()
    for item_id, annotator_id, label in table.items:
        units[item_id].append(int(label))
        annotators.add(annotator_id)
    pairable = {u: vals for u, vals in units.items() if len(vals) >= 2}
    if len(annotators) < 2 or not pairable:
        raise ValueError("need at least 2 annotators sharing at least 1 item")

    # coincidence matrix: each ordered pair within a unit adds 1/(m_u - 1)
    coincidence: dict[tuple[int, int], float] = defaultdict(float)
    n_values = 0
    for vals in pairable.values():
        m = len(vals)
        n_values += m
        w = 1.0 / (m - 1)
        for i, a in enumerate(vals):
            for j, b in enumerate(vals):
                if i != j:
                    coincidence[(a, b)] += w

    marginals: dict[int, float] = defaultdict(float)
    for (a, _), count in coincidence.items():
        marginals[a] += count
    if len(marginals) < 2:
        raise DegenerateAgreementError("degenerate: single label")

    d_observed = sum(
        count * _distance(metric, a, b) for (a, b), count in coincidence.items()
    ) / n_values
    d_expected = sum(
        na * nb * _distance(metric, a, b)
        for a, na in marginals.items()
        for b, nb in marginals.items()
    ) / (n_values * (n_values - 1))
    if d_expected == 0.0:
        raise DegenerateAgreementError("degenerate: single label")
    return 1.0 - d_observed / d_expected
