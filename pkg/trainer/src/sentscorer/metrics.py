"""Classification metrics used for checkpoint selection."""

from __future__ import annotations

from collections.abc import Sequence

from sentscorer.model import N_CLASSES


def macro_f1(y_true: Sequence[int], y_pred: Sequence[int],
             n_classes: int = N_CLASSES) -> float:
    """Unweighted mean F1 over all n_classes classes.

    A class with no true and no predicted members contributes 0, so the
    score rewards models that cover the whole label scheme rather than
    quietly dropping rare classes from the average.
    """
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred differ in length")
    if not y_true:
        raise ValueError("no predictions to score")
    total = 0.0
    for c in range(n_classes):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall:
            total += 2 * precision * recall / (precision + recall)
    return total / n_classes
