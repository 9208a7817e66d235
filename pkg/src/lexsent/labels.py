"""The four-level sentence utility labels and their text forms."""

from __future__ import annotations

import enum


class ValueLabel(enum.IntEnum):
    """Utility of a sentence for explaining a statutory concept.

    The integer values are the ordinal codes used both as NDCG gains and as
    the classifier weight vector, so the total order NO_VALUE <
    POTENTIAL_VALUE < CERTAIN_VALUE < HIGH_VALUE comes for free.
    """

    NO_VALUE = 0
    POTENTIAL_VALUE = 1
    CERTAIN_VALUE = 2
    HIGH_VALUE = 3


LABEL_TEXT = {
    ValueLabel.NO_VALUE: "no value",
    ValueLabel.POTENTIAL_VALUE: "potential value",
    ValueLabel.CERTAIN_VALUE: "certain value",
    ValueLabel.HIGH_VALUE: "high value",
}

_TEXT_TO_LABEL = {text: label for label, text in LABEL_TEXT.items()}


class UnknownLabelError(ValueError):
    """Raised when a label string is not one of the four known categories."""


def parse_label(text: str) -> ValueLabel:
    """Parse a label string (case-insensitive, whitespace-tolerant)."""
    key = " ".join(text.strip().lower().split())
    try:
        return _TEXT_TO_LABEL[key]
    except KeyError:
        allowed = ", ".join(repr(t) for t in LABEL_TEXT.values())
        raise UnknownLabelError(
            f"unknown label {text!r}; expected one of {allowed}"
        ) from None


def label_text(label: ValueLabel) -> str:
    return LABEL_TEXT[ValueLabel(label)]
