"""Small builders for hand-crafted datasets used across the test modules."""

from __future__ import annotations

from lexsent.dataset import ConceptQuery, Dataset, SentenceRecord
from lexsent.labels import ValueLabel


def make_query(query_id="q1", labels=(3, 2, 1, 0), concept="good faith",
               texts=None, case_ids=None, case_texts=None,
               provision_text=None) -> ConceptQuery:
    """Build a query whose i-th sentence has the i-th label.

    Defaults give every sentence the same case with no case_text; pass
    per-sentence lists to control cases and texts.
    """
    sentences = []
    for i, lab in enumerate(labels):
        text = texts[i] if texts is not None else f"sentence {i + 1} about {concept}"
        case_id = case_ids[i] if case_ids is not None else f"{query_id}-c1"
        case_text = case_texts[i] if case_texts is not None else None
        sentences.append(SentenceRecord(
            sentence_id=f"{query_id}-s{i + 1}",
            text=text,
            label=ValueLabel(lab),
            case_id=case_id,
            case_text=case_text,
        ))
    return ConceptQuery(
        query_id=query_id,
        concept=concept,
        provision_text=provision_text or f"the statute defines {concept}",
        sentences=tuple(sentences),
    )


def make_dataset(*queries: ConceptQuery) -> Dataset:
    return Dataset(queries=tuple(queries))
