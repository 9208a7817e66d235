"""Deterministic benchmark corpus generation.

The generator emits a fully synthetic collection whose aggregate shape
matches the published statistics the engine is validated against: 42
concept queries over 26,959 sentences, stratified 12/18/6/6 across the
small/large x sparse/dense grid, with per-query label mixes chosen so the
expected NDCG of a random permutation, and the measured NDCG of the BM25
baselines, land on known values.  Texts are synthetic legal-flavored word
soup; concept mentions correlate with sentence value, and case context
quality correlates with the value of the sentences it contains, so the
lexical baselines behave like they do on real data.

Everything is derived from fixed seeds: two calls produce identical
datasets.  The "tiny" profile is a 12-query / ~750-sentence miniature for
fast end-to-end runs (classifier training, smoke tests); its sentences
carry strong label-marker vocabulary so that supervised models can learn
the labels from text alone.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from lexsent.dataset import ConceptQuery, Dataset, SentenceRecord, save_canonical
from lexsent.labels import ValueLabel

PROFILES = ("released", "tiny")

# one marker pool per label value 0..3; markers never appear in queries,
# so they are invisible to BM25 but learnable by text classifiers
_MARKERS = (
    ("docket", "caption", "footnote", "syllabus", "headnote", "appendix"),
    ("mentions", "references", "touches", "alludes", "invokes", "echoes"),
    ("requires", "entails", "presupposes", "mandates", "prescribes", "obligates"),
    ("means", "denotes", "signifies", "encompasses", "connotes", "comprises"),
)

_FILLER = (
    "accordingly", "action", "additional", "address", "administrative",
    "affirmed", "agency", "alleged", "although", "amount", "analysis",
    "appeal", "appellant", "applied", "approach", "appropriate", "argument",
    "asserted", "authority", "basis", "because", "before", "behalf",
    "between", "board", "brief", "burden", "cause", "certain",
    "circuit", "circumstances", "cited", "civil", "claim", "clear",
    "commission", "committee", "complaint", "concluded", "conduct",
    "consider", "construed", "contends", "context", "continued", "counsel",
    "county", "course", "court", "decision", "defendant", "denied",
    "described", "determination", "determined", "dismissed", "disposition",
    "district", "doctrine", "during", "effect", "entered", "established",
    "evidence", "examined", "existence", "explained", "facts", "failure",
    "federal", "filed", "finding", "follows", "further", "general",
    "granted", "ground", "hearing", "history", "holding", "however",
    "initial", "instance", "instant", "issue", "judge", "judgment",
    "judicial", "jurisdiction", "justice", "language", "legislature",
    "liability", "litigation", "matter", "meaning", "moreover", "motion",
    "necessary", "nevertheless", "noted", "obligation", "opinion", "order",
    "ordinary", "panel", "particular", "party", "pending", "period",
    "person", "petitioner", "plaintiff", "pleading", "position", "practice",
    "precedent", "present", "principle", "proceeding", "process", "proper",
    "provided", "question", "reasoning", "rejected", "relevant", "relief",
    "remanded", "required", "respondent", "result", "review", "ruling",
    "specific", "standard", "submitted", "sufficient", "support", "supreme",
    "sustained", "theory", "therefore", "thereof", "tribunal", "under",
    "unless", "upon", "various", "warranted", "whether", "within", "without",
)

_STATUTE_WORDS = (
    "subsection", "paragraph", "clause", "chapter", "title", "article",
    "amendment", "enacted", "codified", "promulgated", "regulation",
    "directive", "schedule", "annex", "proviso", "recital",
)

_ADJ = (
    "aggregate", "ancillary", "appurtenant", "coastal", "collateral",
    "communal", "consequential", "customary", "derivative", "dominant",
    "equitable", "fiduciary", "foreseeable", "imminent", "incidental",
    "intangible", "material", "navigable", "negotiable", "nominal",
    "perishable", "preemptive", "proximate", "punitive", "residual",
    "riparian", "severable", "speculative", "subsidiary", "tangible",
    "territorial", "testamentary", "tortious", "transferable",
    "unconscionable", "vicarious", "voidable", "wrongful", "arable",
    "bailable", "chattel", "latent",
)

_NOUN = (
    "easement", "lien", "tenancy", "bailment", "estoppel", "covenant",
    "nuisance", "trespass", "conversion", "novation", "indemnity",
    "restitution", "rescission", "subrogation", "abandonment", "accession",
    "alienation", "annexation", "apportionment", "assumption", "attachment",
    "avoidance", "carriage", "consignment", "dedication", "detainer",
    "disclosure", "dominion", "emblements", "encroachment", "endorsement",
    "forfeiture", "garnishment", "impairment", "improvement", "inducement",
    "infringement", "livery", "merger", "occupancy", "partition", "usufruct",
)

_VAL_SCALE = {0: 0.0, 1: 0.1, 2: 0.5, 3: 1.0}  # val weights scaled to [0,1]


@dataclass(frozen=True)
class StratumKnobs:
    """Per-stratum text-generation intensities."""

    mention_base: float    # background concept-mention rate (Poisson)
    mention_gain: float    # added rate per unit of scaled value
    case_size: int         # target sentences per case
    assign_gamma: float    # value-to-case-quality assignment correlation
    ctx_base: float        # background concept rate in case texts
    ctx_gain: float        # added rate per unit of case quality
    marker_p: float        # chance the label's own marker is used


# label mixes per query: (stratum, count of rel 3, 2, 1, 0); chosen so the
# expected random-permutation NDCG matches the target group means
_RELEASED_MIX = (
    ("SmSp", 5, 17, 132, 26),
    ("SmSp", 2, 6, 160, 42),
    ("SmSp", 6, 19, 193, 22),
    ("SmSp", 6, 19, 213, 22),
    ("SmSp", 6, 19, 234, 21),
    ("SmSp", 6, 19, 255, 20),
    ("SmSp", 6, 19, 276, 19),
    ("SmSp", 6, 19, 296, 19),
    ("SmSp", 6, 19, 317, 18),
    ("SmSp", 6, 19, 348, 17),
    ("SmSp", 6, 19, 379, 16),
    ("SmSp", 6, 19, 410, 15),
    ("SmDs", 12, 43, 34, 11),
    ("SmDs", 9, 47, 38, 10),
    ("SmDs", 9, 45, 48, 6),
    ("SmDs", 8, 46, 51, 7),
    ("SmDs", 18, 32, 63, 3),
    ("SmDs", 8, 48, 59, 5),
    ("SmDs", 8, 51, 62, 5),
    ("SmDs", 15, 47, 67, 3),
    ("SmDs", 8, 58, 66, 6),
    ("SmDs", 9, 65, 66, 6),
    ("SmDs", 9, 69, 70, 6),
    ("SmDs", 10, 77, 69, 6),
    ("SmDs", 14, 71, 84, 3),
    ("SmDs", 11, 86, 82, 5),
    ("SmDs", 12, 90, 93, 3),
    ("SmDs", 12, 100, 101, 3),
    ("SmDs", 17, 103, 117, 3),
    ("SmDs", 27, 101, 141, 3),
    ("LgSp", 49, 48, 874, 518),
    ("LgSp", 49, 48, 1107, 596),
    ("LgSp", 49, 48, 1332, 671),
    ("LgSp", 49, 48, 1557, 746),
    ("LgSp", 49, 48, 1782, 821),
    ("LgSp", 49, 48, 2157, 946),
    ("LgDs", 91, 160, 563, 6),
    ("LgDs", 91, 208, 636, 5),
    ("LgDs", 91, 256, 709, 4),
    ("LgDs", 91, 304, 782, 3),
    ("LgDs", 91, 356, 848, 5),
    ("LgDs", 91, 404, 921, 4),
)

_RELEASED_KNOBS = {
    "SmSp": StratumKnobs(0.50, 0.70, 12, 4.0, 0.3, 2.4, 0.85),
    "SmDs": StratumKnobs(0.50, 0.45, 12, 4.0, 0.3, 2.4, 0.85),
    "LgSp": StratumKnobs(0.55, 0.62, 22, 5.0, 0.3, 2.6, 0.85),
    "LgDs": StratumKnobs(0.50, 0.48, 22, 5.0, 0.3, 2.6, 0.85),
}

# 6 sparse + 6 dense small queries, weak lexical signal, strong markers
_TINY_MIX = (
    ("SmSp", 2, 4, 14, 36),
    ("SmSp", 2, 5, 15, 38),
    ("SmSp", 3, 5, 16, 40),
    ("SmSp", 3, 6, 17, 42),
    ("SmSp", 2, 6, 18, 46),
    ("SmSp", 3, 7, 19, 47),
    ("SmDs", 10, 16, 14, 8),
    ("SmDs", 11, 17, 16, 8),
    ("SmDs", 12, 18, 16, 10),
    ("SmDs", 12, 19, 18, 11),
    ("SmDs", 13, 20, 19, 12),
    ("SmDs", 14, 21, 20, 13),
)

_TINY_KNOBS = {
    "SmSp": StratumKnobs(0.15, 0.25, 8, 2.0, 0.3, 1.0, 0.95),
    "SmDs": StratumKnobs(0.15, 0.25, 8, 2.0, 0.3, 1.0, 0.95),
}


def _rng(profile: str, query_id: str) -> np.random.Generator:
    digest = hashlib.sha256(f"corpus|{profile}|{query_id}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def _mix_table(profile: str):
    if profile == "released":
        return _RELEASED_MIX, _RELEASED_KNOBS
    if profile == "tiny":
        return _TINY_MIX, _TINY_KNOBS
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")


def _provision_text(rng: np.random.Generator, concept: str,
                    statute_words: np.ndarray) -> str:
    words = list(rng.choice(_FILLER, size=48))
    for w in statute_words:
        words.extend([str(w)] * 3)
    for _ in range(3):
        words.append(concept)
    order = rng.permutation(len(words))
    return " ".join(words[i] for i in order)


def _case_text(rng: np.random.Generator, concept: str, quality: float,
               statute_words: np.ndarray, knobs: StratumKnobs) -> str:
    words = list(rng.choice(_FILLER, size=46 + int(rng.poisson(18))))
    mentions = int(rng.poisson(knobs.ctx_base + knobs.ctx_gain * quality))
    for _ in range(mentions):
        words.append(concept)
    for w in statute_words:
        for _ in range(int(rng.poisson(0.3 + 2.2 * quality))):
            words.append(str(w))
    order = rng.permutation(len(words))
    return " ".join(words[i] for i in order)


def _sentence_text(rng: np.random.Generator, concept: str, label: int,
                   knobs: StratumKnobs) -> str:
    words = list(rng.choice(_FILLER, size=6 + int(rng.poisson(9))))
    if rng.random() < knobs.marker_p:
        pool = _MARKERS[label]
    else:
        pool = _MARKERS[int(rng.integers(0, 4))]
    words.append(pool[int(rng.integers(0, len(pool)))])
    mentions = int(rng.poisson(
        knobs.mention_base + knobs.mention_gain * _VAL_SCALE[label]))
    for _ in range(mentions):
        words.append(concept)
    order = rng.permutation(len(words))
    return " ".join(words[i] for i in order)


def build_reference(profile: str = "released", knobs_override=None) -> Dataset:
    """Generate the deterministic corpus for the given profile."""
    mix, knob_table = _mix_table(profile)
    if knobs_override is not None:
        knob_table = {**knob_table, **knobs_override}
    queries = []
    for qi, (stratum, n3, n2, n1, n0) in enumerate(mix):
        query_id = f"q{qi + 1:02d}"
        knobs = knob_table[stratum]
        rng = _rng(profile, query_id)
        concept = f"{_ADJ[qi]} {_NOUN[qi]}"
        statute_words = rng.choice(_STATUTE_WORDS, size=4, replace=False)
        provision = _provision_text(rng, concept, statute_words)

        labels = np.array([3] * n3 + [2] * n2 + [1] * n1 + [0] * n0)
        rng.shuffle(labels)
        n = len(labels)

        n_cases = max(3, n // knobs.case_size)
        quality = rng.random(n_cases)
        case_texts = [
            _case_text(rng, concept, quality[c], statute_words, knobs)
            for c in range(n_cases)
        ]
        # value-correlated case assignment
        case_of = np.empty(n, dtype=int)
        for i, label in enumerate(labels):
            w = np.exp(knobs.assign_gamma * quality * _VAL_SCALE[int(label)])
            case_of[i] = rng.choice(n_cases, p=w / w.sum())

        sentences = []
        for i, label in enumerate(labels):
            cid = int(case_of[i])
            sentences.append(SentenceRecord(
                sentence_id=f"{query_id}-s{i + 1:04d}",
                text=_sentence_text(rng, concept, int(label), knobs),
                label=ValueLabel(int(label)),
                case_id=f"{query_id}-c{cid + 1:03d}",
                case_text=case_texts[cid],
            ))
        queries.append(ConceptQuery(
            query_id=query_id, concept=concept, provision_text=provision,
            sentences=tuple(sentences)))
    return Dataset(queries=tuple(queries))


def write_reference(path, profile: str = "released") -> Dataset:
    """Generate the corpus and save it in the canonical line format."""
    ds = build_reference(profile)
    save_canonical(ds, path)
    return ds
