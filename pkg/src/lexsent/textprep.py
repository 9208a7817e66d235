"""Deterministic tokenization and normalization for indexing and BM25.

The analyzer is intentionally simple and fully documented so that every
run is reproducible without external linguistic resources.  Tokens are
whitespace-delimited words; punctuation stripping removes non-alphanumeric
characters inside each word rather than splitting on them, so the token
count never exceeds the whitespace word count of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class AnalyzerConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    stemmer: str = "light-suffix"  # "none" or "light-suffix"
    stopwords: Optional[frozenset[str]] = None

    def __post_init__(self) -> None:
        if self.stemmer not in ("none", "light-suffix"):
            raise ValueError(f"unknown stemmer {self.stemmer!r}")


def light_suffix_stem(word: str) -> str:
    """Strip a small set of English suffixes.

    Rules, applied in order (plural rules are mutually exclusive, the
    remaining ones apply sequentially to the result):

      1. ``-ies`` -> ``-y``  unless the word ends in ``eies``/``aies``
      2. ``-es``  -> ``-e``  unless the word ends in ``aes``/``ees``/``oes``
      3. ``-s``   dropped    unless the word ends in ``ss``/``us``/``is``
      4. ``-ing`` dropped    when at least 6 characters long
      5. ``-ed``  dropped    when at least 5 characters long
      6. final ``-e`` dropped when at least 4 characters long

    So "purposes" -> "purpose" -> "purpos" and "purpose" -> "purpos"
    collapse to the same stem, while short or sibilant-final words
    ("is", "business") pass through unchanged.
    """
    w = word
    if w.endswith("ies") and not w.endswith(("eies", "aies")):
        w = w[:-3] + "y"
    elif w.endswith("es") and not w.endswith(("aes", "ees", "oes")):
        w = w[:-1]
    elif w.endswith("s") and not w.endswith(("ss", "us", "is")):
        w = w[:-1]
    if w.endswith("ing") and len(w) >= 6:
        w = w[:-3]
    if w.endswith("ed") and len(w) >= 5:
        w = w[:-2]
    if w.endswith("e") and len(w) >= 4:
        w = w[:-1]
    return w


def analyze(text: str, config: AnalyzerConfig = AnalyzerConfig()) -> list[str]:
    """Turn raw text into a normalized token stream.

    Pure and deterministic for a given (text, config).  Empty input gives
    an empty stream; no empty-string tokens are ever emitted.  Stopwords
    are matched after lowercasing/punctuation stripping but before
    stemming.
    """
    tokens: list[str] = []
    for word in text.split():
        if config.strip_punctuation:
            word = "".join(ch for ch in word if ch.isalnum())
        if config.lowercase:
            word = word.lower()
        if not word:
            continue
        if config.stopwords is not None and word in config.stopwords:
            continue
        if config.stemmer == "light-suffix":
            word = light_suffix_stem(word)
        if word:
            tokens.append(word)
    return tokens
