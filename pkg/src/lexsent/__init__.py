"""Ranking and evaluation of case-law sentences that explain statutory concepts.

The package covers the full pipeline: loading the labeled corpus, building
per-query inverted indexes, producing ranked sentence lists (random, BM25,
BM25-c, classifier-probability rankers), graded-relevance NDCG evaluation
under richness-stratified 6-fold cross-validation, and Friedman /
Holm-Bonferroni significance testing.  External classifiers plug in through
a line-based score-file contract (see ``lexsent.scorer_io``).
"""

from lexsent.labels import ValueLabel

__all__ = ["ValueLabel"]
__version__ = "0.1.0"
