"""Transformer classifiers over sentence-value labels, packaged as a
score-file producer for the companion ranking pipeline."""

__version__ = "0.1.0"
