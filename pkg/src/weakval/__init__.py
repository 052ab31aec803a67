"""Bidirectional weak values and state-conditioned effective operators."""

__version__ = "0.1.0"
