"""Wordle difficulty: word features, Beta difficulty scores and Bayesian daily-report models."""

__version__ = "0.1.0"
