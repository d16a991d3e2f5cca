"""Hypercubic billiard words: generation, balance and bounded remainder sets."""

__version__ = "0.1.0"
