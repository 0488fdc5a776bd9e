"""Constrained multiobjective differential evolution with an epsilon-level schedule."""

__version__ = "0.1.0"
