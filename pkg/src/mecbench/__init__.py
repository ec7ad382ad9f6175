"""Robustness benchmarking of discrete-feature classifiers by exact
minimal-evasion-cost search over cost-weighted monotone edit lattices."""

__version__ = "0.1.0"
