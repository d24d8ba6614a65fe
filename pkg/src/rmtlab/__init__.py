"""Exact combinatorics, small-case oracles, and Monte Carlo checks for
trace and entry statistics of large random symmetric matrices."""

__version__ = "0.1.0"
