"""Exact enumeration of graphic degree sequences, the random-walk
reformulation behind it, and numerical estimation of the growth constants."""

__version__ = "0.1.0"
