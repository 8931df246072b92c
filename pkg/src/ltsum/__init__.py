"""Trace-preserving summaries of one component of a synchronized LTS system."""

__version__ = "0.1.0"
