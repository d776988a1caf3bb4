"""Recurrence analysis for discrete chemical reaction networks."""

__version__ = "0.1.0"
