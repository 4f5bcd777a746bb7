"""Feedback-driven linear-optical quantum reservoir computing simulator."""

__version__ = "0.1.0"
