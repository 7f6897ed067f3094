"""Congestion phase diagrams of timed discrete-event systems with priorities."""

__version__ = "0.1.0"
