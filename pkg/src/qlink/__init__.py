"""Feasibility models for satellite quantum key distribution links."""

__version__ = "0.1.0"
