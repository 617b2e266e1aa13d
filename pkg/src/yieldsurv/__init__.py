"""Survival analysis of driver speed-reduction time at a zebra crossing."""

__version__ = "0.1.0"
