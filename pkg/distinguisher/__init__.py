"""Constant-probability distinguishers: samplers, exact verification and applications."""

__version__ = "1.0.0"
