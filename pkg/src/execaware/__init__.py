"""Execution-aware dataset construction and benchmarking toolchain."""

__version__ = "0.1.0"
