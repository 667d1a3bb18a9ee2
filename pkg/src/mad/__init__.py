"""Decompilation pipeline for Move smart-contract bytecode artifacts."""

__version__ = "0.1.0"
