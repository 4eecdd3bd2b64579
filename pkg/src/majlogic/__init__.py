"""Majority-logic LDPC decoding with data-dependent XOR gate failures."""

__version__ = "0.1.0"
