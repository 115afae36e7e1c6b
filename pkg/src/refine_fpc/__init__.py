"""Refinement types with a finitary fixpoint logic for an FPC-like language."""

__version__ = "0.1.0"
