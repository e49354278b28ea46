"""Exact computations with double Burnside rings, fusion systems and their Hecke algebras."""

from __future__ import annotations

__version__ = "0.1.0"
