"""Numerical toolkit for Fourier extremal problems tied to prime gaps."""
from __future__ import annotations

__version__ = "0.1.0"
