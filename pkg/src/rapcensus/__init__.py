"""Enumeration of compact right-angled hyperbolic polyhedra by volume."""

from __future__ import annotations

__version__ = "0.1.0"
