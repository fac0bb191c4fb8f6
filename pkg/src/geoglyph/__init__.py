"""geoglyph: a deterministic geo-infographic engine.

Compiles a declarative spec (base map, encoding channels, labels,
highlights) plus region/topical data into SVG.
"""
from .pipeline import RenderResult, render

__all__ = ["render", "RenderResult"]
__version__ = "0.1.0"
