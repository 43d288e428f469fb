"""Exact combinatorial Floer homology of curves on square-tiled surfaces through correspondences."""

from .correspondence import Correspondence, compose, compose_left, diagonal
from .curves import ImmersedCurve, Locator, fiber_product
from .floer import build_cf, homology, twisted_differential
from .surface import SquareTiledSurface, build_surface, torus

__version__ = "0.1.0"

__all__ = ["Correspondence", "ImmersedCurve", "Locator", "SquareTiledSurface", "build_cf",
           "build_surface", "compose", "compose_left", "diagonal", "fiber_product", "homology",
           "torus", "twisted_differential"]
