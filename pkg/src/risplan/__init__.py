"""LOS coverage planning, dimensioning and power analysis for RIS-assisted networks."""

from .propagation import DomainError, LinkModelParams, PathGeometry
from .scene import Building, GridSpec, Point3, Scene, SceneError, load_scene, segment_los

__all__ = [
    "Building",
    "DomainError",
    "GridSpec",
    "LinkModelParams",
    "PathGeometry",
    "Point3",
    "Scene",
    "SceneError",
    "load_scene",
    "segment_los",
]
__version__ = "0.1.0"
