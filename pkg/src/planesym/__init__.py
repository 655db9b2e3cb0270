"""planesym: plane-symmetry engine.

Generates periodic ornaments from fundamental domains under the 17
wallpaper groups, detects and classifies the symmetry group of raster
ornaments, and provides the survey-analytics pipeline (rankings, rank
distances, similarity matrices, low-dimensional embedding) plus a live
survey service.
"""

from .geometry import AxisLine, Isometry2, classify_isometry, compose
from .groups import CATALOG, GROUP_NAMES, WallpaperGroup, get_group, orbit
from .lattice import Lattice, make_lattice

__all__ = [
    "AxisLine",
    "Isometry2",
    "classify_isometry",
    "compose",
    "CATALOG",
    "GROUP_NAMES",
    "WallpaperGroup",
    "get_group",
    "orbit",
    "Lattice",
    "make_lattice",
]

__version__ = "0.1.0"
