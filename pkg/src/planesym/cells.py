"""Proper unit cells and fundamental-domain placement.

A proper unit cell is anchored so that the designated rotation-center
classes sit on its corners / edges / center:

  p6, p6m   corners on the (unique) six-fold centers
  p4, p4m   corners on one four-fold class
  p4g       corners on four-fold centers, with a four-fold at cell center
  cmm       evaluated on the primitive (rhombic) cell: one two-fold class
            on the corners, a second on edge midpoints, a third at center

The generator recipes anchor the origin at a highest-order rotation center,
so these rules hold by construction; this module exposes them as data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups as grp
from .geometry import Isometry2
from .lattice import Lattice


@dataclass(frozen=True)
class SpecialPoint:
    """Rotation center inside the cell, pattern coordinates."""

    order: int
    position: np.ndarray       # pattern coords
    fractional: np.ndarray     # conventional-cell fractional coords
    class_id: int


@dataclass(frozen=True)
class SpecialAxis:
    """Mirror or glide line inside the cell, pattern coordinates."""

    kind: str                  # "mirror" | "glide"
    point: np.ndarray          # pattern coords of a point on the axis
    direction: np.ndarray      # pattern coords direction (unnormalized)
    shift: float | None        # glide shift in pattern units, None for mirror


@dataclass(frozen=True)
class UnitCellSpec:
    group: grp.WallpaperGroup
    lattice: Lattice
    fd_polygon: np.ndarray             # fractional vertices
    fd_copies: tuple[Isometry2, ...]   # point-group-order placements
    special_points: tuple[SpecialPoint, ...]
    special_axes: tuple[SpecialAxis, ...]

    def fd_polygon_pattern(self) -> np.ndarray:
        """FD polygon vertices in pattern coordinates."""
        return self.lattice.to_pattern(self.fd_polygon)

    def primitive_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Primitive lattice vectors (half-diagonals for centered groups)."""
        a, b = self.lattice.a, self.lattice.b
        if self.group.centered:
            return (a + b) / 2.0, (a - b) / 2.0
        return a.copy(), b.copy()

    def primitive_cell_area(self) -> float:
        p, q = self.primitive_basis()
        return abs(float(p[0] * q[1] - p[1] * q[0]))

    def fd_area_pattern(self) -> float:
        poly = self.fd_polygon_pattern()
        x, y = poly[:, 0], poly[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def proper_unit_cell(group: grp.WallpaperGroup | str, lattice: Lattice) -> UnitCellSpec:
    """Deterministic proper-cell description for (group, lattice)."""
    if isinstance(group, str):
        group = grp.get_group(group)
    grp.require_compatible(group, lattice)
    copies = tuple(grp.to_pattern_isometry(op, lattice) for op in group.ops)
    pts = []
    for feat in grp.cell_rotation_centers(group):
        pos = lattice.to_pattern(feat.position.reshape(1, 2))[0]
        pts.append(SpecialPoint(feat.order, pos, feat.position.copy(), feat.class_id))
    axes = []
    for feat in grp.cell_axes(group):
        pt = lattice.to_pattern(feat.axis_point.reshape(1, 2))[0]
        d = lattice.to_pattern(feat.axis_dir.reshape(1, 2))[0]
        shift = None if feat.shift is None else feat.shift * float(np.hypot(*d))
        axes.append(SpecialAxis(feat.kind, pt, d, shift))
    return UnitCellSpec(
        group=group,
        lattice=lattice,
        fd_polygon=group.fd_polygon.copy(),
        fd_copies=copies,
        special_points=tuple(pts),
        special_axes=tuple(axes),
    )
