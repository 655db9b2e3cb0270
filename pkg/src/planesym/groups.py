"""Catalog of the 17 wallpaper groups.

Each group stores its point-ops-with-translations as affine maps in
fractional (lattice) coordinates of the conventional cell: f -> M f + t
with integer M and rational t, taken modulo integer translations.  The two
centered groups (cm, cmm) additionally carry the (1/2, 1/2) centering, so
their op count per conventional cell is twice the point-group order.

Rotations, mirror axes and glide axes inside the cell are derived from the
op tables algebraically (fixed-point analysis), not hand-tabled.

Documentation constants: allowing color permutations, a two-colored plane
pattern falls into one of 46 groups and a three-colored one into one of 23;
these counts are recorded here for reference only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lattice as lat
from .errors import IncompatibleLatticeError
from .geometry import GEOMETRIC_TOL, Isometry2

TWO_COLOR_GROUP_COUNT = 46
THREE_COLOR_GROUP_COUNT = 23

GROUP_NAMES = ("p1", "pm", "pg", "cm", "p2", "pmm", "pmg", "pgg", "cmm",
               "p3", "p3m1", "p31m", "p4", "p4m", "p4g", "p6", "p6m")

_I = ((1, 0), (0, 1))
_N = ((-1, 0), (0, -1))
_SV = ((-1, 0), (0, 1))    # mirror, axis along b
_SH = ((1, 0), (0, -1))    # mirror, axis along a
_R4 = ((0, -1), (1, 0))
_R4C = ((0, 1), (-1, 0))
_S = ((0, 1), (1, 0))      # mirror along a+b
_SM = ((0, -1), (-1, 0))   # mirror along a-b
_R6 = ((1, -1), (1, 0))
_R3 = ((0, -1), (1, -1))
_R3S = ((-1, 1), (-1, 0))  # R3^2
_H = Fraction(1, 2)


def _mm(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2))
                 for i in range(2))


_P3M1_MIRRORS = (_SM, _mm(_R3, _SM), _mm(_R3S, _SM))
_P31M_MIRRORS = (_S, _mm(_R3, _S), _mm(_R3S, _S))
_P6_ROTS = (_I, _R6, _R3, _N, _R3S, _mm(_N, _R3))  # R6^k for k = 0..5

_ZERO = (Fraction(0), Fraction(0))
_HALF_A = (_H, Fraction(0))
_HALF_B = (Fraction(0), _H)
_HALF_AB = (_H, _H)

# (matrix, translation) per group; identity first (it owns the FD).
_OP_TABLES = {
    "p1": [(_I, _ZERO)],
    "p2": [(_I, _ZERO), (_N, _ZERO)],
    "pm": [(_I, _ZERO), (_SV, _ZERO)],
    "pg": [(_I, _ZERO), (_SV, _HALF_B)],
    "cm": [(_I, _ZERO), (_SV, _ZERO)],
    "pmm": [(_I, _ZERO), (_N, _ZERO), (_SV, _ZERO), (_SH, _ZERO)],
    "pmg": [(_I, _ZERO), (_N, _ZERO), (_SV, _HALF_A), (_SH, _HALF_A)],
    "pgg": [(_I, _ZERO), (_N, _ZERO), (_SV, _HALF_AB), (_SH, _HALF_AB)],
    "cmm": [(_I, _ZERO), (_N, _ZERO), (_SV, _ZERO), (_SH, _ZERO)],
    "p4": [(_I, _ZERO), (_R4, _ZERO), (_N, _ZERO), (_R4C, _ZERO)],
    "p4m": [(_I, _ZERO), (_R4, _ZERO), (_N, _ZERO), (_R4C, _ZERO),
            (_SV, _ZERO), (_SH, _ZERO), (_S, _ZERO), (_SM, _ZERO)],
    "p4g": [(_I, _ZERO), (_R4, _ZERO), (_N, _ZERO), (_R4C, _ZERO),
            (_SV, _HALF_AB), (_SH, _HALF_AB), (_S, _HALF_AB), (_SM, _HALF_AB)],
    "p3": [(_I, _ZERO), (_R3, _ZERO), (_R3S, _ZERO)],
    "p3m1": [(_I, _ZERO), (_R3, _ZERO), (_R3S, _ZERO)]
            + [(m, _ZERO) for m in _P3M1_MIRRORS],
    "p31m": [(_I, _ZERO), (_R3, _ZERO), (_R3S, _ZERO)]
            + [(m, _ZERO) for m in _P31M_MIRRORS],
    "p6": [(m, _ZERO) for m in _P6_ROTS],
    "p6m": [(m, _ZERO) for m in _P6_ROTS]
           + [(_mm(r, _SM), _ZERO) for r in _P6_ROTS],
}

_T3 = Fraction(1, 3)
_FD_POLYGONS = {
    "p1": ((0, 0), (1, 0), (1, 1), (0, 1)),
    "p2": ((0, 0), (_H, 0), (_H, 1), (0, 1)),
    "pm": ((0, 0), (_H, 0), (_H, 1), (0, 1)),
    "pg": ((0, 0), (_H, 0), (_H, 1), (0, 1)),
    "cm": ((0, 0), (_H, 0), (_H, _H), (0, _H)),
    "pmm": ((0, 0), (_H, 0), (_H, _H), (0, _H)),
    "pmg": ((0, 0), (Fraction(1, 4), 0), (Fraction(1, 4), 1), (0, 1)),
    "pgg": ((0, 0), (_H, 0), (_H, _H), (0, _H)),
    "cmm": ((0, 0), (Fraction(1, 4), 0), (Fraction(1, 4), _H), (0, _H)),
    "p4": ((0, 0), (_H, 0), (_H, _H), (0, _H)),
    "p4m": ((0, 0), (_H, 0), (_H, _H)),
    "p4g": ((0, 0), (_H, 0), (0, _H)),
    "p3": ((0, 0), (_T3, -_T3), (1, 0), (2 * _T3, _T3)),
    "p3m1": ((0, 0), (_T3, -_T3), (2 * _T3, _T3)),
    "p31m": ((0, 0), (1, 0), (2 * _T3, _T3)),
    "p6": ((0, 0), (1, 0), (2 * _T3, _T3)),
    "p6m": ((0, 0), (_H, 0), (2 * _T3, _T3)),
}

_CENTERED = {"cm", "cmm"}

_LATTICE_OF = {
    "p1": lat.OBLIQUE, "p2": lat.OBLIQUE,
    "pm": lat.RECTANGULAR, "pg": lat.RECTANGULAR,
    "cm": lat.CENTERED_RECTANGULAR,
    "pmm": lat.RECTANGULAR, "pmg": lat.RECTANGULAR, "pgg": lat.RECTANGULAR,
    "cmm": lat.CENTERED_RECTANGULAR,
    "p4": lat.SQUARE, "p4m": lat.SQUARE, "p4g": lat.SQUARE,
    "p3": lat.HEXAGONAL, "p3m1": lat.HEXAGONAL, "p31m": lat.HEXAGONAL,
    "p6": lat.HEXAGONAL, "p6m": lat.HEXAGONAL,
}

# lattice classes accepted when instantiating each group; the group's own
# class is always allowed, plus any higher-symmetry specialization
_ACCEPTED_CLASSES = {
    lat.OBLIQUE: set(lat.LATTICE_CLASSES),
    lat.RECTANGULAR: {lat.RECTANGULAR, lat.SQUARE},
    lat.CENTERED_RECTANGULAR: {lat.CENTERED_RECTANGULAR, lat.SQUARE, lat.HEXAGONAL,
                               lat.RECTANGULAR},
    lat.SQUARE: {lat.SQUARE},
    lat.HEXAGONAL: {lat.HEXAGONAL},
}


def _mirror_direction(M: np.ndarray) -> np.ndarray:
    """Integer +1 eigenvector (axis direction) of a det=-1 fractional op."""
    for p, q in ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (-1, 2)):
        d = np.array([p, q], float)
        if np.allclose(M @ d, d):
            return d
    raise ValueError(f"no small integer axis direction for {M}")


@dataclass(frozen=True)
class GroupOp:
    """One coset op in fractional coordinates: f -> matrix @ f + trans."""

    matrix: np.ndarray      # 2x2 integer
    trans: np.ndarray       # length 2, components in {0, 1/4, 1/3, 1/2, ...}
    name: str

    def apply(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f, float) @ self.matrix.T + self.trans

    def inverse_affine(self) -> tuple[np.ndarray, np.ndarray]:
        Minv = np.linalg.inv(self.matrix)
        return Minv, -(Minv @ self.trans)


@dataclass(frozen=True)
class WallpaperGroup:
    """Catalog entry for one of the 17 groups."""

    name: str
    lattice_class: str
    highest_rotation_order: int
    has_mirror: bool
    has_glide: bool
    point_group_order: int
    centered: bool
    ops: tuple[GroupOp, ...]          # one per point-group coset
    fd_polygon: np.ndarray            # fractional vertices, conventional cell

    def cosets(self) -> list[GroupOp]:
        """All ops per conventional cell: point cosets x centering."""
        if not self.centered:
            return list(self.ops)
        out = list(self.ops)
        for op in self.ops:
            out.append(GroupOp(op.matrix, op.trans + np.array([0.5, 0.5]),
                               op.name + "+c"))
        return out

    def compatible_with(self, lattice_class: str) -> bool:
        return lattice_class in _ACCEPTED_CLASSES[self.lattice_class]

    def op_index(self, name: str) -> int:
        for i, op in enumerate(self.ops):
            if op.name == name:
                return i
        raise KeyError(name)

    def multiplication_table(self) -> np.ndarray:
        """table[i, j] = k with op_i after op_j = op_k modulo translations."""
        n = len(self.ops)
        table = np.zeros((n, n), dtype=int)
        for i, gi in enumerate(self.ops):
            for j, gj in enumerate(self.ops):
                M = gi.matrix @ gj.matrix
                t = gi.matrix @ gj.trans + gi.trans
                table[i, j] = self._find_op(M, t)
        return table

    def _find_op(self, M: np.ndarray, t: np.ndarray) -> int:
        for k, op in enumerate(self.ops):
            if np.array_equal(M, op.matrix):
                d = np.mod(t - op.trans, 1.0)
                d = np.minimum(d, 1.0 - d)
                if self.centered:
                    dc = np.mod(t - op.trans - 0.5, 1.0)
                    dc = np.minimum(dc, 1.0 - dc)
                    if np.all(dc < 1e-9):
                        return k
                if np.all(d < 1e-9):
                    return k
        raise ValueError(f"{self.name}: product op not in table (closure violated)")


def _build_group(name: str) -> WallpaperGroup:
    raw = _OP_TABLES[name]
    ops = []
    n_rot = n_mir = 0
    for M, t in raw:
        Ma = np.array(M, dtype=float)
        ta = np.array([float(t[0]), float(t[1])])
        Ma.flags.writeable = False
        ta.flags.writeable = False
        if round(float(np.linalg.det(Ma))) == 1:
            if np.allclose(Ma, np.eye(2)):
                opname = "e"
            else:
                n_rot += 1
                opname = f"r{n_rot}"
        else:
            opname = f"m{n_mir}"
            n_mir += 1
        ops.append(GroupOp(Ma, ta, opname))
    # the true maximal rotation order, derived from the op matrices; note
    # the short symbols pmm, pmg, pgg, cmm hide the 2 of p2mm, p2mg, p2gg,
    # c2mm, so "digit in the name" under-reports them
    order = 1
    for op in ops:
        M = op.matrix
        if round(float(np.linalg.det(M))) == 1:
            tr = round(M[0, 0] + M[1, 1])
            if tr != 2:
                order = max(order, {1: 6, 0: 4, -1: 3, -2: 2}[tr])
    # crystallographic fact: cm, cmm, p31m, p4g, p6m and p4m contain glide
    # reflections even when no 'g' appears in the name
    has_glide = "g" in name or name in ("cm", "cmm", "p31m", "p3m1", "p4m", "p6m")
    poly = np.array([[float(Fraction(v[0])), float(Fraction(v[1]))]
                     for v in _FD_POLYGONS[name]])
    poly.flags.writeable = False
    return WallpaperGroup(
        name=name,
        lattice_class=_LATTICE_OF[name],
        highest_rotation_order=order,
        has_mirror="m" in name,
        has_glide=has_glide,
        point_group_order=len(ops),
        centered=name in _CENTERED,
        ops=tuple(ops),
        fd_polygon=poly,
    )


CATALOG: dict[str, WallpaperGroup] = {name: _build_group(name) for name in GROUP_NAMES}


def get_group(name: str) -> WallpaperGroup:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown wallpaper group {name!r}; "
                       f"valid names: {', '.join(GROUP_NAMES)}") from None


def require_compatible(group: WallpaperGroup, lattice: lat.Lattice) -> None:
    if not group.compatible_with(lattice.lattice_class):
        raise IncompatibleLatticeError(
            f"group {group.name} needs a {group.lattice_class} lattice, "
            f"got {lattice.lattice_class}")


def to_pattern_isometry(op: GroupOp, lattice: lat.Lattice) -> Isometry2:
    """Conjugate a fractional op into pattern coordinates."""
    B = lattice.matrix()
    Binv = lattice.inverse_matrix()
    return Isometry2(B @ op.matrix @ Binv, B @ op.trans)


def group_generators(group: WallpaperGroup | str, lattice: lat.Lattice) -> list[Isometry2]:
    """Minimal non-translation generators in pattern coordinates.

    Together with the two lattice translations (and, for centered groups,
    the centering translation that is included here) these generate the
    full group.  Deterministic per (group, lattice).
    """
    if isinstance(group, str):
        group = get_group(group)
    require_compatible(group, lattice)
    gens: list[GroupOp] = []
    known = {0}

    def close(idx_set):
        table = group.multiplication_table()
        frontier = set(idx_set)
        while frontier:
            new = set()
            for i in list(idx_set):
                for j in list(idx_set):
                    k = int(table[i, j])
                    if k not in idx_set:
                        new.add(k)
            if not new:
                break
            idx_set |= new
            frontier = new
        return idx_set

    for i, op in enumerate(group.ops):
        if i in known:
            continue
        gens.append(op)
        known = close(known | {i})
        if len(known) == len(group.ops):
            break
    result = [to_pattern_isometry(op, lattice) for op in gens]
    if group.centered:
        B = lattice.matrix()
        result.append(Isometry2(np.eye(2), B @ np.array([0.5, 0.5])))
    return result


def orbit(point, group: WallpaperGroup | str, lattice: lat.Lattice,
          tol: float = GEOMETRIC_TOL) -> list[np.ndarray]:
    """Images of a point within one primitive cell, deduplicated.

    Returns point-group-order images for a generic point; fewer on special
    positions.  Representatives are folded into the conventional cell and
    deduplicated modulo the full translation lattice (including centering).
    """
    if isinstance(group, str):
        group = get_group(group)
    require_compatible(group, lattice)
    f = lattice.to_fractional(np.asarray(point, float).reshape(1, 2))[0]
    images = []
    for op in group.ops:
        g = np.mod(op.apply(f), 1.0)
        dup = False
        for h in images:
            d = np.mod(g - h, 1.0)
            d = np.minimum(d, 1.0 - d)
            dpat = lattice.to_pattern(d.reshape(1, 2))[0]
            if np.hypot(dpat[0], dpat[1]) <= tol:
                dup = True
                break
            if group.centered:
                dc = np.mod(g - h - 0.5, 1.0)
                dc = np.minimum(dc, 1.0 - dc)
                dpat = lattice.to_pattern(dc.reshape(1, 2))[0]
                if np.hypot(dpat[0], dpat[1]) <= tol:
                    dup = True
                    break
        if not dup:
            images.append(g)
    return [lattice.to_pattern(g.reshape(1, 2))[0] for g in images]


# ---------------------------------------------------------------------------
# Derived cell features (rotation centers, mirror / glide axes)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellFeature:
    """A symmetry element located inside the conventional cell."""

    kind: str                 # "rotation" | "mirror" | "glide"
    order: int | None         # rotation order, None for axes
    position: np.ndarray | None   # fractional center for rotations
    axis_point: np.ndarray | None  # fractional point on axis
    axis_dir: np.ndarray | None    # fractional direction (integer vector)
    shift: float | None       # glide shift as fraction of axis period
    class_id: int             # orbit class under the group


def _frac_wrap(v: np.ndarray) -> np.ndarray:
    w = np.mod(v, 1.0)
    w[np.isclose(w, 1.0, atol=1e-9)] = 0.0
    return w


def cell_rotation_centers(group: WallpaperGroup) -> list[CellFeature]:
    """All rotation centers in the conventional cell, grouped into classes."""
    uniq: dict[tuple, int] = {}
    for op in group.cosets():
        M = op.matrix
        tr = round(M[0, 0] + M[1, 1])
        if round(float(np.linalg.det(M))) != 1 or tr == 2:
            continue
        order = {1: 6, 0: 4, -1: 3, -2: 2}[tr]
        A = np.eye(2) - M
        for ox in (0, 1, -1):
            for oy in (0, 1, -1):
                t = op.trans + np.array([ox, oy], float)
                c = _frac_wrap(np.linalg.solve(A, t))
                key = (round(c[0], 9), round(c[1], 9))
                uniq[key] = max(uniq.get(key, 0), order)
    centers = [(np.array(k), o) for k, o in sorted(uniq.items())]
    # class assignment: orbit under all cosets modulo translations
    class_of: dict[int, int] = {}
    next_class = 0
    for i, (c, o) in enumerate(centers):
        if i in class_of:
            continue
        class_of[i] = next_class
        for op in group.cosets():
            img = _frac_wrap(op.apply(c))
            for j, (c2, o2) in enumerate(centers):
                if o2 == o and np.allclose(img, c2, atol=1e-9):
                    class_of[j] = next_class
        next_class += 1
    return [CellFeature("rotation", o, c, None, None, None, class_of[i])
            for i, (c, o) in enumerate(centers)]


def cell_axes(group: WallpaperGroup) -> list[CellFeature]:
    """Mirror and glide axes inside the conventional cell (fractional form).

    Each det=-1 coset op, combined with integer translations, yields an
    axis line; the glide shift is reported as a fraction of the axis period
    (the primitive lattice vector parallel to the axis), folded to [0, 1/2].
    A line key is (direction, cross-offset mod 1) so parallel copies dedupe.
    """
    feats: list[CellFeature] = []
    seen: set[tuple] = set()
    for op in group.cosets():
        M = op.matrix
        if round(float(np.linalg.det(M))) != -1:
            continue
        d = _mirror_direction(M)
        for ox in (0, 1, -1):
            for oy in (0, 1, -1):
                t = op.trans + np.array([ox, oy], float)
                coeff = _project_coeff(t, M, d)
                axis_pt = 0.5 * (t - coeff * d)
                shift = coeff % 1.0
                if shift > 0.5 + 1e-9:
                    shift = 1.0 - shift
                if shift < 1e-9:
                    shift = 0.0
                offset = (d[0] * axis_pt[1] - d[1] * axis_pt[0]) % 1.0
                if abs(offset - 1.0) < 1e-9:
                    offset = 0.0
                key = (int(d[0]), int(d[1]), round(offset, 6), round(shift, 6))
                if key in seen:
                    continue
                seen.add(key)
                kind = "mirror" if shift == 0.0 else "glide"
                feats.append(CellFeature(kind, None, None, _frac_wrap(axis_pt), d,
                                         None if kind == "mirror" else shift, 0))
    return feats


def _project_coeff(t: np.ndarray, M: np.ndarray, d: np.ndarray) -> float:
    """Coefficient c with the axis-parallel part of t equal to c * d.

    Uses (I + M) t = 2 * (parallel part) for a reflection M.
    """
    par = 0.5 * (np.eye(2) + M) @ t
    idx = int(np.argmax(np.abs(d)))
    return float(par[idx] / d[idx])


def catalog_json() -> str:
    """The catalog as a JSON reference document."""
    doc = {
        "groups": [],
        "color_symmetry_counts": {
            "two_color_groups": TWO_COLOR_GROUP_COUNT,
            "three_color_groups": THREE_COLOR_GROUP_COUNT,
        },
    }
    for name in GROUP_NAMES:
        g = CATALOG[name]
        doc["groups"].append({
            "name": g.name,
            "lattice_class": g.lattice_class,
            "highest_rotation_order": g.highest_rotation_order,
            "has_mirror": g.has_mirror,
            "has_glide": g.has_glide,
            "point_group_order": g.point_group_order,
            "centered": g.centered,
            "generators": [
                {"name": op.name,
                 "matrix": [[int(v) for v in row] for row in op.matrix],
                 "translation": [float(v) for v in op.trans]}
                for op in g.ops
            ],
            "fd_polygon": [[float(x), float(y)] for x, y in g.fd_polygon],
        })
    return json.dumps(doc, indent=2, sort_keys=True)
