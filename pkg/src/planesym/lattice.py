"""Translation lattices: basis reduction and class assignment.

A lattice stores two independent basis vectors in pattern coordinates.
Class rules (within 0.5 degree angular and 1% length tolerance):

  square               |a| = |b|, angle 90
  hexagonal            |a| = |b|, angle 120 (the one documented convention)
  rectangular          angle 90
  centered-rectangular |a| = |b| at neither 90 nor 120 (rhombic primitive
                       cell of a rectangular conventional cell)
  oblique              everything else
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

OBLIQUE = "oblique"
RECTANGULAR = "rectangular"
CENTERED_RECTANGULAR = "centered-rectangular"
SQUARE = "square"
HEXAGONAL = "hexagonal"

LATTICE_CLASSES = (OBLIQUE, RECTANGULAR, CENTERED_RECTANGULAR, SQUARE, HEXAGONAL)

ANGLE_TOL_DEG = 0.5
LENGTH_TOL = 0.01


@dataclass(frozen=True)
class Lattice:
    """Basis vectors a, b (pattern coordinates) plus their class label."""

    a: np.ndarray
    b: np.ndarray
    lattice_class: str

    def __post_init__(self):
        a = np.asarray(self.a, float).reshape(2)
        b = np.asarray(self.b, float).reshape(2)
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if abs(self.det()) < 1e-12:
            raise ValueError("lattice basis vectors are linearly dependent")
        if self.lattice_class not in LATTICE_CLASSES:
            raise ValueError(f"unknown lattice class {self.lattice_class!r}")
        want = classify_basis(a, b)
        # a stated class may be a relaxation (e.g. rectangular cell that happens
        # to be square), never a tightening
        if not _class_compatible(self.lattice_class, want):
            raise ValueError(
                f"basis geometry implies {want!r}, got {self.lattice_class!r}")

    @staticmethod
    def from_vectors(a, b) -> "Lattice":
        a = np.asarray(a, float).reshape(2)
        b = np.asarray(b, float).reshape(2)
        return Lattice(a, b, classify_basis(a, b))

    def matrix(self) -> np.ndarray:
        """Basis as columns: pattern = matrix() @ fractional."""
        return np.column_stack([self.a, self.b])

    def inverse_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix())

    def det(self) -> float:
        return float(self.a[0] * self.b[1] - self.a[1] * self.b[0])

    def cell_area(self) -> float:
        return abs(self.det())

    def angle_deg(self) -> float:
        cosv = float(self.a @ self.b) / (np.linalg.norm(self.a) * np.linalg.norm(self.b))
        return math.degrees(math.acos(min(1.0, max(-1.0, cosv))))

    def to_fractional(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, float) @ self.inverse_matrix().T

    def to_pattern(self, frac: np.ndarray) -> np.ndarray:
        return np.asarray(frac, float) @ self.matrix().T


def _class_compatible(stated: str, geometric: str) -> bool:
    if stated == geometric:
        return True
    relaxations = {
        OBLIQUE: set(LATTICE_CLASSES),
        RECTANGULAR: {SQUARE, RECTANGULAR},
        # a centered-rectangular lattice is stored via its conventional
        # rectangular cell, so a rectangular basis is the normal case
        CENTERED_RECTANGULAR: {RECTANGULAR, HEXAGONAL, SQUARE, CENTERED_RECTANGULAR},
    }
    return geometric in relaxations.get(stated, set())


def classify_basis(a, b) -> str:
    """Assign the lattice class of a (reduced) basis by tolerance rules."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    la, lb = np.linalg.norm(a), np.linalg.norm(b)
    cosv = float(a @ b) / (la * lb)
    ang = math.degrees(math.acos(min(1.0, max(-1.0, cosv))))
    equal_len = abs(la - lb) <= LENGTH_TOL * max(la, lb)
    if abs(ang - 90.0) <= ANGLE_TOL_DEG:
        return SQUARE if equal_len else RECTANGULAR
    if equal_len and (abs(ang - 120.0) <= ANGLE_TOL_DEG or abs(ang - 60.0) <= ANGLE_TOL_DEG):
        return HEXAGONAL
    if equal_len:
        return CENTERED_RECTANGULAR
    return OBLIQUE


def gauss_reduce(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Lagrange/Gauss reduction: shortest basis of the lattice span(a, b)."""
    a = np.asarray(a, float).copy()
    b = np.asarray(b, float).copy()
    if np.linalg.norm(a) > np.linalg.norm(b):
        a, b = b, a
    for _ in range(64):
        m = round(float(a @ b) / float(a @ a))
        b = b - m * a
        if np.linalg.norm(b) >= np.linalg.norm(a):
            break
        a, b = b, a
    return a, b


def canonical_basis(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Reduce, then pick a deterministic orientation.

    Output satisfies |a| <= |b|, det > 0, and angle(a, b) in [90, 120]
    degrees (hexagonal bases land on the 120 convention).  After Gauss
    reduction the angle lies in [60, 120]; flipping b fixes handedness and
    the shear b -> b - a moves an acute angle into [90, 120] while keeping
    det > 0 and the length ordering.
    """
    a, b = gauss_reduce(a, b)
    if a[0] * b[1] - a[1] * b[0] < 0:
        b = -b
    if float(a @ b) > 1e-9 * np.linalg.norm(a) * np.linalg.norm(b):
        b = b - a
    if a[0] < -1e-12 or (abs(a[0]) <= 1e-12 and a[1] < 0):
        a, b = -a, -b
    return a, b


def detect_class_pair(a, b) -> Lattice:
    """Canonicalize a raw basis and wrap it as a classified Lattice."""
    ca, cb = canonical_basis(a, b)
    return Lattice(ca, cb, classify_basis(ca, cb))


def make_lattice(lattice_class: str, size: float = 64.0,
                 aspect: float = 1.0, angle_deg: float = 105.0) -> Lattice:
    """Convenience constructor for each class with conventional orientation."""
    s = float(size)
    if lattice_class == SQUARE:
        return Lattice([s, 0.0], [0.0, s], SQUARE)
    if lattice_class == RECTANGULAR:
        return Lattice([s, 0.0], [0.0, s * aspect], RECTANGULAR)
    if lattice_class == CENTERED_RECTANGULAR:
        # conventional rectangle s x (s*aspect); stored basis is conventional,
        # centering handled by the group tables
        return Lattice([s, 0.0], [0.0, s * aspect], CENTERED_RECTANGULAR)
    if lattice_class == HEXAGONAL:
        t = math.radians(120.0)
        return Lattice([s, 0.0], [s * math.cos(t), s * math.sin(t)], HEXAGONAL)
    if lattice_class == OBLIQUE:
        t = math.radians(angle_deg)
        return Lattice([s, 0.0], [s * aspect * math.cos(t), s * aspect * math.sin(t)], OBLIQUE)
    raise ValueError(f"unknown lattice class {lattice_class!r}")
