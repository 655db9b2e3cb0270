"""Exact planar isometry algebra.

Points and vectors are plain length-2 numpy arrays in pattern coordinates
(x along columns, y along rows).  An isometry is stored as its 2x2 linear
part plus a translation; the kind tag (identity / translation / rotation /
reflection / glide) is always recomputed from the matrix form, never trusted.

Tolerances: 1e-9 for algebraic identities (orthogonality, kind decisions),
1e-6 for geometric deduplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonOrthogonalError

ALGEBRAIC_TOL = 1e-9
GEOMETRIC_TOL = 1e-6

IDENTITY = "identity"
TRANSLATION = "translation"
ROTATION = "rotation"
REFLECTION = "reflection"
GLIDE = "glide"


def _as_vec(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(2)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite components in {v!r}")
    return a


@dataclass(frozen=True)
class AxisLine:
    """Line given by a point on it and a unit direction vector."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", _as_vec(self.point))
        d = _as_vec(self.direction)
        n = float(np.hypot(d[0], d[1]))
        if n < ALGEBRAIC_TOL:
            raise ValueError("axis direction must be nonzero")
        object.__setattr__(self, "direction", d / n)

    def angle(self) -> float:
        """Direction angle normalized to [0, pi)."""
        a = math.atan2(self.direction[1], self.direction[0]) % math.pi
        return 0.0 if math.pi - a < 1e-12 else a

    def canonical_offset(self) -> float:
        """Signed origin distance using the canonical [0, pi) direction."""
        th = self.angle()
        return float(-self.point[0] * math.sin(th) + self.point[1] * math.cos(th))

    def same_line(self, other: "AxisLine", tol: float = GEOMETRIC_TOL) -> bool:
        a1, a2 = self.angle(), other.angle()
        d = abs(a1 - a2)
        if min(d, math.pi - d) > 1e-6:
            return False
        o1, o2 = self.canonical_offset(), other.canonical_offset()
        if d > math.pi / 2:  # wrapped across 0/pi: canonical normals oppose
            o2 = -o2
        return abs(o1 - o2) <= tol

    def __repr__(self):
        return (f"AxisLine(point=({self.point[0]:.6g},{self.point[1]:.6g}), "
                f"angle={math.degrees(self.angle()):.4g}deg)")


@dataclass(frozen=True, eq=False)
class Isometry2:
    """Planar isometry: x -> linear @ x + translation, with recomputed kind.

    kind is one of identity/translation/rotation/reflection/glide; the
    parameter fields relevant to the kind are populated, others are None.
    Glide shift is strictly positive (zero-shift glides classify as
    reflections).
    """

    linear: np.ndarray
    translation: np.ndarray
    kind: str = field(init=False)
    angle: float | None = field(init=False, default=None)
    center: np.ndarray | None = field(init=False, default=None)
    axis: AxisLine | None = field(init=False, default=None)
    shift: float | None = field(init=False, default=None)

    def __post_init__(self):
        L = np.asarray(self.linear, dtype=float).reshape(2, 2)
        t = _as_vec(self.translation)
        if np.abs(L.T @ L - np.eye(2)).max() > ALGEBRAIC_TOL:
            raise NonOrthogonalError(
                f"linear part deviates from orthogonality by "
                f"{np.abs(L.T @ L - np.eye(2)).max():.3e}")
        L.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "linear", L)
        object.__setattr__(self, "translation", t)
        kind, params = _classify(L, t)
        object.__setattr__(self, "kind", kind)
        for k, v in params.items():
            object.__setattr__(self, k, v)

    # -- constructors ------------------------------------------------

    @staticmethod
    def identity() -> "Isometry2":
        return Isometry2(np.eye(2), np.zeros(2))

    @staticmethod
    def translation_by(v) -> "Isometry2":
        return Isometry2(np.eye(2), _as_vec(v))

    @staticmethod
    def rotation(center, angle_rad: float) -> "Isometry2":
        c, s = math.cos(angle_rad), math.sin(angle_rad)
        L = np.array([[c, -s], [s, c]])
        ctr = _as_vec(center)
        return Isometry2(L, ctr - L @ ctr)

    @staticmethod
    def reflection(axis: AxisLine) -> "Isometry2":
        L = _reflection_matrix(axis.direction)
        p = axis.point
        return Isometry2(L, p - L @ p)

    @staticmethod
    def glide(axis: AxisLine, shift: float) -> "Isometry2":
        L = _reflection_matrix(axis.direction)
        p = axis.point
        return Isometry2(L, p - L @ p + shift * axis.direction)

    # -- algebra -----------------------------------------------------

    def __call__(self, point) -> np.ndarray:
        return self.linear @ _as_vec(point) + self.translation

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        """Apply to an (n, 2) array of points."""
        return pts @ self.linear.T + self.translation

    def compose(self, other: "Isometry2") -> "Isometry2":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        return Isometry2(self.linear @ other.linear,
                         self.linear @ other.translation + self.translation)

    def inverse(self) -> "Isometry2":
        Linv = self.linear.T
        return Isometry2(Linv, -(Linv @ self.translation))

    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def is_identity(self, tol: float = GEOMETRIC_TOL) -> bool:
        return (np.abs(self.linear - np.eye(2)).max() <= ALGEBRAIC_TOL
                and np.abs(self.translation).max() <= tol)

    def __repr__(self):
        if self.kind == ROTATION:
            extra = f", {math.degrees(self.angle):.4g}deg about ({self.center[0]:.6g},{self.center[1]:.6g})"
        elif self.kind == GLIDE:
            extra = f", shift={self.shift:.6g} along {self.axis!r}"
        elif self.kind == REFLECTION:
            extra = f", {self.axis!r}"
        elif self.kind == TRANSLATION:
            extra = f", by ({self.translation[0]:.6g},{self.translation[1]:.6g})"
        else:
            extra = ""
        return f"Isometry2({self.kind}{extra})"


def compose(g: Isometry2, h: Isometry2) -> Isometry2:
    """g after h."""
    return g.compose(h)


def classify_isometry(linear, translation) -> Isometry2:
    """Build an Isometry2 from matrix form; raises NonOrthogonalError."""
    return Isometry2(np.asarray(linear, float), np.asarray(translation, float))


def _reflection_matrix(direction: np.ndarray) -> np.ndarray:
    d = direction / np.hypot(direction[0], direction[1])
    c2 = d[0] * d[0] - d[1] * d[1]
    s2 = 2.0 * d[0] * d[1]
    return np.array([[c2, s2], [s2, -c2]])


def _classify(L: np.ndarray, t: np.ndarray):
    det = float(np.linalg.det(L))
    if det > 0:
        if np.abs(L - np.eye(2)).max() <= ALGEBRAIC_TOL:
            if np.abs(t).max() <= ALGEBRAIC_TOL:
                return IDENTITY, {}
            return TRANSLATION, {}
        angle = math.atan2(L[1, 0], L[0, 0])
        # fixed point: (I - L) c = t; invertible since angle != 0
        center = np.linalg.solve(np.eye(2) - L, t)
        center.flags.writeable = False
        return ROTATION, {"angle": angle, "center": center}
    # det = -1: reflection or glide. L = reflection about direction phi.
    phi = 0.5 * math.atan2(L[1, 0], L[0, 0])
    u = np.array([math.cos(phi), math.sin(phi)])
    t_par = float(t @ u)
    t_perp = t - t_par * u
    point = 0.5 * t_perp
    if abs(t_par) <= ALGEBRAIC_TOL:
        axis = AxisLine(point, u)
        return REFLECTION, {"axis": axis, "shift": None}
    if t_par < 0:
        u = -u
        t_par = -t_par
    axis = AxisLine(point, u)
    return GLIDE, {"axis": axis, "shift": t_par}
