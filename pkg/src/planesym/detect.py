"""Symmetry detection: lattice, rotation centers, mirror/glide axes,
classification into the 17 groups, unit-cell / FD extraction.

The mismatch score between a pattern and an isometry is the mean
normalized per-channel absolute difference over the overlap region
(0 = perfect).  Default acceptance threshold theta = 0.05; the paper-style
procedure tests rotation orders in the descending sequence 6, 4, 3, 2 and
walks a standard crystallographic decision table keyed on the surviving
order, mirror presence, glide presence and centers-on-mirrors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import groups as grp
from .backend import get_backend
from .cells import proper_unit_cell
from .errors import (
    AnchorNotFoundError,
    InsufficientOverlapError,
    NoPeriodicityError,
)
from .generate import FundamentalDomain, fd_frame, generate
from .geometry import AxisLine, Isometry2
from .lattice import Lattice, canonical_basis, classify_basis
from .raster import RasterPattern

DEFAULT_THETA = 0.05
MIN_OVERLAP = 0.25
ROTATION_ORDERS = (6, 4, 3, 2)


@dataclass
class DetectedCenter:
    order: int
    position: np.ndarray
    score: float
    class_id: int = -1


@dataclass
class DetectedAxis:
    kind: str                  # "mirror" | "glide"
    line: AxisLine
    shift: float | None
    score: float


@dataclass
class SymmetrySignature:
    lattice: Lattice
    rotation_centers: dict[int, list[DetectedCenter]]
    mirror_axes: list[DetectedAxis]
    glide_axes: list[DetectedAxis]
    two_fold_class_count: int
    group: str
    confidence: float
    theta: float
    rejected_orders: dict[int, float] = field(default_factory=dict)
    alternatives: list[tuple[str, float]] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "group": self.group,
            "confidence": round(self.confidence, 6),
            "theta": self.theta,
            "lattice": {
                "a": [float(v) for v in self.lattice.a],
                "b": [float(v) for v in self.lattice.b],
                "class": self.lattice.lattice_class,
            },
            "rotation_centers": {
                str(order): [
                    {"position": [round(float(c.position[0]), 3),
                                  round(float(c.position[1]), 3)],
                     "score": round(c.score, 6),
                     "class": c.class_id}
                    for c in centers
                ]
                for order, centers in self.rotation_centers.items() if centers
            },
            "mirror_axes": [
                {"point": [round(float(a.line.point[0]), 3),
                           round(float(a.line.point[1]), 3)],
                 "angle_deg": round(math.degrees(a.line.angle()), 4),
                 "score": round(a.score, 6)}
                for a in self.mirror_axes
            ],
            "glide_axes": [
                {"point": [round(float(a.line.point[0]), 3),
                           round(float(a.line.point[1]), 3)],
                 "angle_deg": round(math.degrees(a.line.angle()), 4),
                 "shift": round(float(a.shift), 3),
                 "score": round(a.score, 6)}
                for a in self.glide_axes
            ],
            "two_fold_class_count": self.two_fold_class_count,
            "rejected_orders": {str(k): round(v, 6)
                                for k, v in self.rejected_orders.items()},
            "alternatives": [[g, round(m, 6)] for g, m in self.alternatives],
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# Mismatch scoring
# ---------------------------------------------------------------------------

def isometry_mismatch(pattern: RasterPattern, iso: Isometry2, *,
                      stride: int = 1, resampling: str = "bilinear") -> float:
    """Mean normalized per-channel |difference| over the overlap region."""
    img = np.ascontiguousarray(pattern.rgb_float())
    kern = get_backend()
    acc, count, total = kern.mismatch_affine(
        img, np.ascontiguousarray(iso.linear),
        np.ascontiguousarray(iso.translation), stride,
        resampling == "bilinear")
    if count < MIN_OVERLAP * total:
        raise InsufficientOverlapError(
            f"overlap {count / max(total, 1):.2f} below {MIN_OVERLAP}")
    return acc / (3.0 * count)


def _scan(img, L, ts, stride, bilinear=True):
    kern = get_backend()
    return kern.scan_affine(img, np.ascontiguousarray(L, float),
                            np.ascontiguousarray(ts, float), stride, bilinear)


def _refine_gate(theta: float) -> float:
    """Grid scores fall off steeply within a pixel of a true feature, so
    candidates up to this bound enter sub-pixel refinement."""
    return min(2.0 * theta, theta + 0.08)


def _auto_stride(img, target: int = 110) -> int:
    return max(1, min(img.shape[0], img.shape[1]) // target)


# ---------------------------------------------------------------------------
# Lattice detection
# ---------------------------------------------------------------------------

def detect_lattice(pattern: RasterPattern, theta: float = DEFAULT_THETA) -> Lattice:
    """Two shortest verified translations, canonicalized and classified.

    Raises NoPeriodicityError on uniform input or when no translation with
    mismatch below theta exists within half the canvas.
    """
    img = pattern.rgb_float()
    H, W = img.shape[:2]
    if img.std(axis=(0, 1)).max() < 1.0 / 255.0:
        raise NoPeriodicityError("uniform image: no translational structure")
    ac = np.zeros((H, W))
    for c in range(3):
        ch = img[:, :, c] - img[:, :, c].mean()
        F = np.fft.rfft2(ch)
        ac += np.fft.irfft2(F * np.conj(F), s=(H, W))
    ac /= max(ac[0, 0], 1e-12)
    peaks = _autocorr_peaks(ac, W, H)
    verified: list[np.ndarray] = []
    for v in peaks:
        v = _refine_translation(img, v, theta)
        if v is None:
            continue
        if verified:
            a = verified[0]
            cross = abs(a[0] * v[1] - a[1] * v[0])
            if cross < 0.05 * np.linalg.norm(a) * np.linalg.norm(v):
                continue  # collinear with a
        verified.append(v)
        if len(verified) == 2:
            break
    if len(verified) < 2:
        raise NoPeriodicityError(
            f"no pair of independent translations below theta={theta}")
    a, b = canonical_basis(verified[0], verified[1])
    return Lattice(a, b, classify_basis(a, b))


def _autocorr_peaks(ac: np.ndarray, W: int, H: int,
                    min_period: float = 3.5) -> list[np.ndarray]:
    """Local autocorrelation maxima as candidate translations, nearest first."""
    footprint = np.ones((5, 5), dtype=bool)
    local_max = (ac == ndimage.maximum_filter(ac, footprint=footprint, mode="wrap"))
    raw = []
    ys, xs = np.nonzero(local_max)
    for y, x in zip(ys, xs):
        dx = x if x <= W // 2 else x - W
        dy = y if y <= H // 2 else y - H
        r = math.hypot(dx, dy)
        if r < min_period or r > min(W, H) / 2.0:
            continue
        if dx < 0 or (dx == 0 and dy < 0):
            continue  # keep one of each +-v pair
        raw.append((r, -ac[y, x], float(dx), float(dy)))
    if not raw:
        return []
    # noise throws off many weak local maxima; keep peaks comparable to the
    # strongest off-origin one, then walk them shortest-first
    vmax = max(-s for _, s, _, _ in raw)
    thresh = max(0.12, 0.3 * vmax)
    cand = sorted(c for c in raw if -c[1] >= thresh)
    return [np.array([c[2], c[3]]) for c in cand[:60]]


def _refine_translation(img, v: np.ndarray, theta: float) -> np.ndarray | None:
    """Coordinate-descent subpixel refinement; None if not below theta."""
    stride = _auto_stride(img)
    L = np.eye(2)

    def score(t):
        s, o = _scan(img, L, t.reshape(1, 2), stride)
        return s[0] if o[0] >= MIN_OVERLAP else 1.0

    best = v.astype(float)
    best_s = score(best)
    step = 0.5
    while step >= 0.05:
        improved = True
        while improved:
            improved = False
            for d in ((step, 0), (-step, 0), (0, step), (0, -step)):
                cand = best + d
                s = score(cand)
                if s < best_s - 1e-12:
                    best, best_s = cand, s
                    improved = True
        step /= 2.0
    if best_s >= theta:
        return None
    return best


# ---------------------------------------------------------------------------
# Rotation centers
# ---------------------------------------------------------------------------

def find_rotation_centers(pattern: RasterPattern, order: int, lattice: Lattice,
                          theta: float = DEFAULT_THETA, *, grid: int = 64,
                          ) -> list[DetectedCenter]:
    """Accepted order-fold rotation centers within one primitive cell.

    Grid scan (step = cell/grid) anchored near the canvas center, local
    minima refined by coordinate descent to sub-pixel, deduplicated modulo
    the lattice.  Empty list when nothing scores below theta.
    """
    if order not in (2, 3, 4, 6):
        raise ValueError("rotation order must be one of 2, 3, 4, 6")
    img = np.ascontiguousarray(pattern.rgb_float())
    H, W = img.shape[:2]
    ang = 2.0 * math.pi / order
    c, s = math.cos(ang), math.sin(ang)
    L = np.array([[c, -s], [s, c]])
    base = np.array([W / 2.0, H / 2.0]) - 0.5 * (lattice.a + lattice.b)
    f1, f2 = np.meshgrid(np.arange(grid) / grid, np.arange(grid) / grid)
    centers = (base[None, :]
               + f1.reshape(-1, 1) * lattice.a[None, :]
               + f2.reshape(-1, 1) * lattice.b[None, :])
    ts = centers - centers @ L.T
    # coarse stride for the dense grid gate, fine stride for refinement
    coarse = max(_auto_stride(img), min(H, W) // 64)
    fine = _auto_stride(img)
    scores, overlaps = _scan(img, L, ts, coarse)
    scores = np.where(overlaps >= MIN_OVERLAP, scores, 1.0)
    ok = scores < _refine_gate(theta)  # refine a band, accept after refinement
    if not ok.any():
        return []
    step_len = max(np.linalg.norm(lattice.a), np.linalg.norm(lattice.b)) / grid
    clusters = _cluster_points(centers[ok], scores[ok], 1.9 * step_len)[:40]
    found: list[DetectedCenter] = []
    for pos, sc in clusters:
        rpos, rsc = _refine_center(img, L, pos, sc, step_len, fine)
        if rsc >= theta:
            continue
        folded = _fold_to_cell(rpos, lattice, base)
        if any(np.linalg.norm(folded - f.position) < max(2.0, 0.06 * step_len * grid)
               for f in found):
            continue
        found.append(DetectedCenter(order, folded, rsc))
    found.sort(key=lambda f: (round(f.score, 6), f.position[0], f.position[1]))
    return found


def _cluster_points(pts: np.ndarray, scores: np.ndarray, radius: float):
    """Greedy clustering; returns (best point, best score) per cluster."""
    order = np.argsort(scores, kind="stable")
    taken = np.zeros(len(pts), dtype=bool)
    out = []
    for i in order:
        if taken[i]:
            continue
        d = np.linalg.norm(pts - pts[i], axis=1)
        members = d <= radius
        taken |= members
        out.append((pts[i].copy(), float(scores[i])))
    return out


def _refine_center(img, L, pos, sc, step0, stride):
    def score(p):
        t = p - L @ p
        s, o = _scan(img, L, t.reshape(1, 2), stride)
        return s[0] if o[0] >= MIN_OVERLAP else 1.0

    best = pos.astype(float)
    best_s = score(best)  # re-score at the refinement stride
    step = step0
    while step >= 0.05:
        improved = True
        while improved:
            improved = False
            for d in ((step, 0), (-step, 0), (0, step), (0, -step)):
                cand = best + np.array(d)
                s = score(cand)
                if s < best_s - 1e-12:
                    best, best_s = cand, s
                    improved = True
        step /= 2.0
    return best, best_s


def _fold_to_cell(p: np.ndarray, lattice: Lattice, base: np.ndarray) -> np.ndarray:
    f = lattice.to_fractional((p - base).reshape(1, 2))[0]
    f = np.mod(f, 1.0)
    f[np.isclose(f, 1.0, atol=1e-9)] = 0.0
    return base + lattice.to_pattern(f.reshape(1, 2))[0]


# ---------------------------------------------------------------------------
# Mirror and glide axes
# ---------------------------------------------------------------------------

_AXIS_DIRECTION_COMBOS = ((1, 0), (0, 1), (1, 1), (1, -1),
                          (2, 1), (1, 2), (2, -1), (1, -2))


def _candidate_directions(lattice: Lattice) -> list[np.ndarray]:
    longest = 2.2 * max(np.linalg.norm(lattice.a), np.linalg.norm(lattice.b))
    dirs = []
    for m, n in _AXIS_DIRECTION_COMBOS:
        d = m * lattice.a + n * lattice.b
        if np.linalg.norm(d) > longest:
            continue
        dirs.append(d)
    return dirs


def _reflection_matrix_for(d: np.ndarray) -> np.ndarray:
    u = d / np.linalg.norm(d)
    return np.array([[u[0] ** 2 - u[1] ** 2, 2 * u[0] * u[1]],
                     [2 * u[0] * u[1], u[1] ** 2 - u[0] ** 2]])


def find_reflection_axes(pattern: RasterPattern, lattice: Lattice,
                         theta: float = DEFAULT_THETA, *,
                         offsets: int = 96) -> list[DetectedAxis]:
    """Accepted mirror lines; directions restricted to short lattice vectors."""
    img = np.ascontiguousarray(pattern.rgb_float())
    H, W = img.shape[:2]
    center = np.array([W / 2.0, H / 2.0])
    stride = _auto_stride(img)
    out: list[DetectedAxis] = []
    for d in _candidate_directions(lattice):
        u = d / np.linalg.norm(d)
        nrm = np.array([-u[1], u[0]])
        period = lattice.cell_area() / np.linalg.norm(d)
        L = _reflection_matrix_for(d)
        offs = (np.arange(offsets) / offsets - 0.5) * period
        pts = center[None, :] + offs[:, None] * nrm[None, :]
        ts = pts - pts @ L.T
        scores, overlaps = _scan(img, L, ts, stride)
        scores = np.where(overlaps >= MIN_OVERLAP, scores, 1.0)
        hits = np.nonzero(scores < _refine_gate(theta))[0]
        hits = hits[np.argsort(scores[hits], kind="stable")][:16]
        for i in hits:
            off, sc = _refine_axis_offset(img, L, center, nrm, float(offs[i]),
                                          stride)
            if sc >= theta:
                continue
            line = AxisLine(center + off * nrm, u)
            if any(a.line.same_line(line, tol=2.0) for a in out):
                continue
            out.append(DetectedAxis("mirror", line, None, sc))
    out.sort(key=lambda a: (round(a.score, 6), a.line.angle(),
                            a.line.canonical_offset()))
    return out


def _refine_axis_offset(img, L, center, nrm, off0, stride, shift0=None, u=None):
    def score(off, sh):
        p = center + off * nrm
        t = p - L @ p
        if sh is not None:
            t = t + sh * u
        s, o = _scan(img, L, t.reshape(1, 2), stride)
        return s[0] if o[0] >= MIN_OVERLAP else 1.0

    best_off, best_sh = off0, shift0
    best = score(best_off, best_sh)
    step = 1.0
    while step >= 0.05:
        improved = True
        while improved:
            improved = False
            for do in (step, -step):
                s = score(best_off + do, best_sh)
                if s < best - 1e-12:
                    best_off, best = best_off + do, s
                    improved = True
            if shift0 is not None:
                for ds in (step, -step):
                    s = score(best_off, best_sh + ds)
                    if s < best - 1e-12:
                        best_sh, best = best_sh + ds, s
                        improved = True
        step /= 2.0
    if shift0 is None:
        return best_off, best
    return best_off, best_sh, best


def find_glide_axes(pattern: RasterPattern, lattice: Lattice,
                    theta: float = DEFAULT_THETA, *, offsets: int = 48,
                    shifts: int = 16,
                    mirrors: list[DetectedAxis] | None = None) -> list[DetectedAxis]:
    """Accepted glide lines (shift in (0, period)); axes coinciding with
    accepted mirror lines are suppressed."""
    img = np.ascontiguousarray(pattern.rgb_float())
    H, W = img.shape[:2]
    center = np.array([W / 2.0, H / 2.0])
    stride = max(1, _auto_stride(img) * 2)
    fine_stride = _auto_stride(img)
    if mirrors is None:
        mirrors = find_reflection_axes(pattern, lattice, theta)
    out: list[DetectedAxis] = []
    for d in _candidate_directions(lattice):
        u = d / np.linalg.norm(d)
        nrm = np.array([-u[1], u[0]])
        period_perp = lattice.cell_area() / np.linalg.norm(d)
        period_par = np.linalg.norm(d)
        L = _reflection_matrix_for(d)
        offs = (np.arange(offsets) / offsets - 0.5) * period_perp
        shs = (np.arange(1, shifts) / shifts) * period_par
        cand = []
        for off in offs:
            p = center + off * nrm
            t0 = p - L @ p
            for sh in shs:
                cand.append(t0 + sh * u)
        ts = np.array(cand)
        scores, overlaps = _scan(img, L, ts, stride)
        scores = np.where(overlaps >= MIN_OVERLAP, scores, 1.0)
        grid_ok = np.nonzero(scores < _refine_gate(theta))[0]
        grid_ok = grid_ok[np.argsort(scores[grid_ok], kind="stable")][:24]
        seen_cells = set()
        for i in grid_ok:
            io, ish = divmod(int(i), shifts - 1)
            if (io // 2, ish // 2) in seen_cells:
                continue
            seen_cells.add((io // 2, ish // 2))
            off, sh, sc = _refine_axis_offset(
                img, L, center, nrm, float(offs[io]), fine_stride,
                shift0=float(shs[ish]), u=u)
            if sc >= theta:
                continue
            sh_mod = sh % period_par
            if min(sh_mod, period_par - sh_mod) < 0.04 * period_par:
                continue  # a mirror (or lattice-translated mirror), not a glide
            line = AxisLine(center + off * nrm, u)
            if any(m.line.same_line(line, tol=2.0) for m in mirrors):
                continue
            if any(a.line.same_line(line, tol=2.0)
                   and abs(_canon_shift(a.shift, period_par)
                           - _canon_shift(sh_mod, period_par)) < 0.1 * period_par
                   for a in out):
                continue
            out.append(DetectedAxis("glide", line, sh_mod, sc))
    out.sort(key=lambda a: (round(a.score, 6), a.line.angle(),
                            a.line.canonical_offset()))
    return out


def _canon_shift(s: float, period: float) -> float:
    s = s % period
    return min(s, period - s)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def _point_on_any_line(p: np.ndarray, axes: list[DetectedAxis],
                       tol: float = 2.0) -> bool:
    for a in axes:
        u = a.line.direction
        w = p - a.line.point
        dist = abs(w[0] * (-u[1]) + w[1] * u[0])
        if dist <= tol:
            return True
    return False


def _direction_families(axes: list[DetectedAxis], tol_deg: float = 1.0) -> int:
    fams: list[float] = []
    for a in axes:
        ang = a.line.angle()
        if not any(min(abs(ang - f), math.pi - abs(ang - f)) < math.radians(tol_deg)
                   for f in fams):
            fams.append(ang)
    return len(fams)


def _center_classes(centers: list[DetectedCenter], lattice: Lattice,
                    all_centers: dict[int, list[DetectedCenter]],
                    mirrors: list[DetectedAxis],
                    glides: list[DetectedAxis],
                    tol: float = 2.5) -> int:
    """Union-find classes of `centers` under detected translations and point
    symmetries; assigns class_id in place and returns the class count."""
    n = len(centers)
    if n == 0:
        return 0
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    ops: list[Isometry2] = []
    for order, lst in all_centers.items():
        for c in lst:
            ops.append(Isometry2.rotation(c.position, 2 * math.pi / order))
    for a in mirrors:
        ops.append(Isometry2.reflection(a.line))
    for a in glides:
        ops.append(Isometry2.glide(a.line, a.shift))

    def match(p, q):
        d = lattice.to_fractional((p - q).reshape(1, 2))[0]
        d = d - np.round(d)
        dp = lattice.to_pattern(d.reshape(1, 2))[0]
        return np.hypot(dp[0], dp[1]) <= tol

    for i in range(n):
        for j in range(i + 1, n):
            if match(centers[i].position, centers[j].position):
                union(i, j)
        for op in ops:
            img = op(centers[i].position)
            for j in range(n):
                if j != i and match(img, centers[j].position):
                    union(i, j)
    roots = sorted({find(i) for i in range(n)})
    remap = {r: k for k, r in enumerate(roots)}
    for i, c in enumerate(centers):
        c.class_id = remap[find(i)]
    return len(roots)


def classify(pattern: RasterPattern, theta: float = DEFAULT_THETA) -> SymmetrySignature:
    """Full detection pipeline; returns the signature with the group label."""
    lattice = detect_lattice(pattern, theta)
    centers: dict[int, list[DetectedCenter]] = {}
    rejected: dict[int, float] = {}
    for order in ROTATION_ORDERS:
        found = find_rotation_centers(pattern, order, lattice, theta)
        centers[order] = found

    # crystallographic restriction: four-fold and three-fold never coexist;
    # if both appear, re-score strictly and drop the loser
    if centers[4] and centers[3]:
        s4 = _strict_center_score(pattern, centers[4][0], 4)
        s3 = _strict_center_score(pattern, centers[3][0], 3)
        if s4 >= theta or (s3 < theta and s3 <= s4):
            rejected[4] = s4
            centers[4] = []
        if s3 >= theta or (centers[4] and s4 < theta and s4 < s3):
            rejected[3] = s3
            centers[3] = []
        if centers[4] and centers[3]:
            if s4 <= s3:
                rejected[3] = s3
                centers[3] = []
            else:
                rejected[4] = s4
                centers[4] = []

    max_order = 1
    for order in ROTATION_ORDERS:
        if centers[order]:
            max_order = order
            break
        best = _best_rejected_score(pattern, order, lattice, theta)
        if best is not None:
            rejected.setdefault(order, best)

    mirrors = find_reflection_axes(pattern, lattice, theta)
    glides = find_glide_axes(pattern, lattice, theta, mirrors=mirrors)

    two_fold = centers.get(2, [])
    two_fold_classes = _center_classes(two_fold, lattice, centers, mirrors, glides)

    group, margin_notes = _decide_group(max_order, centers, mirrors, glides,
                                        two_fold_classes)
    accepted_scores = [c.score for lst in centers.values() for c in lst]
    accepted_scores += [a.score for a in mirrors] + [a.score for a in glides]
    worst = max(accepted_scores) if accepted_scores else 0.0
    confidence = max(0.0, 1.0 - worst / theta)

    alternatives = _near_threshold_alternatives(
        group, max_order, centers, mirrors, theta, two_fold_classes, glides)

    sig = SymmetrySignature(
        lattice=lattice,
        rotation_centers=centers,
        mirror_axes=mirrors,
        glide_axes=glides,
        two_fold_class_count=two_fold_classes,
        group=group,
        confidence=confidence,
        theta=theta,
        rejected_orders=rejected,
        alternatives=alternatives,
        notes={"mismatch_metric": "mean normalized per-channel |difference|",
               "theta_is_artifact_decision": True, **margin_notes},
    )
    return sig


def _strict_center_score(pattern: RasterPattern, center: DetectedCenter,
                         order: int) -> float:
    iso = Isometry2.rotation(center.position, 2 * math.pi / order)
    try:
        return isometry_mismatch(pattern, iso, stride=1)
    except InsufficientOverlapError:
        return 1.0


def _best_rejected_score(pattern, order, lattice, theta) -> float | None:
    """Best (still failing) score for an order, for reporting."""
    img = np.ascontiguousarray(pattern.rgb_float())
    H, W = img.shape[:2]
    ang = 2 * math.pi / order
    c, s = math.cos(ang), math.sin(ang)
    L = np.array([[c, -s], [s, c]])
    base = np.array([W / 2.0, H / 2.0]) - 0.5 * (lattice.a + lattice.b)
    g = 24
    f1, f2 = np.meshgrid(np.arange(g) / g, np.arange(g) / g)
    pts = (base[None, :] + f1.reshape(-1, 1) * lattice.a[None, :]
           + f2.reshape(-1, 1) * lattice.b[None, :])
    ts = pts - pts @ L.T
    scores, overlaps = _scan(img, L, ts, _auto_stride(img))
    scores = np.where(overlaps >= MIN_OVERLAP, scores, 1.0)
    return float(scores.min()) if len(scores) else None


def _decide_group(max_order, centers, mirrors, glides, two_fold_classes):
    notes = {}
    has_m = bool(mirrors)
    if max_order == 6:
        return ("p6m" if has_m else "p6"), notes
    if max_order == 4:
        if not has_m:
            return "p4", notes
        on = all(_point_on_any_line(c.position, mirrors) for c in centers[4])
        return ("p4m" if on else "p4g"), notes
    if max_order == 3:
        if not has_m:
            return "p3", notes
        on = all(_point_on_any_line(c.position, mirrors) for c in centers[3])
        return ("p3m1" if on else "p31m"), notes
    if max_order == 2:
        if has_m:
            fams = _direction_families(mirrors)
            if fams >= 2:
                on = all(_point_on_any_line(c.position, mirrors)
                         for c in centers[2])
                return ("pmm" if on else "cmm"), notes
            return "pmg", notes
        return ("pgg" if glides else "p2"), notes
    if has_m:
        return ("cm" if glides else "pm"), notes
    return ("pg" if glides else "p1"), notes


def _near_threshold_alternatives(group, max_order, centers, mirrors, theta,
                                 two_fold_classes, glides,
                                 margin: float = 0.01) -> list[tuple[str, float]]:
    """Groups that would be reported if a near-threshold feature flipped."""
    alts: list[tuple[str, float]] = []
    if max_order > 1 and centers.get(max_order):
        worst = max(c.score for c in centers[max_order])
        if theta - worst < margin:
            lower = [o for o in ROTATION_ORDERS if o < max_order]
            sub = {o: centers.get(o, []) for o in ROTATION_ORDERS}
            sub[max_order] = []
            next_order = next((o for o in lower if sub.get(o)), 1)
            g2, _ = _decide_group(next_order, sub, mirrors, glides,
                                  two_fold_classes)
            if g2 != group:
                alts.append((g2, theta - worst))
    if mirrors:
        worst_m = max(a.score for a in mirrors)
        if theta - worst_m < margin:
            g2, _ = _decide_group(max_order, centers, [], glides,
                                  two_fold_classes)
            if g2 != group:
                alts.append((g2, theta - worst_m))
    return alts


# ---------------------------------------------------------------------------
# Unit cell / FD extraction
# ---------------------------------------------------------------------------

_ANCHOR_ORDER = {"p6m": 6, "p6": 6, "p4m": 4, "p4g": 4, "p4": 4,
                 "p3m1": 3, "p31m": 3, "p3": 3,
                 "pmm": 2, "pmg": 2, "pgg": 2, "cmm": 2, "p2": 2}


def _short_lattice_vectors(lattice: Lattice, span: int = 2) -> list[np.ndarray]:
    vecs = []
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            if m == 0 and n == 0:
                continue
            vecs.append(m * lattice.a + n * lattice.b)
    vecs.sort(key=lambda v: (np.linalg.norm(v), math.atan2(v[1], v[0])))
    return vecs


def _candidate_bases(group: grp.WallpaperGroup, lattice: Lattice):
    """(a, b) pairs in the group's conventional setting, built from short
    detected-lattice vectors."""
    area = lattice.cell_area()
    want = 2.0 * area if group.centered else area
    vecs = _short_lattice_vectors(lattice)
    pairs = []
    for va, vb in itertools.permutations(vecs, 2):
        det = va[0] * vb[1] - va[1] * vb[0]
        if det <= 0 or abs(det - want) > 0.02 * want:
            continue
        if group.centered:
            # centering vector must be a detected-lattice translation
            cvec = 0.5 * (va + vb)
            f = lattice.to_fractional(cvec.reshape(1, 2))[0]
            if np.abs(f - np.round(f)).max() > 0.02:
                continue
        cls = classify_basis(va, vb)
        target = group.lattice_class
        ok = (cls == target
              or (target == "rectangular" and cls == "square")
              or (target == "centered-rectangular" and cls in ("rectangular",
                                                               "square")))
        if not ok:
            continue
        pairs.append((va, vb))
    pairs.sort(key=lambda p: (np.linalg.norm(p[0]) + np.linalg.norm(p[1]),
                              math.atan2(p[0][1], p[0][0])))
    return pairs[:24]


def _anchor_candidates(group, sig: SymmetrySignature, lattice: Lattice):
    order = _ANCHOR_ORDER.get(group.name)
    if order and sig.rotation_centers.get(order):
        pts = [c.position for c in sig.rotation_centers[order]]
    elif group.name in ("pm", "cm") and sig.mirror_axes:
        pts = [a.line.point for a in sig.mirror_axes]
    elif group.name == "pg" and sig.glide_axes:
        pts = [a.line.point for a in sig.glide_axes]
    else:
        pts = [np.zeros(2)]
    return sorted(pts, key=lambda p: (round(p[0], 3), round(p[1], 3)))


def _features_match(group, basis_a, basis_b, anchor, sig, tol=2.5) -> bool:
    """Check the group's expected cell features against detections in the
    (anchor, basis) frame.  Positions compare modulo the detected
    (primitive) lattice, which also absorbs centering translations."""
    B = np.column_stack([basis_a, basis_b])
    prim = sig.lattice
    det_centers = {o: [c.position for c in sig.rotation_centers.get(o, [])]
                   for o in (2, 3, 4, 6)}

    def present(order, frac_pos):
        target = anchor + B @ frac_pos
        for p in det_centers.get(order, []):
            d = prim.to_fractional((p - target).reshape(1, 2))[0]
            d = d - np.round(d)
            dp = prim.to_pattern(d.reshape(1, 2))[0]
            if np.hypot(dp[0], dp[1]) <= tol:
                return True
        return False

    for feat in grp.cell_rotation_centers(group):
        if not present(feat.order, feat.position):
            return False
    for feat in grp.cell_axes(group):
        if feat.kind != "mirror":
            continue
        d_pat = B @ feat.axis_dir
        pt_pat = anchor + B @ feat.axis_point
        line = AxisLine(pt_pat, d_pat)
        hit = False
        for m in sig.mirror_axes:
            if _lines_match_mod_lattice(line, m.line, prim.matrix(), tol):
                hit = True
                break
        if not hit:
            return False
    # glide expectations pin the frame for the mirror-less glide groups;
    # elsewhere mirrors and centers already fix orientation
    if group.name in ("pg", "pgg"):
        for feat in grp.cell_axes(group):
            if feat.kind != "glide":
                continue
            d_pat = B @ feat.axis_dir
            pt_pat = anchor + B @ feat.axis_point
            line = AxisLine(pt_pat, d_pat)
            exp_shift = feat.shift * float(np.hypot(d_pat[0], d_pat[1]))
            period = float(np.hypot(d_pat[0], d_pat[1]))
            hit = False
            for gl in sig.glide_axes:
                if not _lines_match_mod_lattice(line, gl.line, prim.matrix(), tol):
                    continue
                if abs(_canon_shift(gl.shift, period)
                       - _canon_shift(exp_shift, period)) <= 0.15 * period:
                    hit = True
                    break
            if not hit:
                return False
    return True


def _lines_match_mod_lattice(expected: AxisLine, got: AxisLine, B, tol) -> bool:
    """Same line up to a translation of the lattice spanned by B's columns.

    B must be the detected primitive basis; mirror families repeat at half
    the lattice period along the axis normal.
    """
    a1, a2 = expected.angle(), got.angle()
    d = abs(a1 - a2)
    if min(d, math.pi - d) > math.radians(1.0):
        return False
    u = expected.direction
    nrm = np.array([-u[1], u[0]])
    delta = float((got.point - expected.point) @ nrm)
    area = abs(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
    dir_len = _shortest_parallel_period(B, u)
    period = area / dir_len if dir_len else None
    if period is None:
        return abs(delta) <= tol
    # one mirror family repeats at the full perpendicular lattice period;
    # interleaved families are separate expected-axis entries
    r = abs(delta) % period
    return min(r, period - r) <= tol


def _shortest_parallel_period(B, u) -> float | None:
    best = None
    for m in range(-3, 4):
        for n in range(-3, 4):
            if m == 0 and n == 0:
                continue
            v = B @ np.array([m, n], float)
            L = np.linalg.norm(v)
            cross = abs(v[0] * u[1] - v[1] * u[0])
            if cross < 1e-6 * L:
                best = L if best is None or L < best else best
    return best


def locate_proper_cell(pattern: RasterPattern, sig: SymmetrySignature
                       ) -> tuple[np.ndarray, Lattice]:
    """(anchor, conventional-cell lattice) satisfying the group's proper-cell
    rules; lexicographically smallest anchor wins ties."""
    group = grp.get_group(sig.group)
    for anchor in _anchor_candidates(group, sig, sig.lattice):
        for va, vb in _candidate_bases(group, sig.lattice):
            if _features_match(group, va, vb, anchor, sig):
                cls = group.lattice_class if group.centered else \
                    classify_basis(va, vb)
                return np.asarray(anchor, float), Lattice(va, vb, cls)
    raise AnchorNotFoundError(
        f"no (anchor, basis) matches the proper-cell rules of {sig.group}")


def sample_periodic(pattern: RasterPattern, pts: np.ndarray,
                    lattice: Lattice) -> np.ndarray:
    """Bilinear samples at pts, folding by lattice translations so that
    sample locations land inside the canvas whenever possible."""
    img = pattern.rgb_float()
    H, W = img.shape[:2]
    center = np.array([W / 2.0, H / 2.0])
    f = lattice.to_fractional(pts - center)
    f = f - np.round(f)
    q = lattice.to_pattern(f) + center
    x = np.clip(q[:, 0], 0.0, W - 1.0)
    y = np.clip(q[:, 1], 0.0, H - 1.0)
    x0 = np.clip(np.floor(x).astype(int), 0, W - 2)
    y0 = np.clip(np.floor(y).astype(int), 0, H - 2)
    wx = (x - x0)[:, None]
    wy = (y - y0)[:, None]
    return (img[y0, x0] * (1 - wx) * (1 - wy) + img[y0, x0 + 1] * wx * (1 - wy)
            + img[y0 + 1, x0] * (1 - wx) * wy + img[y0 + 1, x0 + 1] * wx * wy)


def extract_unit_cell(pattern: RasterPattern, sig: SymmetrySignature
                      ) -> tuple[RasterPattern, np.ndarray, Lattice]:
    """Proper unit-cell raster (bounding box of the cell parallelogram),
    plus the anchor and conventional lattice used."""
    anchor, cell = locate_proper_cell(pattern, sig)
    corners = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], float) @ \
        np.column_stack([cell.a, cell.b]).T + anchor
    lo = np.floor(corners.min(axis=0)).astype(int)
    hi = np.ceil(corners.max(axis=0)).astype(int)
    w, h = hi[0] - lo[0] + 1, hi[1] - lo[1] + 1
    ys, xs = np.mgrid[0:h, 0:w]
    pts = np.stack([(xs + lo[0]).ravel(), (ys + lo[1]).ravel()], axis=1).astype(float)
    rgbs = sample_periodic(pattern, pts, sig.lattice)
    img = np.clip(np.rint(rgbs.reshape(h, w, 3) * 255), 0, 255).astype(np.uint8)
    return RasterPattern(img, lattice_annotation=cell), anchor, cell


def extract_fundamental_domain(pattern: RasterPattern, sig: SymmetrySignature
                               ) -> tuple[FundamentalDomain, np.ndarray, Lattice]:
    """FD raster per the group's fd polygon in the located proper cell."""
    anchor, cell = locate_proper_cell(pattern, sig)
    group = grp.get_group(sig.group)
    fd_anchor, h, w, poly_pat = fd_frame(group, cell)
    ys, xs = np.mgrid[0:h, 0:w]
    pts = np.stack([(xs + fd_anchor[0] + anchor[0]).ravel(),
                    (ys + fd_anchor[1] + anchor[1]).ravel()], axis=1)
    rgbs = sample_periodic(pattern, pts.astype(float), sig.lattice)
    from .generate import _extend_outside, _polygon_mask
    mask = _polygon_mask(poly_pat, fd_anchor, h, w)
    rgba = np.dstack([rgbs.reshape(h, w, 3), mask.astype(float)])
    fd = FundamentalDomain(rgba, group.fd_polygon.copy(), fd_anchor)
    _extend_outside(fd, mask)
    return fd, anchor, cell


def regenerate(pattern: RasterPattern, sig: SymmetrySignature) -> RasterPattern:
    """Re-render the pattern from its extracted FD (reconstruction check)."""
    fd, anchor, cell = extract_fundamental_domain(pattern, sig)
    return generate(fd, sig.group, cell, pattern.width, pattern.height,
                    origin=anchor)


# ---------------------------------------------------------------------------
# Color permutation check
# ---------------------------------------------------------------------------

def color_permutation_check(pattern: RasterPattern, iso: Isometry2,
                            min_consistency: float = 0.98
                            ) -> tuple[int, ...] | None:
    """Palette permutation induced by iso, or None.

    Builds the color-confusion histogram between the pattern and its
    transform; returns the bijection when at least min_consistency of the
    overlap pixels agree with a single permutation.
    """
    if not pattern.indexed:
        raise ValueError("color_permutation_check needs a palette-indexed pattern")
    idx = pattern.pixels
    H, W = idx.shape
    k = len(pattern.palette)
    ys, xs = np.mgrid[0:H, 0:W]
    pts = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(float)
    q = pts @ iso.linear.T + iso.translation
    qx = np.rint(q[:, 0]).astype(int)
    qy = np.rint(q[:, 1]).astype(int)
    ok = (qx >= 0) & (qy >= 0) & (qx < W) & (qy < H)
    if ok.sum() < MIN_OVERLAP * len(pts):
        raise InsufficientOverlapError("transform leaves too little overlap")
    src = idx.ravel()[ok]
    dst = idx[qy[ok], qx[ok]]
    conf = np.zeros((k, k), dtype=np.int64)
    np.add.at(conf, (src, dst), 1)
    total = conf.sum()
    if k <= 7:
        best_perm, best_mass = None, -1
        for perm in itertools.permutations(range(k)):
            mass = sum(conf[i, perm[i]] for i in range(k))
            if mass > best_mass:
                best_perm, best_mass = perm, mass
    else:
        from scipy.optimize import linear_sum_assignment
        rows, cols = linear_sum_assignment(-conf)
        best_perm = tuple(int(cols[list(rows).index(i)]) for i in range(k))
        best_mass = conf[rows, cols].sum()
    if best_mass / total >= min_consistency:
        return tuple(best_perm)
    return None
