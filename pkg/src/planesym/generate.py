"""Ornament generation: replicate a fundamental domain under a wallpaper
group by inverse pixel mapping.

Every canvas pixel is folded into the conventional cell, the coset op
owning it is found by testing the op inverses against the FD polygon
(first op in catalog order claims boundary pixels), and the FD image is
sampled at the mapped location.  Inverse mapping leaves no seams or holes;
supersampling (default 2x2) antialiases FD boundaries so that generated
fixtures score near zero under their own symmetries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import groups as grp
from .backend import get_backend
from .errors import (
    CanvasTooSmallError,
    FDShapeMismatchError,
    InconsistentSchemeError,
    SizeMismatchError,
)
from .geometry import Isometry2
from .lattice import Lattice
from .raster import RGB, RasterPattern


@dataclass
class FundamentalDomain:
    """FD image raster over the polygon's bounding box.

    Image pixel (u, v) sits at pattern point anchor + (u, v); the alpha
    channel masks the polygon interior.  Indexed FDs additionally carry
    palette indices for color-permutation generation.
    """

    rgba: np.ndarray                  # (Hf, Wf, 4) float in [0, 1]
    polygon: np.ndarray               # fractional vertices (conventional cell)
    anchor: np.ndarray                # pattern coords of pixel (0, 0)
    palette: list[RGB] | None = None
    indices: np.ndarray | None = None  # (Hf, Wf) palette indices
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rgba.shape[0], self.rgba.shape[1]

    def save_png(self, path) -> None:
        from PIL import Image
        arr = np.clip(self.rgba * 255.0, 0, 255).astype(np.uint8)
        Image.fromarray(arr, mode="RGBA").save(path)


def _polygon_mask(poly_pat: np.ndarray, anchor: np.ndarray,
                  h: int, w: int) -> np.ndarray:
    ys, xs = np.mgrid[0:h, 0:w]
    px = xs + anchor[0]
    py = ys + anchor[1]
    ok = np.ones((h, w), dtype=bool)
    n = len(poly_pat)
    sign = 0.0
    for i in range(n):
        a, b = poly_pat[i], poly_pat[(i + 1) % n]
        sign += (b[0] - a[0]) * (b[1] + a[1])
    orient = -1.0 if sign > 0 else 1.0
    for i in range(n):
        a, b = poly_pat[i], poly_pat[(i + 1) % n]
        cross = (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
        ok &= orient * cross >= -1e-9
    return ok


def _ccw_polygon(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    area2 = float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    return poly if area2 > 0 else poly[::-1].copy()


def fd_frame(group: grp.WallpaperGroup | str, lattice: Lattice,
             margin: int = 1) -> tuple[np.ndarray, int, int, np.ndarray]:
    """(anchor, height, width, polygon-in-pattern-coords) of the FD raster."""
    if isinstance(group, str):
        group = grp.get_group(group)
    poly_pat = lattice.to_pattern(group.fd_polygon)
    lo = np.floor(poly_pat.min(axis=0)) - margin
    hi = np.ceil(poly_pat.max(axis=0)) + margin
    w = int(hi[0] - lo[0]) + 1
    h = int(hi[1] - lo[1]) + 1
    return lo.astype(float), h, w, poly_pat


def fd_from_painter(group, lattice, painter, palette: list[RGB] | None = None) -> FundamentalDomain:
    """Build an FD by evaluating `painter(x, y)` on the polygon raster.

    painter receives pattern-coordinate meshgrids and returns either an
    (H, W, 3) float RGB array or an (H, W) integer index array (palette
    required in that case).
    """
    if isinstance(group, str):
        group = grp.get_group(group)
    anchor, h, w, poly_pat = fd_frame(group, lattice)
    ys, xs = np.mgrid[0:h, 0:w]
    px = xs + anchor[0]
    py = ys + anchor[1]
    out = painter(px, py)
    mask = _polygon_mask(poly_pat, anchor, h, w)
    indices = None
    if out.ndim == 2:
        if palette is None:
            raise ValueError("index painter requires a palette")
        indices = out.astype(np.int16)
        pal = np.asarray(palette, float) / 255.0
        rgb = pal[indices]
    else:
        rgb = np.asarray(out, float)
    rgba = np.dstack([rgb, mask.astype(float)])
    fd = FundamentalDomain(rgba, group.fd_polygon.copy(), anchor,
                           palette=palette, indices=indices)
    _extend_outside(fd, mask)
    return fd


def fd_from_rgba(group, lattice, rgba: np.ndarray,
                 palette: list[RGB] | None = None) -> FundamentalDomain:
    """Wrap a user RGBA raster (e.g. loaded PNG) as the group's FD.

    The raster must cover the FD polygon's bounding box; raises
    FDShapeMismatchError when too small.
    """
    if isinstance(group, str):
        group = grp.get_group(group)
    anchor, h, w, poly_pat = fd_frame(group, lattice)
    if rgba.shape[0] < h - 2 or rgba.shape[1] < w - 2:
        raise FDShapeMismatchError(
            f"FD image {rgba.shape[1]}x{rgba.shape[0]} cannot cover the "
            f"{w}x{h} FD frame of {group.name}")
    img = np.zeros((h, w, 4))
    ch = min(h, rgba.shape[0])
    cw = min(w, rgba.shape[1])
    img[:ch, :cw] = rgba[:ch, :cw]
    mask = _polygon_mask(poly_pat, anchor, h, w)
    img[:, :, 3] = np.where(mask, img[:, :, 3], 0.0)
    indices = None
    if palette is not None:
        pal = np.asarray(palette, float) / 255.0
        d = np.linalg.norm(img[:, :, None, :3] - pal[None, None, :, :], axis=3)
        indices = d.argmin(axis=2).astype(np.int16)
    fd = FundamentalDomain(img, group.fd_polygon.copy(), anchor,
                           palette=palette, indices=indices)
    _extend_outside(fd, mask)
    return fd


def _extend_outside(fd: FundamentalDomain, mask: np.ndarray) -> None:
    """Fill pixels outside the polygon with the nearest inside value so that
    interpolation near the FD boundary never bleeds in garbage."""
    if mask.all():
        return
    _, (iy, ix) = ndimage.distance_transform_edt(~mask, return_indices=True)
    fd.rgba[:, :, :3] = fd.rgba[iy, ix, :3]
    if fd.indices is not None:
        fd.indices = fd.indices[iy, ix]


def random_fd(group, lattice, palette: list[RGB], seed: int = 0,
              blobs: int = 6) -> FundamentalDomain:
    """Random multi-color blob FD: the standard test/demo fixture."""
    if isinstance(group, str):
        group = grp.get_group(group)
    anchor, h, w, poly_pat = fd_frame(group, lattice)
    rng = np.random.default_rng(seed)
    lo = poly_pat.min(axis=0)
    hi = poly_pat.max(axis=0)

    def painter(px, py):
        idx = np.zeros(px.shape, dtype=np.int16)
        for _ in range(blobs):
            c = rng.uniform(lo, hi)
            r = rng.uniform(0.08, 0.24) * max(hi[0] - lo[0], hi[1] - lo[1])
            color = rng.integers(1, len(palette))
            hit = (px - c[0]) ** 2 + (py - c[1]) ** 2 <= r * r
            idx[hit] = color
        return idx

    return fd_from_painter(group, lattice, painter, palette=palette)


# ---------------------------------------------------------------------------
# Color schemes
# ---------------------------------------------------------------------------

def resolve_color_scheme(group: grp.WallpaperGroup,
                         scheme: dict[str, list[int]] | None,
                         n_colors: int) -> np.ndarray:
    """Expand a per-generator permutation assignment to every coset op.

    Returns perms of shape (point_group_order, n_colors).  Raises
    InconsistentSchemeError when the assignment is not a homomorphism from
    the coset group to the permutation group, or when the assigned ops do
    not generate every coset.
    """
    n_ops = len(group.ops)
    identity = tuple(range(n_colors))
    if not scheme:
        return np.tile(np.arange(n_colors, dtype=np.int16), (n_ops, 1))
    perms: dict[int, tuple[int, ...]] = {group.op_index("e"): identity}
    if scheme:
        for name, p in scheme.items():
            idx = group.op_index(name)
            tp = tuple(int(v) for v in p)
            if sorted(tp) != list(range(n_colors)):
                raise InconsistentSchemeError(
                    f"assignment for {name!r} is not a bijection on "
                    f"{n_colors} colors: {p}")
            if idx in perms and perms[idx] != tp:
                raise InconsistentSchemeError(f"conflicting assignment for {name!r}")
            perms[idx] = tp
    table = group.multiplication_table()
    changed = True
    while changed:
        changed = False
        known = list(perms.items())
        for i, pi in known:
            for j, pj in known:
                k = int(table[i, j])
                pk = tuple(pi[pj[c]] for c in range(n_colors))
                if k in perms:
                    if perms[k] != pk:
                        raise InconsistentSchemeError(
                            f"assignment fails the homomorphism check at "
                            f"{group.ops[i].name} * {group.ops[j].name}")
                else:
                    perms[k] = pk
                    changed = True
    if len(perms) != n_ops:
        missing = [op.name for i, op in enumerate(group.ops) if i not in perms]
        raise InconsistentSchemeError(
            f"scheme does not reach ops {missing}; assign permutations to "
            f"enough generators")
    return np.array([perms[i] for i in range(n_ops)], dtype=np.int16)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def _ops_inverse_array(group: grp.WallpaperGroup) -> np.ndarray:
    cosets = group.cosets()
    arr = np.empty((len(cosets), 6))
    for i, op in enumerate(cosets):
        Minv, tinv = op.inverse_affine()
        arr[i] = [Minv[0, 0], Minv[0, 1], Minv[1, 0], Minv[1, 1], tinv[0], tinv[1]]
    return arr


def _coset_perm_rows(group: grp.WallpaperGroup, perms: np.ndarray) -> np.ndarray:
    """Per-coset permutation rows: centering copies reuse the point op row."""
    n = len(group.ops)
    if not group.centered:
        return perms
    return np.vstack([perms, perms])


def _check_canvas(group, lattice, width, height):
    corners = lattice.to_pattern(np.array([[0, 0], [1, 0], [0, 1], [1, 1]], float))
    span = corners.max(axis=0) - corners.min(axis=0)
    if width < span[0] - 1e-9 or height < span[1] - 1e-9:
        raise CanvasTooSmallError(
            f"canvas {width}x{height} smaller than one unit cell "
            f"({span[0]:.1f}x{span[1]:.1f})")


def _check_fd(fd: FundamentalDomain, group: grp.WallpaperGroup):
    if fd.polygon.shape != group.fd_polygon.shape or \
            not np.allclose(fd.polygon, group.fd_polygon, atol=1e-9):
        raise FDShapeMismatchError(
            f"FD polygon does not match the {group.name} fundamental domain")


def generate(fd: FundamentalDomain, group: grp.WallpaperGroup | str,
             lattice: Lattice, width: int, height: int, *,
             resampling: str = "bilinear", supersample: int = 2,
             color_scheme: dict[str, list[int]] | None = None,
             origin=(0.0, 0.0)) -> RasterPattern:
    """Render a (width x height) pattern from the FD under the group.

    resampling: "bilinear" (default) or "nearest" FD sampling.
    color_scheme: optional op-name -> palette-permutation mapping (indexed
    FDs only); lattice translations always preserve colors.
    origin: pattern coordinates of the cell origin inside the canvas.
    """
    if isinstance(group, str):
        group = grp.get_group(group)
    grp.require_compatible(group, lattice)
    _check_canvas(group, lattice, width, height)
    _check_fd(fd, group)
    if resampling not in ("bilinear", "nearest"):
        raise ValueError(f"unknown resampling {resampling!r}")

    if color_scheme is not None:
        if fd.indices is None or fd.palette is None:
            raise InconsistentSchemeError("color schemes need an indexed FD")
        perms = resolve_color_scheme(group, color_scheme, len(fd.palette))
    else:
        n_colors = len(fd.palette) if fd.palette else 1
        perms = np.tile(np.arange(n_colors, dtype=np.int16), (len(group.ops), 1))

    cosets = group.cosets()
    K = len(cosets)
    coset_perms = _coset_perm_rows(group, perms)
    if fd.indices is not None and fd.palette is not None:
        pal = np.asarray(fd.palette, float) / 255.0
        stack = np.empty((K, fd.shape[0], fd.shape[1], 3))
        for k in range(K):
            stack[k] = pal[coset_perms[k][fd.indices]]
    else:
        stack = np.broadcast_to(fd.rgba[None, :, :, :3],
                                (K, fd.shape[0], fd.shape[1], 3)).copy()

    kern = get_backend()
    out = np.zeros((height, width, 3))
    kern.render_rgb(out, np.ascontiguousarray(stack),
                    np.ascontiguousarray(lattice.inverse_matrix()),
                    np.ascontiguousarray(lattice.matrix()),
                    _ops_inverse_array(group),
                    np.ascontiguousarray(_ccw_polygon(group.fd_polygon)),
                    np.asarray(fd.anchor, float), np.asarray(origin, float),
                    int(supersample), resampling == "bilinear")
    rgb = np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)
    return RasterPattern(rgb, lattice_annotation=lattice,
                         meta={"group": group.name})


def generate_indexed(fd: FundamentalDomain, group: grp.WallpaperGroup | str,
                     lattice: Lattice, width: int, height: int, *,
                     color_scheme: dict[str, list[int]] | None = None,
                     origin=(0.0, 0.0)) -> RasterPattern:
    """Palette-indexed rendering (nearest sampling, no supersampling)."""
    if isinstance(group, str):
        group = grp.get_group(group)
    grp.require_compatible(group, lattice)
    _check_canvas(group, lattice, width, height)
    _check_fd(fd, group)
    if fd.indices is None or fd.palette is None:
        raise ValueError("generate_indexed needs an indexed FD")
    perms = resolve_color_scheme(group, color_scheme, len(fd.palette))
    claim, fdx, fdy = claim_map(group, lattice, width, height, fd.anchor, origin)
    ux = np.clip(np.rint(fdx).astype(np.int64), 0, fd.shape[1] - 1)
    uy = np.clip(np.rint(fdy).astype(np.int64), 0, fd.shape[0] - 1)
    base_idx = fd.indices[uy, ux]
    coset_perms = _coset_perm_rows(group, perms)
    k = np.clip(claim, 0, len(coset_perms) - 1).astype(np.int64)
    out = coset_perms[k, base_idx.astype(np.int64)].astype(np.int16)
    return RasterPattern(out, palette=list(fd.palette),
                         lattice_annotation=lattice, meta={"group": group.name})


def claim_map(group: grp.WallpaperGroup | str, lattice: Lattice,
              width: int, height: int, anchor, origin=(0.0, 0.0)):
    """Per-pixel claiming coset index plus FD sample coordinates."""
    if isinstance(group, str):
        group = grp.get_group(group)
    kern = get_backend()
    claim = np.zeros((height, width), dtype=np.int64)
    fdx = np.zeros((height, width))
    fdy = np.zeros((height, width))
    kern.render_claim(claim, fdx, fdy,
                      np.ascontiguousarray(lattice.inverse_matrix()),
                      np.ascontiguousarray(lattice.matrix()),
                      _ops_inverse_array(group),
                      np.ascontiguousarray(_ccw_polygon(group.fd_polygon)),
                      np.asarray(anchor, float), np.asarray(origin, float))
    return claim, fdx, fdy


# ---------------------------------------------------------------------------
# Overlap composition
# ---------------------------------------------------------------------------

def overlap_compose(a: RasterPattern, b: RasterPattern, blend: str = "over",
                    registration: Isometry2 | None = None,
                    background: RGB | None = None) -> RasterPattern:
    """Pixelwise combination of two patterns.

    blend "over": pixels of b that differ from b's background replace a's
    (background defaults to b's palette entry 0, else white).
    blend "average": mean of the two layers.
    registration maps a-canvas coordinates into b's canvas; identity means
    the canvases must match exactly (SizeMismatchError otherwise).
    """
    if blend not in ("over", "average"):
        raise ValueError(f"unknown blend rule {blend!r}")
    ident = registration is None or registration.is_identity()
    if ident and (a.height, a.width) != (b.height, b.width):
        raise SizeMismatchError(
            f"canvas {a.width}x{a.height} vs {b.width}x{b.height} with "
            f"identity registration")
    da = a.rgb().astype(np.int16)
    db_img = b.rgb()
    H, W = a.height, a.width
    if ident:
        db = db_img.astype(np.int16)
        valid = np.ones((H, W), dtype=bool)
    else:
        ys, xs = np.mgrid[0:H, 0:W]
        pts = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(float)
        q = registration.apply_many(pts)
        qx = np.rint(q[:, 0]).astype(np.int64)
        qy = np.rint(q[:, 1]).astype(np.int64)
        ok = (qx >= 0) & (qy >= 0) & (qx < b.width) & (qy < b.height)
        db = np.zeros((H * W, 3), dtype=np.int16)
        db[ok] = db_img[qy[ok], qx[ok]]
        db = db.reshape(H, W, 3)
        valid = ok.reshape(H, W)
    if blend == "average":
        out = np.where(valid[:, :, None], (da + db) // 2, da)
        return RasterPattern(out.astype(np.uint8),
                             lattice_annotation=a.lattice_annotation)
    if background is None:
        background = b.palette[0] if b.palette else (255, 255, 255)
    bg = np.array(background, dtype=np.int16)
    opaque = valid & np.any(db != bg[None, None, :], axis=2)
    out = np.where(opaque[:, :, None], db, da)
    return RasterPattern(out.astype(np.uint8),
                         lattice_annotation=a.lattice_annotation)
