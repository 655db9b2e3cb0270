"""Raster pattern representation and PNG IO.

A RasterPattern is either truecolor (H, W, 3) uint8 or palette-indexed
(H, W) integers plus a palette of RGB triples.  The indexed form is what
color-permutation machinery operates on; detection works on the RGB view.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .lattice import Lattice

RGB = tuple[int, int, int]


@dataclass
class RasterPattern:
    pixels: np.ndarray
    palette: list[RGB] | None = None
    lattice_annotation: Lattice | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            if self.palette is None:
                raise ValueError("indexed pattern requires a palette")
            if px.size and (px.min() < 0 or px.max() >= len(self.palette)):
                raise ValueError("palette index out of range")
            self.pixels = px.astype(np.int16)
        elif px.ndim == 3 and px.shape[2] == 3:
            self.pixels = px.astype(np.uint8)
        else:
            raise ValueError(f"unsupported pixel array shape {px.shape}")
        if self.height < 1 or self.width < 1:
            raise ValueError("pattern must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def indexed(self) -> bool:
        return self.pixels.ndim == 2

    def rgb(self) -> np.ndarray:
        """(H, W, 3) uint8 view/copy."""
        if not self.indexed:
            return self.pixels
        pal = np.asarray(self.palette, dtype=np.uint8)
        return pal[self.pixels]

    def rgb_float(self) -> np.ndarray:
        """(H, W, 3) float64 in [0, 1]."""
        return self.rgb().astype(np.float64) / 255.0

    def collapse_colors(self, background: int = 0) -> "RasterPattern":
        """Map every non-background palette entry to one foreground color."""
        if not self.indexed:
            raise ValueError("collapse_colors needs an indexed pattern")
        fg = next(i for i in range(len(self.palette)) if i != background)
        idx = np.where(self.pixels == background, background, fg).astype(np.int16)
        return RasterPattern(idx, palette=list(self.palette),
                             lattice_annotation=self.lattice_annotation)

    def translated(self, v: tuple[int, int]) -> "RasterPattern":
        """Cyclic shift by integer (dx, dy); keeps periodicity intact."""
        rolled = np.roll(np.roll(self.pixels, v[1], axis=0), v[0], axis=1)
        return RasterPattern(rolled, palette=self.palette,
                             lattice_annotation=self.lattice_annotation)

    def save_png(self, path) -> None:
        if self.indexed:
            im = Image.fromarray(self.pixels.astype(np.uint8), mode="P")
            flat = []
            for r, g, b in self.palette:
                flat += [r, g, b]
            im.putpalette(flat)
        else:
            im = Image.fromarray(self.pixels, mode="RGB")
        im.save(path)

    @staticmethod
    def load_png(path) -> "RasterPattern":
        im = Image.open(path)
        if im.mode == "P":
            pal = im.getpalette()
            idx = np.asarray(im, dtype=np.int16)
            n = idx.max() + 1
            palette = [tuple(pal[3 * i:3 * i + 3]) for i in range(max(n, 1))]
            return RasterPattern(idx, palette=palette)
        return RasterPattern(np.asarray(im.convert("RGB")))


def pattern_difference(a: RasterPattern, b: RasterPattern) -> float:
    """Mean normalized per-channel |difference| between equal-size patterns."""
    if (a.height, a.width) != (b.height, b.width):
        raise ValueError("patterns differ in size")
    da = a.rgb_float()
    db = b.rgb_float()
    return float(np.abs(da - db).mean())


def load_rgba_float(path) -> np.ndarray:
    """(H, W, 4) float64 RGBA in [0, 1] from any PNG."""
    im = Image.open(path).convert("RGBA")
    return np.asarray(im, dtype=np.float64) / 255.0
