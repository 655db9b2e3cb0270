import numpy as np
import pytest

from planesym.generate import generate, random_fd
from planesym.groups import CATALOG
from planesym.lattice import make_lattice

PALETTE = [(255, 255, 255), (188, 32, 38), (24, 56, 140)]

_cache = {}


def build_fixture(group: str, size: float = 64.0, canvas: int = 384,
                  seed: int = 3, aspect: float = 0.75):
    """(pattern, lattice, fd) for a generated fixture; cached per arguments."""
    key = (group, size, canvas, seed, aspect)
    if key not in _cache:
        lattice = make_lattice(CATALOG[group].lattice_class, size=size,
                               aspect=aspect)
        fd = random_fd(group, lattice, PALETTE, seed=seed)
        pat = generate(fd, group, lattice, canvas, canvas)
        _cache[key] = (pat, lattice, fd)
    return _cache[key]


@pytest.fixture(scope="session")
def fixture_factory():
    return build_fixture


@pytest.fixture(scope="session")
def palette():
    return list(PALETTE)


def centered_isometry(iso, lattice, canvas):
    """Conjugate a pattern-coordinate isometry by the lattice translation
    that moves its reference point nearest the canvas center."""
    from planesym.geometry import Isometry2
    center = np.array([canvas / 2.0, canvas / 2.0])
    if iso.kind == "rotation":
        ref = iso.center
    elif iso.axis is not None:
        ref = iso.axis.point
    else:
        ref = np.zeros(2)
    f = np.round(lattice.to_fractional((center - ref).reshape(1, 2))[0])
    v = lattice.to_pattern(f.reshape(1, 2))[0]
    tv = Isometry2.translation_by(v)
    return tv.compose(iso).compose(tv.inverse())
