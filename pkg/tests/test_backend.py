import numpy as np
import pytest

from planesym import _kernels_numba, _kernels_numpy
from planesym.backend import backend_name, get_backend, reset_backend
from planesym.generate import _ccw_polygon, _ops_inverse_array, random_fd
from planesym.groups import CATALOG
from planesym.lattice import make_lattice
from tests.conftest import PALETTE


def _setup(group="p4g", size=32.0):
    g = CATALOG[group]
    lattice = make_lattice(g.lattice_class, size)
    fd = random_fd(group, lattice, PALETTE, seed=2)
    K = len(g.cosets())
    rng = np.random.default_rng(0)
    stack = np.ascontiguousarray(rng.random((K, fd.shape[0], fd.shape[1], 3)))
    args = (np.ascontiguousarray(lattice.inverse_matrix()),
            np.ascontiguousarray(lattice.matrix()),
            _ops_inverse_array(g),
            np.ascontiguousarray(_ccw_polygon(g.fd_polygon)),
            np.asarray(fd.anchor, float), np.zeros(2))
    return stack, args


@pytest.mark.parametrize("bilinear", [True, False])
def test_render_rgb_backends_agree(bilinear):
    stack, args = _setup()
    out_nb = np.zeros((96, 96, 3))
    out_np = np.zeros((96, 96, 3))
    _kernels_numba.render_rgb(out_nb, stack, *args, 2, bilinear)
    _kernels_numpy.render_rgb(out_np, stack, *args, 2, bilinear)
    assert np.allclose(out_nb, out_np, atol=1e-9)


def test_render_claim_backends_agree():
    stack, args = _setup("p6m", 30.0)
    c1 = np.zeros((80, 80), dtype=np.int64)
    c2 = np.zeros((80, 80), dtype=np.int64)
    x1 = np.zeros((80, 80)); y1 = np.zeros((80, 80))
    x2 = np.zeros((80, 80)); y2 = np.zeros((80, 80))
    _kernels_numba.render_claim(c1, x1, y1, *args)
    _kernels_numpy.render_claim(c2, x2, y2, *args)
    assert np.array_equal(c1, c2)
    assert np.allclose(x1, x2, atol=1e-9)
    assert np.allclose(y1, y2, atol=1e-9)


@pytest.mark.parametrize("bilinear", [True, False])
def test_mismatch_backends_agree(bilinear):
    rng = np.random.default_rng(1)
    img = np.ascontiguousarray(rng.random((64, 72, 3)))
    L = np.array([[0.0, -1.0], [1.0, 0.0]])
    t = np.array([70.0, 3.0])
    a1 = _kernels_numba.mismatch_affine(img, L, t, 2, bilinear)
    a2 = _kernels_numpy.mismatch_affine(img, L, t, 2, bilinear)
    assert a1[1] == a2[1] and a1[2] == a2[2]
    assert a1[0] == pytest.approx(a2[0], abs=1e-9)


def test_scan_backends_agree():
    rng = np.random.default_rng(2)
    img = np.ascontiguousarray(rng.random((50, 50, 3)))
    L = np.eye(2)
    ts = rng.uniform(-20, 20, (17, 2))
    s1, o1 = _kernels_numba.scan_affine(img, L, ts, 1, True)
    s2, o2 = _kernels_numpy.scan_affine(img, L, ts, 1, True)
    assert np.allclose(s1, s2, atol=1e-9)
    assert np.allclose(o1, o2, atol=1e-12)


def test_env_flag_selects_backend(monkeypatch):
    reset_backend()
    monkeypatch.setenv("PLANESYM_BACKEND", "numpy")
    try:
        assert backend_name() == "numpy"
        assert get_backend() is _kernels_numpy
        reset_backend()
        monkeypatch.setenv("PLANESYM_BACKEND", "numba")
        assert backend_name() == "numba"
    finally:
        reset_backend()
    assert backend_name() in ("numba", "numpy")
    reset_backend()


def test_invalid_backend_value_rejected(monkeypatch):
    reset_backend()
    monkeypatch.setenv("PLANESYM_BACKEND", "cuda")
    try:
        with pytest.raises(ValueError):
            get_backend()
    finally:
        reset_backend()


def test_numpy_backend_generates_and_detects(monkeypatch):
    # a slim end-to-end pass over the fallback path
    reset_backend()
    monkeypatch.setenv("PLANESYM_BACKEND", "numpy")
    try:
        from planesym.detect import classify
        from planesym.generate import generate
        lattice = make_lattice("square", 48)
        fd = random_fd("p4", lattice, PALETTE, seed=3)
        pat = generate(fd, "p4", lattice, 192, 192)
        assert classify(pat).group == "p4"
    finally:
        reset_backend()
