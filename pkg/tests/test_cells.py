import numpy as np
import pytest

from planesym.cells import proper_unit_cell
from planesym.errors import IncompatibleLatticeError
from planesym.groups import CATALOG, GROUP_NAMES
from planesym.lattice import make_lattice


def spec_for(group):
    return proper_unit_cell(group, make_lattice(CATALOG[group].lattice_class, 60))


def test_p1_fd_is_whole_cell():
    spec = spec_for("p1")
    assert len(spec.fd_copies) == 1
    assert spec.fd_area_pattern() == pytest.approx(spec.primitive_cell_area())


def test_p6m_has_12_triangle_copies_with_sixfold_corners():
    spec = spec_for("p6m")
    assert len(spec.fd_copies) == 12
    assert len(spec.fd_polygon) == 3
    corner_orders = [p.order for p in spec.special_points
                     if np.allclose(p.fractional, [0, 0], atol=1e-9)]
    assert corner_orders == [6]


def test_p4g_corners_and_center_are_fourfold():
    spec = spec_for("p4g")
    four = [p for p in spec.special_points if p.order == 4]
    fracs = {tuple(np.round(p.fractional, 6)) for p in four}
    assert (0.0, 0.0) in fracs
    assert (0.5, 0.5) in fracs


def test_cmm_primitive_cell_corner_edge_center_classes_distinct():
    spec = spec_for("cmm")
    p, q = spec.primitive_basis()
    B = spec.lattice.matrix()
    Binv = np.linalg.inv(B)

    def class_at(point):
        f = Binv @ point
        for sp in spec.special_points:
            d = sp.fractional - f
            d = d - np.round(d)
            # compare modulo conventional translations and centering
            dc = sp.fractional - f - 0.5
            dc = dc - np.round(dc)
            if np.abs(d).max() < 1e-6 or np.abs(dc).max() < 1e-6:
                return sp.class_id
        raise AssertionError(f"no special point at {point}")

    corner = class_at(np.zeros(2))
    edge_mid = class_at(p / 2.0)
    center = class_at((p + q) / 2.0)
    assert len({corner, edge_mid, center}) == 3


def test_fd_copies_tile_without_gap_or_overlap():
    # every pixel of a window is claimed by exactly one coset op (no -1 in
    # the claim map); per-op areas agree up to boundary-pixel ownership,
    # which the half-open convention hands to the earlier op in order
    from planesym.generate import claim_map, random_fd
    for group in ("pmg", "p3", "p4m", "cmm"):
        g = CATALOG[group]
        lattice = make_lattice(g.lattice_class, 40)
        fd = random_fd(group, lattice, [(255, 255, 255), (0, 0, 0)], seed=0)
        claim, _, _ = claim_map(group, lattice, 240, 240, fd.anchor)
        counts = np.bincount(claim.ravel(), minlength=len(g.cosets()))
        assert claim.min() >= 0
        expected = 240 * 240 / len(g.cosets())
        # boundary rows/columns land on pixel centers for axis-aligned
        # cells, so allow the edge band on top of the exact share
        assert counts.min() > 0.6 * expected
        assert np.all(np.abs(counts - expected) < 0.4 * expected)


def test_incompatible_lattice_raises():
    with pytest.raises(IncompatibleLatticeError):
        proper_unit_cell("p3", make_lattice("square", 50))


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_special_points_cover_expected_orders(name):
    spec = spec_for(name)
    orders = {p.order for p in spec.special_points}
    g = CATALOG[name]
    if g.highest_rotation_order > 1:
        assert g.highest_rotation_order in orders
        assert max(orders) == g.highest_rotation_order
    else:
        assert orders == set()


def test_axes_present_for_mirror_and_glide_groups():
    assert any(a.kind == "mirror" for a in spec_for("pm").special_axes)
    assert all(a.kind == "glide" for a in spec_for("pg").special_axes)
    cm_axes = spec_for("cm").special_axes
    assert {a.kind for a in cm_axes} == {"mirror", "glide"}
    assert not spec_for("p1").special_axes
