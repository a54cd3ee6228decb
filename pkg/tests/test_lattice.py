"""Region placement, trisection points, and smoother support masks."""

import numpy as np
import pytest

from markovgap.errors import GeometryError
from markovgap.lattice import (
    Lattice,
    build_tripartition,
    default_margin,
    smoother_support,
)


def test_mode_indexing_roundtrip():
    lat = Lattice(5, 4, layers=2)
    assert lat.n_modes == 40
    for mode in range(lat.n_modes):
        x, y, layer = lat.site_of(mode)
        assert lat.mode_of(x, y, layer) == mode


def test_mode_indexing_wraps_periodically():
    lat = Lattice(6, 5)
    assert lat.mode_of(-1, -1) == lat.mode_of(5, 4)
    assert lat.mode_of(6, 5) == lat.mode_of(0, 0)


def test_mode_indexing_rejects_bad_layer():
    lat = Lattice(4, 4)
    with pytest.raises(GeometryError):
        lat.mode_of(0, 0, layer=1)
    with pytest.raises(GeometryError):
        lat.site_of(16)


def test_default_margin():
    assert default_margin(0) == 8
    assert default_margin(3) == 8
    assert default_margin(5) == 10


# ---------------------------------------------------------------------------
# tripartition
# ---------------------------------------------------------------------------

def test_tripartition_centered_placement():
    lat = Lattice(32, 24)
    tri = build_tripartition(lat, 6, 6)
    assert tri.anchor == (10, 9)
    assert tri.south == (15.5, 8.5)
    assert tri.north == (15.5, 14.5)
    assert tri.interface_length == 6
    assert tri.mask_a.size == 36
    assert tri.mask_b.size == 36
    assert not set(tri.mask_a) & set(tri.mask_b)


def test_tripartition_mask_contents():
    lat = Lattice(32, 24)
    tri = build_tripartition(lat, 6, 6)
    x0, y0 = tri.anchor
    expected_a = sorted(lat.mode_of(x, y)
                        for x in range(x0, x0 + 6)
                        for y in range(y0, y0 + 6))
    assert tri.mask_a.tolist() == expected_a


def test_tripartition_unequal_regions():
    lat = Lattice(36, 28)
    tri = build_tripartition(lat, 4, 8)
    x0, y0 = tri.anchor
    assert tri.mask_a.size == 16
    assert tri.mask_b.size == 64
    assert tri.interface_length == 4
    # trisections sit at the ends of the shared bottom-aligned interface
    assert tri.south == (x0 + 3.5, y0 - 0.5)
    assert tri.north == (x0 + 3.5, y0 + 3.5)


def test_tripartition_two_layers_doubles_masks():
    lat = Lattice(32, 24, layers=2)
    tri = build_tripartition(lat, 6, 6)
    assert tri.mask_a.size == 72
    # second-layer modes are first-layer modes shifted by n_sites
    half = tri.mask_a[:36]
    assert np.array_equal(tri.mask_a[36:], half + lat.n_sites)


def test_tripartition_margin_enforced():
    with pytest.raises(GeometryError):
        build_tripartition(Lattice(20, 20), 6, 6)  # only 4 sites of margin
    # same block fits once the margin is relaxed
    tri = build_tripartition(Lattice(20, 20), 6, 6, margin_min=4)
    assert tri.anchor == (4, 7)


def test_tripartition_explicit_anchor():
    lat = Lattice(40, 30)
    tri = build_tripartition(lat, 5, 5, anchor=(12, 10))
    assert tri.anchor == (12, 10)
    with pytest.raises(GeometryError):
        build_tripartition(lat, 5, 5, anchor=(1, 10))


# ---------------------------------------------------------------------------
# smoother supports
# ---------------------------------------------------------------------------

def disk_counts(radius):
    lat = Lattice(48, 32)
    tri = build_tripartition(lat, 8, 8)
    sup = smoother_support(tri, "two_circles", radius)
    return [m.size for m in sup.masks]


def test_disk_site_counts():
    # half-integer centers: R=1 -> 4, R=2 -> 12, R=3 -> 32, R=4 -> 52
    assert disk_counts(1) == [4, 4]
    assert disk_counts(2) == [12, 12]
    assert disk_counts(3) == [32, 32]
    assert disk_counts(4) == [52, 52]


def test_two_circles_masks_are_disjoint_and_ordered():
    lat = Lattice(48, 32)
    tri = build_tripartition(lat, 8, 8)
    sup = smoother_support(tri, "two_circles", 3)
    north, south = sup.masks
    assert not set(north) & set(south)
    assert sup.centers == (tri.north, tri.south)
    # all north-disk sites sit above all south-disk sites
    ys_n = [lat.site_of(m)[1] for m in north]
    ys_s = [lat.site_of(m)[1] for m in south]
    assert min(ys_n) > max(ys_s)


def test_joint_mask_is_union_of_disks():
    lat = Lattice(48, 32)
    tri = build_tripartition(lat, 8, 8)
    circles = smoother_support(tri, "two_circles", 4)
    joint = smoother_support(tri, "joint", 4)
    assert len(joint.masks) == 1
    union = np.union1d(*circles.masks)
    assert np.array_equal(joint.masks[0], union)


def test_strip_dimensions():
    lat = Lattice(48, 32)
    tri = build_tripartition(lat, 8, 8)
    sup = smoother_support(tri, "strip", 3)
    assert len(sup.masks) == 1
    assert sup.masks[0].size == 2 * 3 * 8  # 2R wide, interface_length tall
    xs = {lat.site_of(m)[0] for m in sup.masks[0]}
    assert len(xs) == 6


def test_supports_cover_all_layers():
    lat = Lattice(48, 32, layers=2)
    tri = build_tripartition(lat, 8, 8)
    sup = smoother_support(tri, "two_circles", 4)
    assert [m.size for m in sup.masks] == [104, 104]


def test_overlapping_disks_rejected():
    lat = Lattice(48, 32)
    tri = build_tripartition(lat, 6, 6)
    # interface length 6: radius-4 disks centered 6 apart share sites
    with pytest.raises(GeometryError):
        smoother_support(tri, "two_circles", 4, margin_min=2)


def test_degenerate_interface_rejects_touching_disks():
    lat = Lattice(24, 24)
    tri = build_tripartition(lat, 1, 1, margin_min=4)
    assert tri.interface_length == 1
    with pytest.raises(GeometryError):
        smoother_support(tri, "two_circles", 1, margin_min=4)


def test_support_margin_and_validation():
    lat = Lattice(30, 24)
    tri = build_tripartition(lat, 6, 6, margin_min=6)
    # default margin for R=4 is 8; this placement only leaves 6
    with pytest.raises(GeometryError):
        smoother_support(tri, "two_circles", 4)
    with pytest.raises(GeometryError):
        smoother_support(tri, "two_circles", 0)
    with pytest.raises(GeometryError):
        smoother_support(tri, "hexagon", 2)
