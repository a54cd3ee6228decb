"""Square-lattice geometry: regions, trisection points, smoother supports.

The standard arrangement places two square regions A (L_A x L_A) and
B (L_B x L_B) side by side on a periodic lattice, sharing a vertical
interface; everything else is the environment C.  The two points where
A, B and C meet ("trisections") sit at the ends of the shared interface,
at half-integer coordinates:

    south = (x0 + L_A - 1/2, y0 - 1/2)
    north = (x0 + L_A - 1/2, y0 + min(L_A, L_B) - 1/2)

with (x0, y0) the lower-left corner of A.  Smoother unitaries act on sites
within Euclidean distance R of these points (shape "two_circles"), on the
union of the two disks with a joint generator (shape "joint"), or on a
2R-wide strip covering the full interface (shape "strip").  Disk
membership uses (x - cx)^2 + (y - cy)^2 <= R^2; with half-integer centers
no site can be exactly on the boundary, so the masks are tie-free.

Mode indexing is layer-major: mode(x, y, layer) = layer*W*H + y*W + x.
Region masks always include every layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

__all__ = [
    "Lattice",
    "Tripartition",
    "SmootherSupport",
    "build_tripartition",
    "smoother_support",
    "default_margin",
]

SHAPES = ("two_circles", "joint", "strip")


@dataclass(frozen=True)
class Lattice:
    """Periodic rectangular lattice with one fermionic mode per site per layer."""

    width: int
    height: int
    layers: int = 1

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.layers < 1:
            raise GeometryError("lattice dimensions must be positive")

    @property
    def n_sites(self) -> int:
        return self.width * self.height

    @property
    def n_modes(self) -> int:
        return self.n_sites * self.layers

    def mode_of(self, x: int, y: int, layer: int = 0) -> int:
        """Mode index of a site, wrapping coordinates periodically."""
        if not 0 <= layer < self.layers:
            raise GeometryError(f"layer {layer} outside 0..{self.layers - 1}")
        return (
            layer * self.n_sites
            + (y % self.height) * self.width
            + (x % self.width)
        )

    def site_of(self, mode: int) -> tuple[int, int, int]:
        """Inverse of mode_of: (x, y, layer)."""
        if not 0 <= mode < self.n_modes:
            raise GeometryError(f"mode {mode} outside lattice")
        layer, rest = divmod(mode, self.n_sites)
        y, x = divmod(rest, self.width)
        return x, y, layer


def _block_modes(lat: Lattice, x0: int, x1: int, y0: int, y1: int) -> np.ndarray:
    """Sorted mode indices of the rectangle [x0, x1) x [y0, y1), all layers."""
    xs = np.arange(x0, x1)
    ys = np.arange(y0, y1)
    site = (ys[:, None] * lat.width + xs[None, :]).ravel()
    modes = (np.arange(lat.layers)[:, None] * lat.n_sites + site[None, :]).ravel()
    return np.sort(modes)


@dataclass(frozen=True)
class Tripartition:
    """Side-by-side square regions A and B with trisection points."""

    lattice: Lattice
    l_a: int
    l_b: int
    anchor: tuple[int, int]
    mask_a: np.ndarray = field(repr=False)
    mask_b: np.ndarray = field(repr=False)
    north: tuple[float, float]
    south: tuple[float, float]

    @property
    def interface_length(self) -> int:
        return min(self.l_a, self.l_b)


def default_margin(radius: int = 0) -> int:
    """Recommended clearance between the A u B block and the lattice edge."""
    return max(8, 2 * radius)


def build_tripartition(
    lat: Lattice,
    l_a: int,
    l_b: int,
    anchor: tuple[int, int] | None = None,
    margin_min: int = 8,
) -> Tripartition:
    """Place A (l_a x l_a) and B (l_b x l_b) side by side on the lattice.

    A occupies [x0, x0 + l_a) x [y0, y0 + l_a) and B occupies
    [x0 + l_a, x0 + l_a + l_b) x [y0, y0 + l_b), sharing their bottom
    row height.  When ``anchor`` is omitted the block is centered.  The
    block must clear the lattice boundary by ``margin_min`` sites on all
    sides (the lattice is periodic; the margin keeps the regions away
    from their own wrapped images).
    """
    if l_a < 1 or l_b < 1:
        raise GeometryError("region sizes must be positive")
    w, h = lat.width, lat.height
    span_x = l_a + l_b
    span_y = max(l_a, l_b)
    if anchor is None:
        anchor = ((w - span_x) // 2, (h - span_y) // 2)
    x0, y0 = anchor
    margins = (x0, w - x0 - span_x, y0, h - y0 - span_y)
    if min(margins) < margin_min:
        raise GeometryError(
            f"regions {l_a}x{l_a}+{l_b}x{l_b} at anchor {anchor} leave margins "
            f"{margins} on a {w}x{h} lattice; need at least {margin_min}"
        )
    mask_a = _block_modes(lat, x0, x0 + l_a, y0, y0 + l_a)
    mask_b = _block_modes(lat, x0 + l_a, x0 + span_x, y0, y0 + l_b)
    x_if = x0 + l_a - 0.5
    south = (x_if, y0 - 0.5)
    north = (x_if, y0 + min(l_a, l_b) - 0.5)
    return Tripartition(lat, l_a, l_b, (x0, y0), mask_a, mask_b, north, south)


@dataclass(frozen=True)
class SmootherSupport:
    """Mode masks a smoother unitary may act on.

    ``masks`` holds one mask per independent generator block: two disjoint
    disks for "two_circles", a single union mask for "joint", a single
    strip mask for "strip".
    """

    shape: str
    radius: int
    masks: tuple[np.ndarray, ...] = field(repr=False)
    centers: tuple[tuple[float, float], ...]


def _disk_sites(lat: Lattice, center: tuple[float, float], radius: int) -> np.ndarray:
    cx, cy = center
    xs = np.arange(int(np.floor(cx - radius)), int(np.ceil(cx + radius)) + 1)
    ys = np.arange(int(np.floor(cy - radius)), int(np.ceil(cy + radius)) + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    inside = (gx - cx) ** 2 + (gy - cy) ** 2 <= radius**2
    pts = np.stack([gx[inside], gy[inside]], axis=1)
    _check_bounds(lat, pts, f"disk of radius {radius} at {center}")
    return pts


def _check_bounds(lat: Lattice, pts: np.ndarray, what: str):
    if pts.size == 0:
        raise GeometryError(f"{what} contains no lattice sites")
    if (
        pts[:, 0].min() < 0
        or pts[:, 0].max() >= lat.width
        or pts[:, 1].min() < 0
        or pts[:, 1].max() >= lat.height
    ):
        raise GeometryError(f"{what} does not fit inside the lattice")


def _sites_to_modes(lat: Lattice, pts: np.ndarray) -> np.ndarray:
    site = pts[:, 1] * lat.width + pts[:, 0]
    modes = (np.arange(lat.layers)[:, None] * lat.n_sites + site[None, :]).ravel()
    return np.sort(modes)


def smoother_support(
    tri: Tripartition,
    shape: str,
    radius: int,
    margin_min: int | None = None,
) -> SmootherSupport:
    """Construct the smoother support masks for a tripartition.

    Raises GeometryError when the support leaves the lattice, when the
    two disks of "two_circles" overlap, or when the A u B block margins
    are below ``margin_min`` (default ``max(8, 2 * radius)``).
    """
    if shape not in SHAPES:
        raise GeometryError(f"unknown smoother shape {shape!r}; choose from {SHAPES}")
    if radius < 1:
        raise GeometryError("smoother radius must be at least 1")
    lat = tri.lattice
    if margin_min is None:
        margin_min = default_margin(radius)
    x0, y0 = tri.anchor
    span_x, span_y = tri.l_a + tri.l_b, max(tri.l_a, tri.l_b)
    margins = (x0, lat.width - x0 - span_x, y0, lat.height - y0 - span_y)
    if min(margins) < margin_min:
        raise GeometryError(
            f"margins {margins} below required {margin_min} for radius {radius}"
        )

    if shape in ("two_circles", "joint"):
        pts_n = _disk_sites(lat, tri.north, radius)
        pts_s = _disk_sites(lat, tri.south, radius)
        set_n = {tuple(p) for p in pts_n}
        set_s = {tuple(p) for p in pts_s}
        if set_n & set_s:
            raise GeometryError(
                f"disks of radius {radius} around the trisections overlap "
                f"(interface length {tri.interface_length})"
            )
        if shape == "two_circles":
            masks = (_sites_to_modes(lat, pts_n), _sites_to_modes(lat, pts_s))
        else:
            both = np.array(sorted(set_n | set_s))
            masks = (_sites_to_modes(lat, both),)
        return SmootherSupport(shape, radius, masks, (tri.north, tri.south))

    # strip: |x - x_interface| <= radius, rows spanning the interface
    cx = tri.north[0]
    xs = np.arange(int(np.floor(cx - radius)), int(np.ceil(cx + radius)) + 1)
    xs = xs[np.abs(xs - cx) <= radius]
    ys = np.arange(tri.anchor[1], tri.anchor[1] + tri.interface_length)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    _check_bounds(lat, pts, f"strip of half-width {radius}")
    return SmootherSupport(shape, radius, (_sites_to_modes(lat, pts),),
                           (tri.north, tri.south))
