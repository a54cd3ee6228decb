"""Free-fermion lattice models: magnetic Bloch bands and ground-state covariance.

A single layer is a square-lattice tight-binding model with flux 2*pi*p/q
per plaquette in the Landau gauge A = (0, B x): hopping -t on x-links and
-t * exp(2i*pi*p*x/q) on y-links, plus a chemical-potential term +mu on
every site.  Fourier transforming (c_{x,y} = (1/sqrt(N)) sum_K e^{+iK.r} c_K)
block-diagonalizes H over the magnetic Brillouin zone kx in [0, 2*pi/q),
ky in [0, 2*pi), with the q x q Bloch matrix

    h(k)_{nm} = (-2 t cos(kx + n k0) + mu) d_{nm}
                - t e^{+i ky} d_{m, n+p}  - t e^{-i ky} d_{m, n-p},

k0 = 2*pi/q, indices mod q.  The component index n labels the x-momentum
kx + n*k0, so a band eigenvector V(:, l) corresponds to the real-space
orbital

    phi(x, y) = (1/sqrt(N)) sum_n V[n, l] e^{i (kx + n k0) x} e^{i ky y}.

Filling a set of bands over the full k-grid gives the ground-state
covariance C_ij = <c_i^dag c_j> = (conj(Phi) Phi^T)_ij with Phi the
(site x orbital) amplitude matrix.  Layers are uncoupled: multi-layer
covariances are block-diagonal, one block per layer.

Complex conjugation flips the flux sign: conj(h^{(p)}(k)) = h^{(-p)}(k),
so a layer pair (p, -p) at equal mu forms a time-reversal-invariant stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .gaussian import CovarianceMatrix
from .lattice import Lattice

__all__ = [
    "ModelSpec",
    "BandSolution",
    "bloch_hamiltonian",
    "solve_bands",
    "covariance_real_space",
    "stack",
    "time_reversal_pair",
    "chern_number",
    "tr_operator",
    "real_space_hamiltonian",
]

GAP_TOL = 1e-8
CHERN_RESIDUE_TOL = 0.01


@dataclass(frozen=True)
class ModelSpec:
    """One layer: flux p/q per plaquette, hopping t, chemical potential mu.

    ``filled_bands`` is a contiguous run of band indices (ascending energy
    order) occupied in the ground state.
    """

    p: int
    q: int
    t: float = 1.0
    mu: float = 0.0
    filled_bands: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.q < 1:
            raise ConfigError("q must be a positive integer")
        bands = tuple(self.filled_bands)
        if not bands:
            raise ConfigError("filled_bands must be non-empty")
        if sorted(bands) != list(bands) or len(set(bands)) != len(bands):
            raise ConfigError("filled_bands must be strictly increasing")
        if bands[0] < 0 or bands[-1] >= self.q:
            raise ConfigError(f"filled_bands {bands} outside 0..{self.q - 1}")
        if bands != tuple(range(bands[0], bands[-1] + 1)):
            raise ConfigError("filled_bands must be a contiguous range")
        object.__setattr__(self, "filled_bands", bands)


def stack(spec: ModelSpec, copies: int) -> tuple[ModelSpec, ...]:
    """Identical decoupled copies of a layer."""
    if copies < 1:
        raise ConfigError("copies must be positive")
    return (spec,) * copies


def time_reversal_pair(spec: ModelSpec) -> tuple[ModelSpec, ModelSpec]:
    """The layer and its flux-reversed (complex-conjugate) partner."""
    return spec, replace(spec, p=-spec.p)


def bloch_hamiltonian(spec: ModelSpec, kx: float, ky: float) -> np.ndarray:
    """The q x q magnetic Bloch matrix h(k)."""
    q, p, t, mu = spec.q, spec.p, spec.t, spec.mu
    n = np.arange(q)
    h = np.zeros((q, q), dtype=complex)
    h[n, n] = -2.0 * t * np.cos(kx + n * (2.0 * np.pi / q)) + mu
    h[n, (n + p) % q] += -t * np.exp(1j * ky)
    h[n, (n - p) % q] += -t * np.exp(-1j * ky)
    return h


@dataclass(frozen=True)
class BandSolution:
    """Band energies and eigenvectors over the magnetic Brillouin zone grid."""

    spec: ModelSpec
    kxs: np.ndarray = field(repr=False)
    kys: np.ndarray = field(repr=False)
    energies: np.ndarray = field(repr=False)  # (nkx, nky, q)
    vectors: np.ndarray = field(repr=False)  # (nkx, nky, q, q), columns = bands

    def band_gap(self, bands: tuple[int, ...] | None = None) -> float:
        """Minimum spectral separation of a band set from its complement."""
        bands = self.spec.filled_bands if bands is None else tuple(bands)
        lo, hi = bands[0], bands[-1]
        gap = np.inf
        if lo > 0:
            gap = min(gap, float(np.min(self.energies[..., lo] - self.energies[..., lo - 1])))
        if hi < self.spec.q - 1:
            gap = min(gap, float(np.min(self.energies[..., hi + 1] - self.energies[..., hi])))
        return gap


def solve_bands(spec: ModelSpec, lat: Lattice) -> BandSolution:
    """Diagonalize h(k) on the k-grid the lattice supports.

    kx runs over W/q points spaced 2*pi/W in the magnetic zone, ky over H
    points spaced 2*pi/H; W must be divisible by q.
    """
    w, h = lat.width, lat.height
    if w % spec.q:
        raise ConfigError(f"lattice width {w} not divisible by q={spec.q}")
    kxs = 2.0 * np.pi * np.arange(w // spec.q) / w
    kys = 2.0 * np.pi * np.arange(h) / h
    energies = np.empty((len(kxs), len(kys), spec.q))
    vectors = np.empty((len(kxs), len(kys), spec.q, spec.q), dtype=complex)
    for i, kx in enumerate(kxs):
        for j, ky in enumerate(kys):
            e, v = np.linalg.eigh(bloch_hamiltonian(spec, kx, ky))
            energies[i, j] = e
            vectors[i, j] = v
    return BandSolution(spec, kxs, kys, energies, vectors)


def _layer_amplitudes(spec: ModelSpec, lat: Lattice, xs: np.ndarray,
                      ys: np.ndarray) -> np.ndarray:
    """Amplitude matrix Phi[site, orbital] of the filled orbitals at given sites."""
    sol = solve_bands(spec, lat)
    gap = sol.band_gap()
    if gap < GAP_TOL:
        raise NumericError(
            f"filled bands {spec.filled_bands} not gapped from the rest "
            f"(min separation {gap:.2e}); ground state ill-defined"
        )
    w, h = lat.width, lat.height
    k0 = 2.0 * np.pi / spec.q
    bands = list(spec.filled_bands)
    n_f = len(bands)
    n_sites = len(xs)
    n_orb = len(sol.kxs) * len(sol.kys) * n_f
    phi = np.empty((n_sites, n_orb), dtype=complex)
    norm = 1.0 / np.sqrt(w * h)
    # e^{i n k0 x} factors reused across k-points
    env = np.exp(1j * k0 * np.outer(xs, np.arange(spec.q)))  # (n_sites, q)
    col = 0
    for i, kx in enumerate(sol.kxs):
        ex = np.exp(1j * kx * xs)[:, None] * env  # (n_sites, q)
        for j, ky in enumerate(sol.kys):
            amp = ex @ sol.vectors[i, j][:, bands]  # (n_sites, n_f)
            phi[:, col : col + n_f] = norm * np.exp(1j * ky * ys)[:, None] * amp
            col += n_f
    return phi


def covariance_real_space(
    specs: ModelSpec | Sequence[ModelSpec],
    lat: Lattice,
    sites: np.ndarray | None = None,
) -> CovarianceMatrix:
    """Ground-state covariance C_ij = <c_i^dag c_j> on selected modes.

    ``specs`` is one ModelSpec per lattice layer (a bare spec is promoted
    to a single layer).  ``sites`` is a sorted array of mode indices; all
    modes when omitted.  Layers never mix, so the matrix is assembled
    block by block.
    """
    layer_specs = (specs,) if isinstance(specs, ModelSpec) else tuple(specs)
    if len(layer_specs) != lat.layers:
        raise ConfigError(
            f"{len(layer_specs)} layer spec(s) for a lattice with {lat.layers} layer(s)"
        )
    if sites is None:
        sites = np.arange(lat.n_modes)
    else:
        sites = np.asarray(sites, dtype=int)
        if sites.ndim != 1 or (np.diff(sites) <= 0).any():
            raise ConfigError("sites must be a strictly increasing 1-d index array")
        if sites.size and (sites[0] < 0 or sites[-1] >= lat.n_modes):
            raise ConfigError("sites outside lattice modes")
    c = np.zeros((sites.size, sites.size), dtype=complex)
    layer_of = sites // lat.n_sites
    for layer, spec in enumerate(layer_specs):
        idx = np.flatnonzero(layer_of == layer)
        if idx.size == 0:
            continue
        within = sites[idx] - layer * lat.n_sites
        xs = within % lat.width
        ys = within // lat.width
        phi = _layer_amplitudes(spec, lat, xs, ys)
        c[np.ix_(idx, idx)] = phi.conj() @ phi.T
    return CovarianceMatrix(c)


def real_space_hamiltonian(spec: ModelSpec, lat: Lattice) -> np.ndarray:
    """Single-particle Hamiltonian on one layer in the site basis (direct
    construction, for cross-checking the Bloch solution on small lattices)."""
    w, h = lat.width, lat.height
    n = w * h
    ham = np.zeros((n, n), dtype=complex)
    flux = 2.0 * np.pi * spec.p / spec.q

    def idx(x, y):
        return (y % h) * w + (x % w)

    for x in range(w):
        for y in range(h):
            ham[idx(x + 1, y), idx(x, y)] += -spec.t
            ham[idx(x, y + 1), idx(x, y)] += -spec.t * np.exp(1j * flux * x)
    ham = ham + ham.conj().T
    ham[np.arange(n), np.arange(n)] += spec.mu
    return ham


def chern_number(
    spec: ModelSpec,
    bands: tuple[int, ...] | None = None,
    grid: tuple[int, int] = (24, 24),
) -> tuple[int, float]:
    """Chern number of a band set via plaquette Berry fluxes.

    Discretizes the magnetic Brillouin zone on a (grid+1) point mesh
    (boundary momenta diagonalized afresh; per-point gauge cancels in
    each plaquette), takes U(1) link variables det(psi^dag(k) psi(k')),
    and sums the wrapped plaquette fluxes.  Returns (integer, residue);
    raises NumericError if the residue exceeds 0.01 or the band set is
    not gapped from its complement on the mesh.
    """
    bands = spec.filled_bands if bands is None else tuple(bands)
    if bands != tuple(range(bands[0], bands[-1] + 1)):
        raise ConfigError("band set must be a contiguous range")
    nx, ny = grid
    kxs = (2.0 * np.pi / spec.q) * np.arange(nx + 1) / nx
    kys = 2.0 * np.pi * np.arange(ny + 1) / ny
    frames = np.empty((nx + 1, ny + 1, spec.q, len(bands)), dtype=complex)
    lo, hi = bands[0], bands[-1]
    gap = np.inf
    for i, kx in enumerate(kxs):
        for j, ky in enumerate(kys):
            e, v = np.linalg.eigh(bloch_hamiltonian(spec, kx, ky))
            frames[i, j] = v[:, lo : hi + 1]
            if lo > 0:
                gap = min(gap, e[lo] - e[lo - 1])
            if hi < spec.q - 1:
                gap = min(gap, e[hi + 1] - e[hi])
    if gap < GAP_TOL:
        raise NumericError(
            f"band set {bands} not gapped from complement (min separation {gap:.2e})"
        )

    def link(a, b):
        return np.linalg.det(a.conj().T @ b)

    total = 0.0
    for i in range(nx):
        for j in range(ny):
            u = (
                link(frames[i, j], frames[i + 1, j])
                * link(frames[i + 1, j], frames[i + 1, j + 1])
                * link(frames[i + 1, j + 1], frames[i, j + 1])
                * link(frames[i, j + 1], frames[i, j])
            )
            total += np.angle(u)
    total /= 2.0 * np.pi
    integer = int(np.rint(total))
    residue = abs(total - integer)
    if residue > CHERN_RESIDUE_TOL:
        raise NumericError(
            f"Berry flux sum {total:.6f} too far from an integer "
            f"(residue {residue:.2e}); refine the grid"
        )
    return integer, residue


def tr_operator(lat: Lattice) -> np.ndarray:
    """Single-particle time-reversal matrix S for a two-layer stack.

    T c_(0,s) T^-1 = c_(1,s) and T c_(1,s) T^-1 = -c_(0,s): S swaps the
    layer blocks with a sign, S = [[0, -I], [I, 0]].  S is real with
    S^2 = -I; a covariance is TR-invariant iff S conj(C) S^-1 = C, and a
    smoother generator X is TR-symmetric iff S conj(X) S^-1 = X.
    """
    if lat.layers != 2:
        raise ConfigError("time reversal needs exactly two layers")
    n = lat.n_sites
    s = np.zeros((2 * n, 2 * n))
    s[:n, n:] = -np.eye(n)
    s[n:, :n] = np.eye(n)
    return s
