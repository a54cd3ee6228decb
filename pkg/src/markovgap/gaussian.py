"""Entanglement toolkit for number-conserving free-fermion (Gaussian) states.

Every quantity here is a functional of the two-point function

    C_ij = <c^dag_i c_j>,

a Hermitian matrix with spectrum in [0, 1].  Pure Gaussian states satisfy
C^2 = C.  All entropies are returned in nats.

The reflected (canonically purified) state of a subsystem covariance C_AB is
again Gaussian, with doubled covariance

    C^R = [[ C_AB,  K   ],
           [ K,     1 - C_AB ]],        K = sqrt(C_AB (1 - C_AB)),

where the auxiliary copy of mode i sits at index n + i (n = dim of C_AB).
The reflected entropy S_R(A:B) is the entanglement entropy of A plus its
mirror A' in C^R, and the Markov gap is

    h(A:B) = S_R(A:B) - I(A:B) >= 0.

Matrix functions are always evaluated through Hermitian eigendecomposition,
never through series expansions, with eigenvalues clamped away from the
endpoints of [0, 1] before taking logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.special import xlogy

from .errors import NumericError

__all__ = [
    "CovarianceMatrix",
    "as_mask",
    "relative_positions",
    "entanglement_hamiltonian",
    "entropy",
    "entropy_from_spectrum",
    "mutual_information",
    "reflected_covariance",
    "reflected_entropy",
    "markov_gap",
    "restrict",
]

#: Hermiticity tolerance enforced at construction time.
HERMITICITY_TOL = 1e-12
#: Allowed excursion of eigenvalues outside [0, 1] before an operation
#: declares the covariance corrupt.
SPECTRUM_TOL = 1e-6
#: Default clamp for entropy sums: eigenvalues this close to 0 or 1
#: contribute exactly zero.
ENTROPY_EPS = 1e-12
#: Default clamp for entanglement-Hamiltonian logarithms.
LOG_EPS = 1e-8


@dataclass(frozen=True)
class CovarianceMatrix:
    """Two-point function C_ij = <c^dag_i c_j> of a fermionic Gaussian state.

    Parameters
    ----------
    mat : ndarray
        Square complex matrix.  Hermiticity is enforced at construction
        (tolerance ``HERMITICITY_TOL``); the stored copy is exactly
        Hermitized.  The spectrum constraint (eigenvalues in [0, 1] up to
        ``SPECTRUM_TOL``) is checked by every operation that
        eigendecomposes the matrix.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NumericError(f"covariance must be square, got shape {m.shape}")
        dev = np.abs(m - m.conj().T).max() if m.size else 0.0
        if dev > HERMITICITY_TOL:
            raise NumericError(f"covariance not Hermitian: max deviation {dev:.3e}")
        m = 0.5 * (m + m.conj().T)
        m = np.ascontiguousarray(m, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def restrict(self, mask) -> "CovarianceMatrix":
        """Principal submatrix on the modes in ``mask`` (sorted indices)."""
        mask = as_mask(mask, self.dim)
        return CovarianceMatrix(self.mat[np.ix_(mask, mask)])

    def purity_defect(self) -> float:
        """Largest entry of C^2 - C; ~0 for pure states."""
        c = self.mat
        return float(np.abs(c @ c - c).max())

    def is_pure(self, tol: float = 1e-7) -> bool:
        return self.purity_defect() <= tol

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, validated against [0, 1] and clipped."""
        return _validated_spectrum(np.linalg.eigvalsh(self.mat))


def as_mask(mask, dim: int) -> np.ndarray:
    """Validate a mode mask: sorted unique integers inside ``range(dim)``."""
    m = np.asarray(mask, dtype=np.intp)
    if m.ndim != 1:
        raise NumericError("mode mask must be one-dimensional")
    if m.size and (m.min() < 0 or m.max() >= dim):
        raise NumericError(
            f"mode mask entries must lie in [0, {dim}), got range "
            f"[{m.min()}, {m.max()}]"
        )
    if np.any(np.diff(m) <= 0):
        raise NumericError("mode mask must be strictly increasing")
    return m


def relative_positions(universe, mask) -> np.ndarray:
    """Positions of ``mask`` entries inside the sorted index list ``universe``.

    Used to re-express absolute lattice mode indices in the indexing of a
    restricted covariance matrix.
    """
    universe = np.asarray(universe, dtype=np.intp)
    mask = np.asarray(mask, dtype=np.intp)
    pos = np.searchsorted(universe, mask)
    if np.any(pos >= universe.size) or np.any(universe[pos] != mask):
        raise NumericError("mask contains modes outside the given universe")
    return pos


def _validated_spectrum(vals: np.ndarray) -> np.ndarray:
    if vals.size and (vals.min() < -SPECTRUM_TOL or vals.max() > 1.0 + SPECTRUM_TOL):
        raise NumericError(
            "covariance spectrum outside [0, 1]: "
            f"[{vals.min():.3e}, {vals.max():.3e}]"
        )
    return np.clip(vals, 0.0, 1.0)


def _eigh(mat: np.ndarray):
    """Hermitian eigendecomposition with spectrum validation/clipping."""
    vals, vecs = sla.eigh(mat, driver="evr")
    return _validated_spectrum(vals), vecs


def entropy_from_spectrum(vals: np.ndarray, eps: float = ENTROPY_EPS) -> float:
    """Von Neumann entropy sum over occupation eigenvalues, in nats.

    Eigenvalues within ``eps`` of 0 or 1 contribute exactly zero
    (0 log 0 = 0 convention).
    """
    p = np.clip(np.asarray(vals, dtype=float), 0.0, 1.0)
    p = p[(p > eps) & (p < 1.0 - eps)]
    s = -xlogy(p, p) - xlogy(1.0 - p, 1.0 - p)
    return float(np.sum(s))


def entropy(cov: CovarianceMatrix, eps: float = ENTROPY_EPS) -> float:
    """Entanglement entropy S = -Tr[C log C + (1-C) log(1-C)] in nats."""
    return entropy_from_spectrum(cov.spectrum(), eps=eps)


def entanglement_hamiltonian(cov: CovarianceMatrix, eps: float = LOG_EPS) -> np.ndarray:
    """Single-particle entanglement Hamiltonian h = log[(1 - C) / C].

    The reduced density matrix is rho = exp(-sum_ij h_ij c^dag_i c_j) / Z.
    Eigenvalues of C are clamped to [eps, 1 - eps] before the logarithm, so
    modes pinned at occupation 0 or 1 acquire the finite energies
    +-log((1 - eps) / eps).
    """
    vals, vecs = _eigh(cov.mat)
    vals = np.clip(vals, eps, 1.0 - eps)
    ent = np.log((1.0 - vals) / vals)
    h = (vecs * ent) @ vecs.conj().T
    return 0.5 * (h + h.conj().T)


def mutual_information(cov: CovarianceMatrix, mask_a, mask_b) -> float:
    """I(A:B) = S(A) + S(B) - S(AB) for disjoint mode masks A, B."""
    mask_a = as_mask(mask_a, cov.dim)
    mask_b = as_mask(mask_b, cov.dim)
    if np.intersect1d(mask_a, mask_b).size:
        raise NumericError("mutual information requires disjoint masks")
    s_a = entropy(cov.restrict(mask_a))
    s_b = entropy(cov.restrict(mask_b))
    s_ab = entropy(cov.restrict(np.union1d(mask_a, mask_b)))
    return s_a + s_b - s_ab


def _reflected_blocks(c_ab: np.ndarray):
    """Eigendecompose C_AB and return (r, V, K) with K = sqrt(C(1-C))."""
    r, v = _eigh(c_ab)
    k = (v * np.sqrt(r * (1.0 - r))) @ v.conj().T
    return r, v, 0.5 * (k + k.conj().T)


def reflected_covariance(cov_ab: CovarianceMatrix) -> CovarianceMatrix:
    """Covariance of the canonical purification of ``cov_ab``.

    Doubles the mode count; the auxiliary partner of mode i is mode n + i.
    The result is pure by construction: (C^R)^2 = C^R.
    """
    c = cov_ab.mat
    n = c.shape[0]
    _, _, k = _reflected_blocks(c)
    out = np.empty((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = c
    out[:n, n:] = k
    out[n:, :n] = k
    out[n:, n:] = np.eye(n) - c
    return CovarianceMatrix(out)


def reflected_entropy(cov: CovarianceMatrix, mask_a, mask_b) -> float:
    """Reflected entropy S_R(A:B) from the covariance restricted to A u B.

    Builds the doubled covariance of the canonical purification of C_AB and
    returns the entanglement entropy of A together with its mirror copy A'.
    """
    mask_a = as_mask(mask_a, cov.dim)
    mask_b = as_mask(mask_b, cov.dim)
    if np.intersect1d(mask_a, mask_b).size:
        raise NumericError("reflected entropy requires disjoint masks")
    ab = np.union1d(mask_a, mask_b)
    c_ab = cov.mat[np.ix_(ab, ab)]
    n = ab.size
    pos_a = relative_positions(ab, mask_a)
    _, _, k = _reflected_blocks(c_ab)
    # Assemble only the AA' block of C^R: [[C_AA, K_AA], [K_AA, (1-C)_AA]].
    ixa = np.ix_(pos_a, pos_a)
    na = pos_a.size
    blk = np.empty((2 * na, 2 * na), dtype=complex)
    blk[:na, :na] = c_ab[ixa]
    blk[:na, na:] = k[ixa]
    blk[na:, :na] = k[ixa]
    blk[na:, na:] = np.eye(n)[ixa] - c_ab[ixa]
    vals = _validated_spectrum(np.linalg.eigvalsh(blk))
    return entropy_from_spectrum(vals)


def markov_gap(cov: CovarianceMatrix, mask_a, mask_b) -> float:
    """Markov gap h(A:B) = S_R(A:B) - I(A:B), in nats.

    Non-negative up to numerical error (worst case about -1e-8); vanishes
    exactly on sum-of-triangle states.
    """
    return reflected_entropy(cov, mask_a, mask_b) - mutual_information(
        cov, mask_a, mask_b
    )


def restrict(cov: CovarianceMatrix, mask) -> CovarianceMatrix:
    """Principal submatrix of the covariance on ``mask`` (free function form)."""
    return cov.restrict(mask)
