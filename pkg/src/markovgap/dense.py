"""Brute-force statevector reference implementations.

Everything in this module works directly with many-body state vectors and
density matrices in the occupation-number basis, with no Gaussian shortcuts,
so it can be used to validate the covariance-matrix toolkit on small systems.

Conventions
-----------
Basis states are labeled by integers whose bit i is the occupation of mode i,
and the corresponding product state is built by applying creation operators
in ascending mode order:

    |n> = (c_0^dag)^{n_0} (c_1^dag)^{n_1} ... |vac>.

Fermionic operators carry the usual Jordan-Wigner string: acting with c_j on
|n> picks up (-1)^{sum_{k<j} n_k}.  States with ``statistics="qubit"`` use
the same layout with no strings.

Size caps keep the brute-force path honest: 14 modes for fermionic state
vectors, 18 for qubit state vectors, and density matrices of dimension at
most 2^12 for the reflected-entropy path.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import xlogy

from .errors import NumericError

__all__ = [
    "DenseState",
    "slater_statevector",
    "random_slater",
    "dense_covariance",
    "reorder_modes",
    "dense_rdm",
    "dense_entropy",
    "dense_mutual_information",
    "dense_reflected_entropy",
    "dense_markov_gap",
    "mode_operator",
    "gaussian_density_matrix",
    "ghz_state",
    "w_state",
    "toric_sots_state",
    "oracle_check",
]

MAX_FERMION_MODES = 14
#: Doubled (purified) fermionic systems may exceed the statevector cap.
MAX_FERMION_MODES_DOUBLED = 16
MAX_QUBIT_MODES = 18
MAX_RDM_DIM = 1 << 12


@dataclass(frozen=True)
class DenseState:
    """Many-body state vector over 2**n_modes occupation basis states."""

    amps: np.ndarray
    n_modes: int
    statistics: str = "fermion"  # "fermion" | "qubit"

    def __post_init__(self):
        if self.statistics not in ("fermion", "qubit"):
            raise NumericError(f"unknown statistics {self.statistics!r}")
        cap = (
            MAX_FERMION_MODES_DOUBLED
            if self.statistics == "fermion"
            else MAX_QUBIT_MODES
        )
        if self.n_modes > cap:
            raise NumericError(
                f"{self.n_modes} modes exceeds the dense cap of {cap} "
                f"for {self.statistics} states"
            )
        a = np.ascontiguousarray(self.amps, dtype=complex)
        if a.shape != (1 << self.n_modes,):
            raise NumericError("amplitude vector has wrong length")
        object.__setattr__(self, "amps", a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _occupations(idx: np.ndarray, mode: int) -> np.ndarray:
    return (idx >> mode) & 1


def _jw_parity(idx: np.ndarray, mode: int) -> np.ndarray:
    """Parity of occupations below ``mode`` for each basis index."""
    below = idx & ((1 << mode) - 1)
    return (np.bitwise_count(below.astype(np.uint64)) & 1).astype(np.int64)


def apply_creation(amps: np.ndarray, n_modes: int, mode: int,
                   statistics: str = "fermion") -> np.ndarray:
    """Apply c_mode^dag to an amplitude vector."""
    idx = np.arange(amps.size)
    src = idx[_occupations(idx, mode) == 0]
    out = np.zeros_like(amps)
    if statistics == "fermion":
        sign = 1 - 2 * _jw_parity(src, mode)
        out[src | (1 << mode)] = sign * amps[src]
    else:
        out[src | (1 << mode)] = amps[src]
    return out


def apply_annihilation(amps: np.ndarray, n_modes: int, mode: int,
                       statistics: str = "fermion") -> np.ndarray:
    """Apply c_mode to an amplitude vector."""
    idx = np.arange(amps.size)
    src = idx[_occupations(idx, mode) == 1]
    out = np.zeros_like(amps)
    if statistics == "fermion":
        sign = 1 - 2 * _jw_parity(src, mode)
        out[src ^ (1 << mode)] = sign * amps[src]
    else:
        out[src ^ (1 << mode)] = amps[src]
    return out


def mode_operator(n_modes: int, mode: int, kind: str = "annihilation",
                  statistics: str = "fermion") -> np.ndarray:
    """Dense matrix of c_mode (or c_mode^dag) on the full Fock space."""
    dim = 1 << n_modes
    op = np.zeros((dim, dim), dtype=complex)
    apply = apply_annihilation if kind == "annihilation" else apply_creation
    eye = np.eye(dim, dtype=complex)
    for col in range(dim):
        op[:, col] = apply(eye[:, col], n_modes, mode, statistics)
    return op


def slater_statevector(orbitals: np.ndarray) -> DenseState:
    """Dense Fock-space vector of a Slater determinant.

    Parameters
    ----------
    orbitals : (n_modes, n_orbitals) ndarray
        Columns are single-particle wavefunctions; the state is
        prod_j c^dag(orbital_j) |vac> with column 0 applied last, which
        matches the amplitude convention
        amp({i_1 < ... < i_k}) = det(orbitals[[i_1, ..., i_k], :]).
    """
    orbitals = np.asarray(orbitals, dtype=complex)
    n_modes, n_orb = orbitals.shape
    if n_modes > MAX_FERMION_MODES:
        raise NumericError(f"{n_modes} modes exceeds dense cap {MAX_FERMION_MODES}")
    amps = np.zeros(1 << n_modes, dtype=complex)
    amps[0] = 1.0
    for j in reversed(range(n_orb)):
        new = np.zeros_like(amps)
        for i in range(n_modes):
            if orbitals[i, j] != 0:
                new += orbitals[i, j] * apply_creation(amps, n_modes, i)
        amps = new
    return DenseState(amps, n_modes)


def random_slater(n_modes: int, n_orbitals: int, rng) -> np.ndarray:
    """Random orthonormal orbital matrix (n_modes, n_orbitals)."""
    g = rng.normal(size=(n_modes, n_orbitals)) + 1j * rng.normal(
        size=(n_modes, n_orbitals)
    )
    q, _ = np.linalg.qr(g)
    return q


def dense_covariance(state: DenseState) -> np.ndarray:
    """Two-point function C_ij = <c_i^dag c_j> of a pure fermionic state."""
    if state.statistics != "fermion":
        raise NumericError("dense_covariance expects fermionic statistics")
    lowered = [
        apply_annihilation(state.amps, state.n_modes, i)
        for i in range(state.n_modes)
    ]
    phi = np.array(lowered)
    return phi.conj() @ phi.T


def reorder_modes(state: DenseState, order) -> DenseState:
    """Relabel modes so that new mode p is old mode ``order[p]``.

    For fermions the amplitudes pick up the parity of the permutation
    restricted to the occupied modes of each basis state.
    """
    order = list(order)
    n = state.n_modes
    if sorted(order) != list(range(n)):
        raise NumericError("order must be a permutation of all modes")
    idx = np.arange(state.amps.size)
    new_idx = np.zeros_like(idx)
    for p, m in enumerate(order):
        new_idx |= _occupations(idx, m) << p
    if state.statistics == "fermion":
        parity = np.zeros_like(idx)
        for p in range(n):
            for pp in range(p + 1, n):
                if order[p] > order[pp]:
                    parity += _occupations(idx, order[p]) & _occupations(idx, order[pp])
        vals = (1 - 2 * (parity & 1)) * state.amps
    else:
        vals = state.amps
    out = np.zeros_like(state.amps)
    out[new_idx] = vals
    return DenseState(out, n, state.statistics)


def dense_rdm(state: DenseState, keep) -> np.ndarray:
    """Reduced density matrix on the modes in ``keep`` (in the given order).

    The kept modes are moved to the front of the mode ordering (with
    fermionic reordering signs where applicable) and the rest are traced
    out; the result is expressed in the occupation basis of the kept modes.
    """
    keep = list(keep)
    if len(set(keep)) != len(keep):
        raise NumericError("keep list contains duplicates")
    if (1 << len(keep)) > MAX_RDM_DIM:
        raise NumericError("requested reduced density matrix is too large")
    rest = [m for m in range(state.n_modes) if m not in keep]
    reordered = reorder_modes(state, keep + rest)
    mat = reordered.amps.reshape(1 << len(rest), 1 << len(keep))
    return mat.T @ mat.conj()


def dense_entropy(rho: np.ndarray, eps: float = 1e-12) -> float:
    """Von Neumann entropy of a density matrix, in nats."""
    vals = np.linalg.eigvalsh(rho)
    vals = vals[vals > eps]
    return float(-np.sum(xlogy(vals, vals)))


def dense_mutual_information(state: DenseState, mask_a, mask_b) -> float:
    """I(A:B) from brute-force reduced density matrices."""
    mask_a, mask_b = list(mask_a), list(mask_b)
    if set(mask_a) & set(mask_b):
        raise NumericError("masks must be disjoint")
    s_a = dense_entropy(dense_rdm(state, mask_a))
    s_b = dense_entropy(dense_rdm(state, mask_b))
    s_ab = dense_entropy(dense_rdm(state, mask_a + mask_b))
    return s_a + s_b - s_ab


def _ph_pair_state(n_modes: int) -> DenseState:
    """Maximally entangled particle-hole state |Omega> on 2 * n_modes modes.

    Each system mode i is paired with auxiliary mode n + i in the state
    (|0_i 1_i'> + |1_i 0_i'>) / sqrt(2), assembled with the pairs adjacent
    and then relabeled to the (system..., auxiliary...) layout with proper
    fermionic reordering signs.  Its covariance is
    [[1/2, 1/2], [1/2, 1/2]] in system/auxiliary blocks.
    """
    pair = np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2.0)
    amps = np.array([1.0], dtype=complex)
    for _ in range(n_modes):
        amps = np.kron(pair, amps)
    paired = DenseState(amps, 2 * n_modes, "fermion")
    order = [2 * p for p in range(n_modes)] + [2 * p + 1 for p in range(n_modes)]
    return reorder_modes(paired, order)


def canonical_purification(rho: np.ndarray, statistics: str = "fermion") -> DenseState:
    """Dense canonical purification |sqrt(rho)> on doubled mode count.

    For fermions this is (sqrt(rho) (x) 1) |Omega> with |Omega> the
    particle-hole pair state, so auxiliary occupations mirror the flipped
    system occupations; for qubits it is the standard vectorization of
    sqrt(rho) (transpose convention).  Auxiliary partner of mode i is mode
    n + i in both cases.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if rho.shape != (dim, dim) or dim & (dim - 1):
        raise NumericError("density matrix dimension must be a power of two")
    if dim > MAX_RDM_DIM:
        raise NumericError("density matrix too large for dense purification")
    n = dim.bit_length() - 1

    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    sqrt_rho = (vecs * np.sqrt(vals)) @ vecs.conj().T

    if statistics == "qubit":
        # amps[m + dim * k] = sqrt_rho[m, k]
        return DenseState(sqrt_rho.flatten(order="F"), 2 * n, "qubit")

    omega = _ph_pair_state(n).amps.reshape(dim, dim)  # [aux k, sys m]
    # sqrt(rho) is an even operator on the system modes (the low bits), so
    # it acts on the doubled space without Jordan-Wigner strings into the
    # auxiliary block: Psi[k, m] = sum_m' sqrt_rho[m, m'] Omega[k, m'].
    psi = np.sqrt(dim) * (omega @ sqrt_rho.T)
    return DenseState(psi.reshape(-1), 2 * n, "fermion")


def dense_reflected_entropy(rho_ab: np.ndarray, n_a: int,
                            statistics: str = "fermion") -> float:
    """Reflected entropy S_R(A:B) of a density matrix, by brute force.

    Parameters
    ----------
    rho_ab : ndarray
        Density matrix over n modes whose first ``n_a`` mode bits belong
        to A and the rest to B.
    n_a : int
        Number of A modes.
    statistics : str
        Selects the canonical purification convention (particle-hole
        conjugated copy for fermions, transposed copy for qubits).

    The result is the entanglement entropy of A together with its
    auxiliary mirror A' in the purified state; since the purification is
    pure this equals the BB' entropy, and whichever block is smaller is
    the one actually diagonalized.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    dim = rho_ab.shape[0]
    if rho_ab.shape != (dim, dim) or dim & (dim - 1):
        raise NumericError("density matrix dimension must be a power of two")
    n = dim.bit_length() - 1
    if not 0 < n_a < n:
        raise NumericError("n_a must split the modes into two nonempty blocks")
    n_b = n - n_a

    if statistics == "qubit":
        # Avoid the doubled state vector: regroup sqrt(rho) directly into a
        # matrix between (A, A') and (B, B'), whose squared singular values
        # are the spectrum of the reduced purification.
        da, db = 1 << n_a, 1 << n_b
        vals, vecs = np.linalg.eigh(rho_ab)
        vals = np.clip(vals, 0.0, None)
        sqrt_rho = (vecs * np.sqrt(vals)) @ vecs.conj().T
        # Index m = a + b * da; axes after reshape: (b, a, b', a').
        tensor = sqrt_rho.reshape(db, da, db, da)
        mat = tensor.transpose(1, 3, 0, 2).reshape(da * da, db * db)
        if mat.shape[0] <= mat.shape[1]:
            gram = mat @ mat.conj().T
        else:
            gram = mat.conj().T @ mat
        return dense_entropy(gram)

    psi = canonical_purification(rho_ab, statistics)
    if n_a <= n_b:
        keep = list(range(n_a)) + list(range(n, n + n_a))
    else:
        keep = list(range(n_a, n)) + list(range(n + n_a, 2 * n))
    return dense_entropy(dense_rdm(psi, keep))


def dense_markov_gap(state: DenseState, mask_a, mask_b) -> float:
    """h(A:B) = S_R(A:B) - I(A:B) evaluated entirely by brute force."""
    mask_a, mask_b = list(mask_a), list(mask_b)
    rho_ab = dense_rdm(state, mask_a + mask_b)
    s_r = dense_reflected_entropy(rho_ab, len(mask_a), state.statistics)
    return s_r - dense_mutual_information(state, mask_a, mask_b)


def gaussian_density_matrix(h_single: np.ndarray) -> np.ndarray:
    """Dense rho = exp(-sum_ij h_ij c^dag_i c_j)/Z for a small mode count."""
    import scipy.linalg as sla

    h_single = np.asarray(h_single, dtype=complex)
    n = h_single.shape[0]
    dim = 1 << n
    h_mb = np.zeros((dim, dim), dtype=complex)
    ann = [mode_operator(n, j, "annihilation") for j in range(n)]
    for i in range(n):
        for j in range(n):
            if h_single[i, j] != 0:
                h_mb += h_single[i, j] * (ann[i].conj().T @ ann[j])
    rho = sla.expm(-h_mb)
    return rho / np.trace(rho).real


def ghz_state(n_qubits: int) -> DenseState:
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return DenseState(amps, n_qubits, "qubit")


def w_state(n_qubits: int) -> DenseState:
    amps = np.zeros(1 << n_qubits, dtype=complex)
    for i in range(n_qubits):
        amps[1 << i] = 1.0 / np.sqrt(n_qubits)
    return DenseState(amps, n_qubits, "qubit")


def _pair_factor(s: int) -> np.ndarray:
    """Six-qubit factor shared by two regions of the triangle state.

    Qubit order within the factor: (L0, R0, L1, R1, L2, R2) where L sits in
    the left region and R in the right one.  The factor is

        (1/sqrt(2)) |s s> (x) sum_q |q q (q xor s) (q xor s)>.
    """
    amps = np.zeros(64, dtype=complex)
    for q in (0, 1):
        bits = (s, s, q, q, q ^ s, q ^ s)
        idx = sum(b << k for k, b in enumerate(bits))
        amps[idx] = 1.0 / np.sqrt(2.0)
    return amps


def toric_sots_state():
    """Ground-state patch of the toric code as an explicit triangle state.

    Returns
    -------
    (state, mask_a, mask_b, mask_c)
        An 18-qubit DenseState together with the three region masks.  Each
        pair of regions shares a six-qubit factor; qubits 0-5 carry the AB
        factor, 6-11 the BC factor, 12-17 the CA factor.  The Markov gap
        h(A:B) of this state vanishes identically.
    """
    full = np.zeros(1 << 18, dtype=complex)
    for s in (0, 1):
        ab = _pair_factor(s)  # (A_R, B_L) pairs
        bc = _pair_factor(s)  # (B_R, C_L) pairs
        ca = _pair_factor(s)  # (C_R, A_L) pairs
        # Combined index: AB factor in bits 0-5, BC in 6-11, CA in 12-17.
        term = np.kron(ca, np.kron(bc, ab))
        full += term / np.sqrt(2.0)
    state = DenseState(full, 18, "qubit")
    mask_a = [0, 2, 4, 13, 15, 17]  # A_R in the AB factor, A_L in the CA factor
    mask_b = [1, 3, 5, 6, 8, 10]    # B_L in the AB factor, B_R in the BC factor
    mask_c = [7, 9, 11, 12, 14, 16]
    return state, mask_a, mask_b, mask_c


def oracle_check(n_states: int = 50, seed: int = 7, tol: float = 1e-6) -> dict:
    """Cross-validate the Gaussian toolkit against brute force.

    Draws ``n_states`` random Slater determinants on 6-8 modes with random
    tripartitions and compares entropies, mutual information, reflected
    entropy and Markov gap between the covariance formulas and the dense
    statevector path.

    Returns a summary dict with the worst absolute deviations per quantity
    and a boolean ``passed``.
    """
    from . import gaussian

    rng = np.random.default_rng(seed)
    worst = {"entropy": 0.0, "mutual_information": 0.0,
             "reflected_entropy": 0.0, "markov_gap": 0.0}
    for _ in range(n_states):
        n = int(rng.integers(6, 9))
        n_orb = int(rng.integers(1, n))
        orbitals = random_slater(n, n_orb, rng)
        state = slater_statevector(orbitals)
        cov = gaussian.CovarianceMatrix(orbitals.conj() @ orbitals.T)

        perm = rng.permutation(n)
        na = int(rng.integers(1, n - 1))
        nb = int(rng.integers(1, n - na + 1))
        mask_a = np.sort(perm[:na])
        mask_b = np.sort(perm[na:na + nb])

        s_g = gaussian.entropy(cov.restrict(mask_a))
        s_d = dense_entropy(dense_rdm(state, list(mask_a)))
        worst["entropy"] = max(worst["entropy"], abs(s_g - s_d))

        i_g = gaussian.mutual_information(cov, mask_a, mask_b)
        i_d = dense_mutual_information(state, list(mask_a), list(mask_b))
        worst["mutual_information"] = max(worst["mutual_information"], abs(i_g - i_d))

        sr_g = gaussian.reflected_entropy(cov, mask_a, mask_b)
        rho_ab = dense_rdm(state, list(mask_a) + list(mask_b))
        sr_d = dense_reflected_entropy(rho_ab, na)
        worst["reflected_entropy"] = max(worst["reflected_entropy"], abs(sr_g - sr_d))

        h_g = gaussian.markov_gap(cov, mask_a, mask_b)
        h_d = sr_d - i_d
        worst["markov_gap"] = max(worst["markov_gap"], abs(h_g - h_d))

    return {
        "n_states": n_states,
        "seed": seed,
        "tolerance": tol,
        "worst": worst,
        "passed": all(v <= tol for v in worst.values()),
    }
