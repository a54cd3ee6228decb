"""Covariance-matrix entropies, reflected entropy, and the Markov gap."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from markovgap.errors import NumericError
from markovgap.gaussian import (
    CovarianceMatrix,
    as_mask,
    entanglement_hamiltonian,
    entropy,
    entropy_from_spectrum,
    markov_gap,
    mutual_information,
    reflected_covariance,
    reflected_entropy,
    relative_positions,
)

LOG2 = np.log(2.0)


def random_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_covariance(n, rng, fill=None):
    """Mixed covariance with spectrum drawn uniformly from (0, 1)."""
    u = random_unitary(n, rng)
    vals = rng.uniform(0.02, 0.98, size=n) if fill is None else np.asarray(fill)
    return CovarianceMatrix((u * vals) @ u.conj().T)


def random_pure_covariance(n, k, rng):
    """Projector onto k random orthonormal orbitals (a Slater state)."""
    z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    phi, _ = np.linalg.qr(z)
    return CovarianceMatrix(phi @ phi.conj().T)


# ---------------------------------------------------------------------------
# frozen scalar oracle
# ---------------------------------------------------------------------------

def test_entropy_two_mode_frozen_value():
    # -2 * (0.1 log 0.1 + 0.9 log 0.9), evaluated independently
    c = CovarianceMatrix(np.diag([0.1, 0.9]).astype(complex))
    assert_allclose(entropy(c), 0.6501659467828964, rtol=0, atol=1e-12)


def test_entropy_from_spectrum_edge_values():
    # exact 0/1 eigenvalues contribute nothing
    assert entropy_from_spectrum(np.array([0.0, 1.0])) == 0.0
    assert entropy_from_spectrum(np.array([0.5])) == pytest.approx(LOG2, abs=1e-14)


def test_entropy_maximally_mixed():
    n = 6
    c = CovarianceMatrix(0.5 * np.eye(n, dtype=complex))
    assert_allclose(entropy(c), n * LOG2, atol=1e-12)


# ---------------------------------------------------------------------------
# constructor validation
# ---------------------------------------------------------------------------

def test_covariance_rejects_non_hermitian():
    bad = np.array([[0.5, 1.0], [0.0, 0.5]], dtype=complex)
    with pytest.raises(NumericError):
        CovarianceMatrix(bad)


def test_entropy_rejects_spectrum_outside_unit_interval():
    # construction is cheap and does not eigendecompose; the spectral
    # validation fires when an entropy is actually requested
    c = CovarianceMatrix(np.diag([1.5, 0.2]).astype(complex))
    with pytest.raises(NumericError):
        entropy(c)


def test_covariance_matrix_is_readonly():
    c = CovarianceMatrix(np.diag([0.3, 0.7]).astype(complex))
    with pytest.raises((ValueError, RuntimeError)):
        c.mat[0, 0] = 0.0


def test_mask_helpers():
    assert as_mask([1, 3], 5).tolist() == [1, 3]
    with pytest.raises(NumericError):
        as_mask([3, 1], 5)  # masks must be strictly increasing
    with pytest.raises(NumericError):
        as_mask([0, 5], 5)
    assert relative_positions([0, 2, 5, 7], [2, 7]).tolist() == [1, 3]


# ---------------------------------------------------------------------------
# pure-state structure
# ---------------------------------------------------------------------------

def test_slater_projector_is_pure():
    rng = np.random.default_rng(3)
    c = random_pure_covariance(8, 4, rng)
    assert c.is_pure()
    assert entropy(c) < 1e-9


def test_pure_state_complementary_entropies_match():
    rng = np.random.default_rng(4)
    c = random_pure_covariance(10, 5, rng)
    a = [0, 1, 2, 3]
    rest = [i for i in range(10) if i not in a]
    assert_allclose(entropy(c.restrict(a)), entropy(c.restrict(rest)), atol=1e-10)


def test_reflected_entropy_of_pure_state_doubles_entanglement():
    # if AB as a whole is pure, S_R(A:B) = 2 S(A) and the gap closes
    rng = np.random.default_rng(5)
    c = random_pure_covariance(8, 4, rng)
    a, b = [0, 1, 2], [3, 4, 5, 6, 7]
    s_a = entropy(c.restrict(a))
    assert_allclose(reflected_entropy(c, a, b), 2 * s_a, atol=1e-8)
    assert abs(markov_gap(c, a, b)) < 1e-8


# ---------------------------------------------------------------------------
# reflected covariance
# ---------------------------------------------------------------------------

def test_reflected_covariance_is_pure_and_extends_state():
    rng = np.random.default_rng(6)
    c_ab = random_covariance(5, rng)
    big = reflected_covariance(c_ab)
    assert big.dim == 10
    assert big.purity_defect() < 1e-10
    assert_allclose(big.mat[:5, :5], c_ab.mat, atol=1e-12)


def test_reflected_entropy_symmetric_in_arguments():
    rng = np.random.default_rng(7)
    c = random_pure_covariance(9, 4, rng)
    a, b = [0, 1, 2], [4, 5]
    assert_allclose(reflected_entropy(c, a, b), reflected_entropy(c, b, a),
                    atol=1e-9)


def test_product_state_has_zero_gap_and_information():
    c_a = np.diag([0.2, 0.8])
    c_b = np.diag([0.35, 0.65, 0.5])
    block = np.zeros((5, 5), dtype=complex)
    block[:2, :2] = c_a
    block[2:, 2:] = c_b
    c = CovarianceMatrix(block)
    assert abs(mutual_information(c, [0, 1], [2, 3, 4])) < 1e-10
    assert abs(reflected_entropy(c, [0, 1], [2, 3, 4])) < 1e-7
    assert abs(markov_gap(c, [0, 1], [2, 3, 4])) < 1e-7


def test_entropy_additive_over_blocks():
    rng = np.random.default_rng(8)
    c_a = random_covariance(3, rng)
    c_b = random_covariance(4, rng)
    block = np.zeros((7, 7), dtype=complex)
    block[:3, :3] = c_a.mat
    block[3:, 3:] = c_b.mat
    assert_allclose(entropy(CovarianceMatrix(block)),
                    entropy(c_a) + entropy(c_b), atol=1e-10)


# ---------------------------------------------------------------------------
# entanglement Hamiltonian
# ---------------------------------------------------------------------------

def test_entanglement_hamiltonian_inverts_to_covariance():
    rng = np.random.default_rng(9)
    c = random_covariance(6, rng)
    h = entanglement_hamiltonian(c)
    vals, vecs = np.linalg.eigh(h)
    # h = log((1-C)/C) means C = 1/(1+e^{h})
    back = (vecs * (1.0 / (1.0 + np.exp(vals)))) @ vecs.conj().T
    assert_allclose(back, c.mat, atol=1e-8)


def test_entanglement_hamiltonian_is_hermitian():
    rng = np.random.default_rng(10)
    c = random_covariance(5, rng)
    h = entanglement_hamiltonian(c)
    assert_allclose(h, h.conj().T, atol=1e-12)


# ---------------------------------------------------------------------------
# invariances (hypothesis property tests)
# ---------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_markov_gap_nonnegative(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 9))
    k = int(rng.integers(1, n))
    c = random_pure_covariance(n, k, rng)
    split = sorted(rng.permutation(n)[:3].tolist())
    a, b = split[:1], split[1:]
    assert markov_gap(c, a, b) > -1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_mutual_information_nonnegative(seed):
    rng = np.random.default_rng(seed)
    c = random_covariance(6, rng)
    assert mutual_information(c, [0, 1], [3, 4]) > -1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_entropy_bounds(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    c = random_covariance(n, rng)
    s = entropy(c)
    assert -1e-12 <= s <= n * LOG2 + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_gap_invariant_under_block_unitaries(seed):
    # rotating modes inside A, inside B, and inside the complement
    # separately must not change S_R, I, or their difference
    rng = np.random.default_rng(seed)
    c = random_pure_covariance(8, 4, rng)
    a, b = [0, 1, 2], [3, 4, 5]
    u = np.eye(8, dtype=complex)
    u[np.ix_(a, a)] = random_unitary(3, rng)
    u[np.ix_(b, b)] = random_unitary(3, rng)
    u[np.ix_([6, 7], [6, 7])] = random_unitary(2, rng)
    rotated = CovarianceMatrix(u @ c.mat @ u.conj().T)
    assert_allclose(markov_gap(rotated, a, b), markov_gap(c, a, b), atol=1e-8)
    assert_allclose(mutual_information(rotated, a, b),
                    mutual_information(c, a, b), atol=1e-9)
