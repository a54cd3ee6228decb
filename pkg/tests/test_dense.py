"""Dense (exponential-cost) reference implementations used as oracles."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from markovgap import dense
from markovgap.errors import NumericError
from markovgap.gaussian import (
    CovarianceMatrix,
    entropy,
    markov_gap,
    mutual_information,
    reflected_entropy,
)


def slater_pair(n, k, seed):
    rng = np.random.default_rng(seed)
    orbitals = dense.random_slater(n, k, rng)
    state = dense.slater_statevector(orbitals)
    cov = CovarianceMatrix(orbitals.conj() @ orbitals.T)
    return state, cov


def test_dense_covariance_matches_orbital_projector():
    state, cov = slater_pair(6, 3, 0)
    c = dense.dense_covariance(state)
    assert_allclose(c, cov.mat, atol=1e-12)
    assert_allclose(np.trace(c).real, 3.0, atol=1e-12)


def test_dense_entropy_matches_gaussian_entropy():
    state, cov = slater_pair(7, 3, 1)
    keep = [0, 2, 5]
    rho = dense.dense_rdm(state, keep)
    assert_allclose(dense.dense_entropy(rho), entropy(cov.restrict(keep)),
                    atol=1e-9)


def test_dense_mutual_information_matches_gaussian():
    state, cov = slater_pair(7, 4, 2)
    a, b = [0, 1], [3, 4, 5]
    assert_allclose(dense.dense_mutual_information(state, a, b),
                    mutual_information(cov, a, b), atol=1e-9)


def test_dense_reflected_entropy_matches_gaussian():
    state, cov = slater_pair(6, 3, 3)
    a, b = [0, 1], [2, 3]
    rho = dense.dense_rdm(state, a + b)
    got = dense.dense_reflected_entropy(rho, len(a))
    assert_allclose(got, reflected_entropy(cov, a, b), atol=1e-8)


def test_dense_markov_gap_matches_gaussian():
    for seed in range(4):
        n = 6 + (seed % 3)
        state, cov = slater_pair(n, n // 2, 10 + seed)
        a, b = [0, 1], [2, 3, 4]
        assert_allclose(dense.dense_markov_gap(state, a, b),
                        markov_gap(cov, a, b), atol=1e-8)


def test_oracle_check_small_sample():
    result = dense.oracle_check(n_states=6, seed=2, tol=1e-6)
    assert result["passed"]
    assert result["worst"]["markov_gap"] < 1e-6


# ---------------------------------------------------------------------------
# purification
# ---------------------------------------------------------------------------

def test_canonical_purification_reduces_to_rho():
    state, _ = slater_pair(6, 3, 4)
    rho = dense.dense_rdm(state, [0, 1, 2])
    doubled = dense.canonical_purification(rho, statistics="fermion")
    back = dense.dense_rdm(doubled, [0, 1, 2])
    assert_allclose(back, rho, atol=1e-10)
    # and the doubled state is normalized
    assert_allclose(np.vdot(doubled.amps, doubled.amps).real, 1.0, atol=1e-10)


def test_canonical_purification_qubit_path():
    rng = np.random.default_rng(5)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    doubled = dense.canonical_purification(rho, statistics="qubit")
    back = dense.dense_rdm(doubled, [0, 1])
    assert_allclose(back, rho, atol=1e-10)


def test_reorder_modes_roundtrip():
    state, _ = slater_pair(5, 2, 6)
    order = [4, 2, 0, 1, 3]
    moved = dense.reorder_modes(state, order)
    inverse = np.argsort(order)
    back = dense.reorder_modes(moved, inverse)
    assert_allclose(back.amps, state.amps, atol=1e-12)
    c = dense.dense_covariance(state)
    c_moved = dense.dense_covariance(moved)
    assert_allclose(c_moved, c[np.ix_(order, order)], atol=1e-12)


def test_gaussian_density_matrix_occupations():
    eps = np.array([-1.0, 0.3, 2.0])
    rho = dense.gaussian_density_matrix(np.diag(eps))
    expected = 1.0 / (1.0 + np.exp(eps))
    for i in range(3):
        num = dense.mode_operator(3, i, kind="creation") @ \
            dense.mode_operator(3, i, kind="annihilation")
        assert_allclose(np.trace(rho @ num).real, expected[i], atol=1e-12)


# ---------------------------------------------------------------------------
# named reference states
# ---------------------------------------------------------------------------

def test_ghz_gap_vanishes():
    # classically correlated: reflected entropy equals mutual information
    g = dense.ghz_state(3)
    assert abs(dense.dense_markov_gap(g, [0], [1])) < 1e-10


def test_w_state_gap_regressions():
    w4 = dense.w_state(4)
    assert_allclose(dense.dense_markov_gap(w4, [0, 1], [2]),
                    0.3382662917985849, atol=1e-10)
    assert_allclose(dense.dense_markov_gap(w4, [0], [1]),
                    0.40146795272170344, atol=1e-10)
    w3 = dense.w_state(3)
    assert_allclose(dense.dense_markov_gap(w3, [0], [1]),
                    0.3948993046322957, atol=1e-10)


def test_toric_sots_masks_partition_all_qubits():
    _, mask_a, mask_b, mask_c = dense.toric_sots_state()
    combined = sorted(mask_a + mask_b + mask_c)
    assert combined == list(range(18))


# ---------------------------------------------------------------------------
# size caps
# ---------------------------------------------------------------------------

def test_slater_cap_enforced():
    rng = np.random.default_rng(7)
    orbitals = dense.random_slater(15, 7, rng)
    with pytest.raises(NumericError):
        dense.slater_statevector(orbitals)


def test_rdm_cap_enforced():
    state = dense.ghz_state(13)
    with pytest.raises(NumericError):
        dense.dense_rdm(state, list(range(13)))


def test_rdm_rejects_duplicate_modes():
    state = dense.ghz_state(3)
    with pytest.raises(NumericError):
        dense.dense_rdm(state, [0, 0])
