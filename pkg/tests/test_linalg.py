import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import KET0, PLUS, APPX_PHI, X, Z, random_hermitian, random_matrix, random_state, rel_frob, expm_herm
from weakval import linalg
from weakval.errors import DimensionMismatch, InputError, NoConvergence, NotHermitian

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestIsHermitian:
    def test_pauli_z(self):
        assert linalg.is_hermitian(Z, 1e-12)

    def test_anti_hermitian_offdiagonal(self):
        assert not linalg.is_hermitian(np.array([[0, 1j], [1j, 0]]), 1e-12)

    def test_tolerance_band(self):
        m = Z + 1e-9 * np.array([[0, 1], [0, 0]])
        assert not linalg.is_hermitian(m, 1e-12)
        assert linalg.is_hermitian(m, 1e-6)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            linalg.is_hermitian(np.zeros((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(InputError):
            linalg.as_matrix([[np.nan, 0], [0, 1]])


class TestEigHermitian:
    def test_diagonal(self):
        dec = linalg.eig_hermitian(Z)
        np.testing.assert_allclose(dec.eigenvalues, [-1, 1])
        # |1> pairs with -1 and |0> with +1, up to phase
        assert abs(abs(dec.eigenvectors[1, 0]) - 1) < 1e-12
        assert abs(abs(dec.eigenvectors[0, 1]) - 1) < 1e-12

    def test_pauli_x_closed_form(self):
        dec = linalg.eig_hermitian(X)
        np.testing.assert_allclose(dec.eigenvalues, [-1, 1], atol=1e-14)
        minus = np.array([1, -1]) / np.sqrt(2)
        plus = np.array([1, 1]) / np.sqrt(2)
        assert abs(abs(np.vdot(minus, dec.eigenvectors[:, 0])) - 1) < 1e-12
        assert abs(abs(np.vdot(plus, dec.eigenvectors[:, 1])) - 1) < 1e-12

    def test_random_8x8_reconstruction(self, rng):
        h = random_hermitian(rng, 8)
        dec = linalg.eig_hermitian(h)
        assert rel_frob(dec.reconstruct(), h) <= 1e-10
        np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(h), atol=1e-12)

    @pytest.mark.parametrize("d", [1, 3, 5, 16, 33])
    def test_odd_and_larger_sizes(self, rng, d):
        h = random_hermitian(rng, d)
        dec = linalg.eig_hermitian(h)
        assert rel_frob(dec.reconstruct(), h) <= 1e-10
        v = dec.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-10
        assert np.all(np.diff(dec.eigenvalues) >= 0)

    def test_degenerate_spectrum(self, rng):
        q, _ = np.linalg.qr(random_matrix(rng, 6))
        h = q @ np.diag([-2, -2, 0.5, 3, 3, 3]).astype(complex) @ q.conj().T
        dec = linalg.eig_hermitian(h)
        np.testing.assert_allclose(dec.eigenvalues, [-2, -2, 0.5, 3, 3, 3], atol=1e-12)
        assert rel_frob(dec.reconstruct(), h) <= 1e-10

    def test_zero_and_scaled_matrices(self, rng):
        dec = linalg.eig_hermitian(np.zeros((4, 4)))
        np.testing.assert_array_equal(dec.eigenvalues, np.zeros(4))
        h = random_hermitian(rng, 6, scale=1e6)
        assert rel_frob(linalg.eig_hermitian(h).reconstruct(), h) <= 1e-10

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            linalg.eig_hermitian(np.array([[0, 1j], [1j, 0]]))

    def test_iteration_cap(self, rng):
        with pytest.raises(NoConvergence):
            linalg.eig_hermitian(random_hermitian(rng, 4), max_sweeps=0)

    @given(seed=seeds, d=st.sampled_from([2, 3, 4, 7, 8]))
    def test_reconstruction_property(self, seed, d):
        h = random_hermitian(np.random.default_rng(seed), d)
        dec = linalg.eig_hermitian(h)
        assert rel_frob(dec.reconstruct(), h) <= 1e-10
        v = dec.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-10


class TestExpHermitian:
    def test_zero_scale_is_identity(self):
        np.testing.assert_allclose(linalg.exp_hermitian_times(Z, 0), np.eye(2), atol=1e-15)

    def test_diagonal_quarter_turn(self):
        u = linalg.exp_hermitian_times(Z, -1j * np.pi / 2)
        np.testing.assert_allclose(u, np.diag([-1j, 1j]), atol=1e-15)

    def test_x_half_turn(self):
        u = linalg.exp_hermitian_times(X, -1j * np.pi)
        assert np.max(np.abs(u + np.eye(2))) <= 1e-12

    def test_matches_scipy(self, rng):
        a = random_hermitian(rng, 5)
        for scale in (-0.7j, 0.3, 1.1 - 0.4j):
            np.testing.assert_allclose(linalg.exp_hermitian_times(a, scale), expm_herm(a, scale), atol=1e-11)

    def test_inverse_pairs_seeded(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            d = int(rng.choice([2, 3, 4, 8]))
            a = random_hermitian(rng, d)
            theta = rng.uniform(0, 2 * np.pi)
            prod = linalg.exp_hermitian_times(a, -1j * theta) @ linalg.exp_hermitian_times(a, 1j * theta)
            assert np.max(np.abs(prod - np.eye(d))) <= 1e-10


class TestMatrixOps:
    def test_sandwich_eigenvalue(self):
        assert linalg.sandwich(KET0, Z, KET0) == 1

    def test_outer_projector(self):
        np.testing.assert_array_equal(linalg.outer(KET0, KET0), np.diag([1, 0]))

    def test_sandwich_appendix_setup(self):
        # (cos pi/6 - sin pi/6) / sqrt(2) by hand
        expected = (np.sqrt(3) - 1) / (2 * np.sqrt(2))
        assert abs(linalg.sandwich(APPX_PHI, Z, PLUS) - expected) < 1e-15
        assert abs(expected - 0.258819) < 1e-6

    def test_adjoint_involution(self, rng):
        m = random_matrix(rng, 4)
        np.testing.assert_array_equal(linalg.adjoint(linalg.adjoint(m)), m)

    def test_mul(self):
        np.testing.assert_array_equal(linalg.mul(X, Z), X @ Z)

    @pytest.mark.parametrize(
        "call",
        [
            lambda: linalg.mul(np.eye(2), np.eye(3)),
            lambda: linalg.outer(np.ones(2), np.ones(3)),
            lambda: linalg.sandwich(np.ones(2), np.eye(3), np.ones(3)),
        ],
    )
    def test_dimension_mismatch(self, call):
        with pytest.raises(DimensionMismatch):
            call()

    @given(seed=seeds, d=st.integers(min_value=1, max_value=6))
    def test_sandwich_conjugate_symmetry(self, seed, d):
        rng = np.random.default_rng(seed)
        u, v, m = random_state(rng, d), random_state(rng, d), random_matrix(rng, d)
        lhs = linalg.sandwich(u, m, v)
        rhs = np.conj(linalg.sandwich(v, m.conj().T, u))
        assert abs(lhs - rhs) <= 1e-12


def test_num_qubits():
    assert [linalg.num_qubits(d) for d in (1, 2, 4, 1024, 3, 6, 0)] == [0, 1, 2, 10, -1, -1, -1]
