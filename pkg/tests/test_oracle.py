import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, settings, strategies as st

from quotients.errors import DimensionError, PreconditionError, SingularPencilError
from quotients.generators import complex_gaussian, random_hermitian, random_spd
from quotients.homogeneous import make_linear_pencil_problem
from quotients.oracle import (DENSE_LIMIT_ENV, dense_generalized_eig, grid_extremum,
                              plap_2x2_solve, rlinear_real_eigenpairs, svd_oracle)

seeds = st.integers(0, 2 ** 20)


def sorted_real(values):
    return np.sort(np.asarray(values).real)


class TestDenseEig:
    def test_diagonal(self):
        res = dense_generalized_eig(np.diag([1.0, 2.0]), np.eye(2))
        np.testing.assert_allclose(sorted_real(res.eigenvalues), [1, 2])
        assert res.condition_flags == ["ok", "ok"]

    def test_infinite_eigenvalues(self):
        res = dense_generalized_eig(np.eye(2), np.zeros((2, 2)))
        assert res.condition_flags == ["infinite", "infinite"]
        assert len(res.finite()) == 0

    def test_singular_pencil(self):
        with pytest.raises(SingularPencilError):
            dense_generalized_eig(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            dense_generalized_eig(np.eye(2), np.eye(3))

    @settings(max_examples=20)
    @given(seeds)
    def test_hermitian_definite_residuals(self, seed):
        rng = np.random.default_rng(seed)
        A, B = random_hermitian(6, rng), random_spd(6, rng)
        res = dense_generalized_eig(A, B)
        assert np.all(np.abs(res.eigenvalues.imag) == 0)
        for lam, v in zip(res.eigenvalues, res.eigenvectors.T):
            assert np.linalg.norm(A @ v - lam * B @ v) <= 1e-10 * (np.linalg.norm(A) + abs(lam) * np.linalg.norm(B))

    def test_hermitian_and_qz_agree(self, rng):
        A, B = random_hermitian(6, rng), random_spd(6, rng)
        a = sorted_real(dense_generalized_eig(A, B, hermitian=True).eigenvalues)
        b = sorted_real(dense_generalized_eig(A, B, hermitian=False).eigenvalues)
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)

    def test_sorted(self):
        res = dense_generalized_eig(np.diag([3.0, -1.0, 2.0])).sorted()
        np.testing.assert_allclose(res.eigenvalues.real, [-1, 2, 3])

    def test_dense_limit(self, monkeypatch):
        monkeypatch.setenv(DENSE_LIMIT_ENV, "2")
        with pytest.raises(PreconditionError):
            dense_generalized_eig(np.eye(3))


class TestSVD:
    def test_diagonal(self):
        np.testing.assert_allclose(svd_oracle(np.diag([3.0, 1.0])).s, [3, 1])

    def test_unitary(self, rng):
        Q, _ = np.linalg.qr(complex_gaussian((5, 5), rng))
        np.testing.assert_allclose(svd_oracle(Q).s, np.ones(5), atol=1e-14)

    def test_agrees_with_eig_of_gram(self, rng):
        M = complex_gaussian((5, 5), rng)
        s = svd_oracle(M).s
        ev = sorted_real(dense_generalized_eig(M.conj().T @ M).eigenvalues)[::-1]
        np.testing.assert_allclose(s ** 2, ev, rtol=1e-10)


class TestPLap2x2:
    def test_diagonal(self):
        M = np.diag([1.0, 2.0])
        res = plap_2x2_solve(M, M, 3.0)
        np.testing.assert_allclose(sorted_real(res.eigenvalues), [1.0, 8.0], rtol=1e-10)

    def test_identity_everything_is_eigen(self):
        res = plap_2x2_solve(np.eye(2), np.eye(2), 3.0)
        assert len(res) >= 1
        np.testing.assert_allclose(res.eigenvalues, 1.0, atol=1e-10)

    def test_classical_case(self, rng):
        M = complex_gaussian((2, 2), rng)
        res = plap_2x2_solve(M, M, 2.0)
        expect = la.eigvalsh(M.conj().T @ M)
        np.testing.assert_allclose(sorted_real(res.eigenvalues), expect, rtol=1e-8)

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
    def test_solutions_satisfy_equation(self, p, rng):
        M, M2 = complex_gaussian((2, 2, 2), rng)
        res = plap_2x2_solve(M, M2, p)
        for lam, z in zip(res.eigenvalues, res.eigenvectors.T):
            lhs = M.conj().T @ (np.abs(M2 @ z) ** (p - 2) * (M @ z))
            rhs = np.abs(z) ** (p - 2) * z
            assert np.linalg.norm(lhs - lam * rhs) <= 1e-8 * max(np.linalg.norm(lhs), 1e-300)

    def test_shape(self):
        with pytest.raises(DimensionError):
            plap_2x2_solve(np.eye(3), np.eye(3), 3)


class TestGridExtremum:
    def test_hermitian_extremes(self, rng):
        H = random_hermitian(4, rng)
        w = la.eigvalsh(H)
        prob = make_linear_pencil_problem(H)
        assert grid_extremum(prob, num_starts=4) == pytest.approx(w[-1], rel=1e-8)
        assert grid_extremum(prob, num_starts=4, direction="min") == pytest.approx(w[0], rel=1e-8)


class TestRLinear:
    def test_zero_coupling_doubles_spectrum(self, rng):
        H = random_hermitian(3, rng)
        res = rlinear_real_eigenpairs(H, np.zeros((3, 3)))
        np.testing.assert_allclose(sorted_real(res.eigenvalues), np.repeat(la.eigvalsh(H), 2), atol=1e-10)

    def test_rotation_has_none(self):
        res = rlinear_real_eigenpairs(np.zeros((2, 2)), np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert len(res) == 0

    def test_returned_pairs_solve(self, rng):
        M, T = complex_gaussian((2, 4, 4), rng)
        res = rlinear_real_eigenpairs(M, T)
        for lam, z in zip(res.eigenvalues, res.eigenvectors.T):
            assert np.linalg.norm(M @ z + T @ z.conj() - lam * z) <= 1e-9
