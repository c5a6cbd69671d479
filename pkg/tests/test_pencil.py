import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, strategies as st

from quotients._linalg import random_unit
from quotients.errors import (DegenerateError, DimensionError, IndefiniteError, PreconditionError,
                              SingularMatrixError, UndefinedPhaseError)
from quotients.generators import (complex_gaussian, random_fem_saddle, random_hermitian,
                                  random_hermitian_pencil, random_spd)
from quotients.oracle import dense_generalized_eig
from quotients.pencil import (HermitianPencil, QuotientKind, definite_combination,
                              eigenvalue_distance_bound, fem_saddle_inner_product, fold,
                              is_hermitian_pencil, linearize_quadratic, optimal_quotient,
                              pencil_sqrt, rayleigh_quotient)

seeds = st.integers(0, 2 ** 20)
phases = st.floats(0, 2 * np.pi, allow_nan=False)
radii = st.floats(0.1, 10, allow_nan=False)

I2 = np.eye(2)
D13 = np.diag([1.0, 3.0])
Z11 = np.array([1, 1]) / np.sqrt(2)


class TestConstruction:
    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            HermitianPencil(np.eye(2), np.eye(3))

    def test_non_square(self):
        with pytest.raises(DimensionError):
            HermitianPencil(np.ones((2, 3)), np.ones((2, 3)))

    def test_indefinite_weight(self):
        with pytest.raises(IndefiniteError):
            HermitianPencil(I2, I2, np.diag([1.0, -1.0]))

    def test_arrays_read_only(self):
        pen = HermitianPencil(D13, I2)
        with pytest.raises(ValueError):
            pen.M[0, 0] = 5


class TestHermitianTest:
    def test_identity(self):
        assert is_hermitian_pencil(HermitianPencil(I2, I2))

    def test_nilpotent_not_hermitian(self):
        assert not is_hermitian_pencil(HermitianPencil(np.array([[0, 1], [0, 0]]), I2))

    def test_saddle_with_constructed_weight(self):
        pen, (M11, M12, M22, N22) = random_fem_saddle(5, 3, seed=1)
        assert pen.hermitian
        assert not is_hermitian_pencil(HermitianPencil(pen.M, pen.N))

    def test_tol_must_be_positive(self):
        with pytest.raises(PreconditionError):
            is_hermitian_pencil(HermitianPencil(I2, I2), tol=0)

    @given(seeds)
    def test_generated_pencils_are_hermitian(self, seed):
        pen, _ = random_hermitian_pencil(6, seed)
        assert pen.hermitian


class TestQuotients:
    def test_scalar_pencil(self, rng):
        assert rayleigh_quotient(HermitianPencil(2 * np.eye(4), np.eye(4)),
                                 complex_gaussian(4, rng)).value == pytest.approx(2)

    def test_analytic_rayleigh(self):
        assert rayleigh_quotient(HermitianPencil(D13, I2), Z11).value == pytest.approx(2)

    def test_analytic_optimal(self):
        q = optimal_quotient(HermitianPencil(D13, I2), Z11)
        assert q.kind is QuotientKind.optimal
        assert q.value == pytest.approx(np.sqrt(5), rel=1e-15)

    def test_at_oracle_eigenvector(self):
        pen, _ = random_hermitian_pencil(8, 11)
        pairs = dense_generalized_eig(pen.M, pen.N)
        for lam, v in zip(pairs.eigenvalues, pairs.eigenvectors.T):
            assert abs(rayleigh_quotient(pen, v).value - lam) <= 1e-10 * max(1, abs(lam))
            assert abs(optimal_quotient(pen, v).value - lam) <= 1e-10 * max(1, abs(lam))

    def test_exact_eigenvector(self):
        pen = HermitianPencil(np.diag([-2.0, 5.0]), I2)
        assert optimal_quotient(pen, [1, 0]).value == -2
        assert rayleigh_quotient(pen, [0, 3]).value == 5

    def test_degenerate_denominator(self):
        pen = HermitianPencil(I2, np.diag([1.0, 0.0]))
        with pytest.raises(DegenerateError) as exc:
            rayleigh_quotient(pen, [0, 1])
        assert exc.value.endpoint == "inf"

    def test_undefined_phase_carries_modulus(self):
        pen = HermitianPencil(np.array([[0, 1], [1, 0]]), I2)
        # (Mz, z) = 0 for z = (1, i)/sqrt2
        with pytest.raises(UndefinedPhaseError) as exc:
            optimal_quotient(pen, np.array([1, 1j]) / np.sqrt(2))
        assert exc.value.magnitude == pytest.approx(1)

    @given(seeds, phases, radii)
    def test_phase_and_scale_invariance(self, seed, theta, r):
        pen, _ = random_hermitian_pencil(5, seed)
        z = random_unit(5, np.random.default_rng(seed))
        w = r * np.exp(1j * theta) * z
        for q in (rayleigh_quotient, optimal_quotient):
            assert abs(q(pen, w).value - q(pen, z).value) <= 1e-12 * abs(q(pen, z).value)

    @given(seeds)
    def test_optimal_dominates_rayleigh(self, seed):
        pen, _ = random_hermitian_pencil(8, seed)
        z = random_unit(8, np.random.default_rng(seed + 1))
        assert abs(optimal_quotient(pen, z).value) >= abs(rayleigh_quotient(pen, z).value) * (1 - 1e-14)

    @given(seeds)
    def test_optimal_magnitude_and_realness(self, seed):
        pen, _ = random_hermitian_pencil(6, seed)
        z = random_unit(6, np.random.default_rng(seed + 2))
        q = optimal_quotient(pen, z).value
        assert abs(q) == pytest.approx(np.linalg.norm(pen.M @ z) / np.linalg.norm(pen.N @ z), rel=1e-14)
        assert abs(q.imag) <= 1e-10 * abs(q)

    @given(seeds)
    def test_rayleigh_real_for_hermitian_standard(self, seed):
        rng = np.random.default_rng(seed)
        pen = HermitianPencil(random_hermitian(6, rng), np.eye(6))
        q = rayleigh_quotient(pen, complex_gaussian(6, rng)).value
        assert abs(q.imag) <= 1e-10 * abs(q)


class TestFold:
    def test_diagonal(self):
        F = fold(HermitianPencil(np.diag([1.0, -2.0]), I2), 0.0)
        np.testing.assert_array_equal(F.M, np.diag([1.0, 4.0]))
        np.testing.assert_array_equal(F.N, I2)
        assert F.hermitian

    def test_exact_shift_annihilates(self):
        F = fold(HermitianPencil(I2, I2), 1.0)
        assert np.count_nonzero(F.M) == 0

    def test_squared_eigenvalues_against_oracle(self):
        pen, lam = random_hermitian_pencil(10, 3)
        F = fold(pen, 0.0)
        got = np.sort(dense_generalized_eig(F.M, F.N).eigenvalues.real)
        np.testing.assert_allclose(got, np.sort(lam ** 2), rtol=1e-8)

    @given(seeds, st.floats(-4, 4))
    def test_shifted_folding(self, seed, mu):
        pen, lam = random_hermitian_pencil(6, seed)
        F = fold(pen, mu)
        got = np.sort(la.eigvalsh(F.M, F.N))
        np.testing.assert_allclose(got, np.sort((lam - mu) ** 2), rtol=1e-7, atol=1e-9)

    def test_fold_of_non_commuting_pair_flagged(self, rng):
        F = fold(HermitianPencil(random_hermitian(4, rng), random_spd(4, rng)), 0.3)
        assert F.hermitian


class TestPencilSqrt:
    def test_diagonal(self):
        root = pencil_sqrt(np.diag([4.0, 9.0]), I2)
        np.testing.assert_allclose(np.abs(np.diag(root.M)), [2, 3], atol=1e-14)
        F = fold(HermitianPencil(root.M, root.N), 0.0)
        np.testing.assert_allclose(F.M, np.diag([4.0, 9.0]), atol=1e-13)
        np.testing.assert_allclose(F.N, I2, atol=1e-14)

    def test_identity(self):
        root = pencil_sqrt(I2, I2)
        np.testing.assert_allclose(root.M.conj().T @ root.M, I2, atol=1e-14)
        np.testing.assert_allclose(root.N.conj().T @ root.N, I2, atol=1e-14)

    def test_factorization_identities(self, rng):
        A, B = random_spd(6, rng), random_spd(6, rng)
        root = pencil_sqrt(A, B)
        np.testing.assert_allclose(root.M.conj().T @ root.M, root.A_used, atol=1e-11)
        np.testing.assert_allclose(root.N.conj().T @ root.N, root.B_used, atol=1e-11)
        np.testing.assert_allclose(root.M @ root.X, np.diag(root.lambda1), atol=1e-11)
        assert HermitianPencil(root.M, root.N).hermitian

    def test_indefinite_span_recombined(self):
        # span{A, B} contains the positive definite A + B but neither A nor B is definite
        A = np.diag([3.0, -1.0, 2.0])
        B = np.diag([-1.0, 3.0, 0.5])
        root = pencil_sqrt(A, B)
        F = fold(HermitianPencil(root.M, root.N), 0.0)
        cols = np.column_stack([x.reshape(-1) for x in (A, B, F.M, F.N)])
        s = np.linalg.svd(cols, compute_uv=False)
        assert s[2] <= 1e-8 * s[0]

    def test_no_definite_combination(self):
        # the first two diagonal entries of cos(t) A + sin(t) B always have opposite signs
        A = np.diag([1.0, -1.0, 0.0])
        B = np.diag([-1.0, 1.0, -1.0])
        with pytest.raises(IndefiniteError) as exc:
            pencil_sqrt(A, B)
        assert exc.value.best_min_eig is not None

    def test_definite_combination_finds_angle(self):
        theta, lo = definite_combination(np.diag([1.0, -0.5]), np.diag([-0.5, 1.0]))
        assert lo > 0
        assert np.cos(theta) > 0 and np.sin(theta) > 0

    @given(seeds)
    def test_span_rank_two(self, seed):
        rng = np.random.default_rng(seed)
        A, B = random_spd(6, rng), random_spd(6, rng)
        root = pencil_sqrt(A, B)
        F = fold(HermitianPencil(root.M, root.N), 0.0)
        s = np.linalg.svd(np.column_stack([x.reshape(-1) for x in (A, B, F.M, F.N)]),
                          compute_uv=False)
        assert s[2] <= 1e-8 * s[0]


class TestDistanceBound:
    def test_analytic_tight(self):
        assert eigenvalue_distance_bound(HermitianPencil(D13, I2), Z11, 2.0) == pytest.approx(1.0)

    def test_exact_eigenvector(self):
        assert eigenvalue_distance_bound(HermitianPencil(D13, I2), [0, 1], 3.0) == 0

    def test_requires_hermitian(self):
        with pytest.raises(PreconditionError):
            eigenvalue_distance_bound(HermitianPencil([[0, 1], [0, 0]], I2), Z11, 0.0)

    def test_requires_invertible_n(self):
        with pytest.raises(PreconditionError):
            eigenvalue_distance_bound(HermitianPencil(D13, np.diag([1.0, 0.0])), Z11, 0.0)

    @given(seeds, st.floats(-6, 6))
    def test_bound_dominates_distance(self, seed, mu):
        pen, lam = random_hermitian_pencil(6, seed)
        z = random_unit(6, np.random.default_rng(seed))
        dist2 = np.min(np.abs(lam - mu)) ** 2
        assert eigenvalue_distance_bound(pen, z, mu) >= dist2 - 1e-10 * max(1, dist2)

    @given(seeds)
    def test_minimized_at_rayleigh_quotient(self, seed):
        pen, _ = random_hermitian_pencil(6, seed)
        z = random_unit(6, np.random.default_rng(seed))
        rq = rayleigh_quotient(pen, z).value.real
        at_rq = eigenvalue_distance_bound(pen, z, rq)
        for d in (-0.1, 0.1, 1e-3):
            assert eigenvalue_distance_bound(pen, z, rq + d) >= at_rq


class TestSaddleWeight:
    def test_decoupled(self):
        P = fem_saddle_inner_product(np.eye(3), np.zeros((3, 2)), np.eye(2), np.eye(2))
        np.testing.assert_allclose(P, np.eye(5))

    def test_real_inner_products(self, rng):
        pen, _ = random_fem_saddle(5, 3, seed=7)
        for _ in range(100):
            x = complex_gaussian(8, rng)
            c = pen.ip(pen.M @ x, pen.N @ x)
            assert abs(c.imag) <= 1e-12 * max(1, abs(c))

    def test_singular_leading_block(self):
        with pytest.raises(SingularMatrixError):
            fem_saddle_inner_product(np.diag([1.0, 0.0]), np.ones((2, 1)), np.eye(1), np.eye(1))

    def test_indefinite_trailing_block(self):
        with pytest.raises(IndefiniteError):
            fem_saddle_inner_product(np.eye(2), np.ones((2, 1)), np.eye(1), -np.eye(1))


class TestQuadratic:
    def test_trivial(self):
        pen, flag = linearize_quadratic(np.eye(2), np.zeros((2, 2)), -np.eye(2))
        assert flag
        np.testing.assert_allclose(pen.P, np.eye(4))

    def test_roots_match_polynomial(self, rng):
        A1 = random_hermitian(2, rng)
        pen, flag = linearize_quadratic(np.eye(2), A1, -np.eye(2))
        assert flag and pen.hermitian
        lam = dense_generalized_eig(pen.M, pen.N).eigenvalues
        for x in lam:
            assert abs(np.linalg.det(-x * x * np.eye(2) + x * A1 + np.eye(2))) <= 1e-10 * (1 + abs(x)) ** 4
        # det is a degree-4 polynomial with 4 roots
        assert len(lam) == 4

    def test_non_hermitian_coefficient(self):
        _, flag = linearize_quadratic(np.eye(2), np.array([[0, 1], [0, 0]]), -np.eye(2))
        assert not flag

    def test_without_definite_weight(self):
        pen, flag = linearize_quadratic(np.eye(2), np.zeros((2, 2)), np.eye(2))
        assert not flag and pen.P is None
