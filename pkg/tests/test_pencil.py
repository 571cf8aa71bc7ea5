import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kspec.errors import PreconditionError
from kspec.krein import gram_adjoint
from kspec.linalg import opnorm
from kspec.pencil import (
    PencilProblem,
    build_companion,
    factorization_check,
    hyperbolic_roots,
    operator_root_via_angular,
    pencil_matrix,
    pencil_spectrum,
    root_residual,
    root_spectrum_defect,
)
from models import hyperbolic_pencil, unitary

MU_PLUS = (-3 + np.sqrt(5)) / 2
MU_MINUS = (-3 - np.sqrt(5)) / 2
SCALAR = ([[3.0]], [[1.0]])
DIAG = (np.diag([3.0, 4.0]), np.diag([1.0, 2.0]))


class TestProblem:
    def test_mismatch(self):
        with pytest.raises(PreconditionError) as err:
            PencilProblem.from_coefficients(np.eye(2), np.eye(3))
        assert err.value.condition == "dimension mismatch"

    def test_nonhermitian(self):
        with pytest.raises(PreconditionError) as err:
            PencilProblem.from_coefficients([[1, 1], [0, 1]], np.eye(2))
        assert err.value.condition == "A not hermitian"

    def test_non_normal(self):
        with pytest.raises(PreconditionError) as err:
            PencilProblem.from_coefficients(np.eye(2), [[1, 1], [0, 1]])
        assert err.value.condition == "C not normal"

    def test_noncommuting(self):
        with pytest.raises(PreconditionError) as err:
            PencilProblem.from_coefficients(np.diag([1.0, 2.0]), [[0, 1], [1, 0]])
        assert err.value.condition == "A and C do not commute"


class TestCompanion:
    def test_scalar(self):
        comp = build_companion(SCALAR)
        assert np.allclose(comp.matrix, [[0, 1], [-1, -3]])
        assert np.allclose(comp.adjoint, comp.matrix)
        assert comp.adjoint_defect == 0

    def test_harmonic(self):
        comp = build_companion((np.zeros((2, 2)), np.eye(2)))
        assert np.allclose(np.sort(np.linalg.eigvals(comp.matrix).imag), [-1, -1, 1, 1])

    def test_diagonal_normal(self):
        assert build_companion(DIAG).normality_defect == 0

    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_always_normal(self, n, seed):
        rng = np.random.default_rng(seed)
        U = unitary(rng, n)
        A = U @ np.diag(rng.standard_normal(n)) @ U.conj().T
        C = U @ np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n)) @ U.conj().T
        comp = build_companion(((A + A.conj().T) / 2, C))
        M = comp.matrix
        assert comp.normality_defect <= 1e-9 * opnorm(M) ** 2
        assert opnorm(comp.adjoint - gram_adjoint(M, comp.space)) <= 1e-12 * max(1, opnorm(M))


class TestSpectrum:
    def test_scalar(self):
        assert np.allclose(pencil_spectrum(SCALAR), [MU_MINUS, MU_PLUS])

    def test_harmonic(self):
        lam = pencil_spectrum(([[0.0]], [[1.0]]))
        assert np.allclose(sorted(lam, key=lambda z: z.imag), [-1j, 1j])

    def test_diagonal(self):
        expected = np.sort([MU_MINUS, MU_PLUS, -4 - 2 * np.sqrt(3), -4 + 2 * np.sqrt(3)])
        assert np.allclose(pencil_spectrum(DIAG), expected)

    def test_determinant_vanishes(self, rng):
        A, C, _, _ = hyperbolic_pencil(rng, 4)
        p = PencilProblem.from_coefficients(A, C)
        for mu in pencil_spectrum(p):
            s = np.linalg.svd(pencil_matrix(p, mu), compute_uv=False)
            assert s[-1] <= 1e-9 * p.scale()


class TestAngular:
    def test_scalar(self):
        root = operator_root_via_angular(SCALAR)
        assert root.K[0, 0] == pytest.approx(MU_PLUS, abs=1e-14)
        assert root.Z1[0, 0] == pytest.approx(MU_PLUS, abs=1e-14)
        assert root.residual < 1e-14 and root.passed

    def test_diagonal(self):
        root = operator_root_via_angular(DIAG)
        assert np.allclose(root.Z1, np.diag([MU_PLUS, -4 + 2 * np.sqrt(3)]), atol=1e-12)
        assert root.residual <= 1e-12

    def test_harmonic_rejected(self):
        with pytest.raises(PreconditionError) as err:
            operator_root_via_angular(([[0.0]], [[1.0]]))
        assert err.value.condition == "strong stability fails"
        assert "sigma(N) != sigma++ u sigma--" in str(err.value)

    def test_contraction(self, rng):
        A, C, _, _ = hyperbolic_pencil(rng, 3)
        root = operator_root_via_angular((A, C))
        assert opnorm(root.K) < 1


class TestHyperbolic:
    def test_scalar(self):
        r1, r2 = hyperbolic_roots(SCALAR)
        assert r1.Z1[0, 0] == pytest.approx(MU_PLUS, abs=1e-15)
        assert r2.Z1[0, 0] == pytest.approx(MU_MINUS, abs=1e-15)

    def test_double_root(self):
        r1, r2 = hyperbolic_roots((2 * np.eye(2), np.eye(2)))
        assert np.allclose(r1.Z1, -np.eye(2)) and np.allclose(r2.Z1, -np.eye(2))

    def test_diagonal(self):
        r1, r2 = hyperbolic_roots(DIAG)
        assert np.allclose(r1.Z1, np.diag([MU_PLUS, -4 + 2 * np.sqrt(3)]))
        assert np.allclose(r2.Z1, np.diag([MU_MINUS, -4 - 2 * np.sqrt(3)]))

    def test_not_hyperbolic(self):
        with pytest.raises(PreconditionError) as err:
            hyperbolic_roots(([[1.0]], [[1.0]]))
        assert err.value.condition == "not hyperbolic"

    def test_ker_d(self):
        with pytest.raises(PreconditionError) as err:
            hyperbolic_roots(([[3.0]], [[1j]]))
        assert err.value.condition == "ker D nontrivial"

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        rng = np.random.default_rng(seed)
        A, C, plus, minus = hyperbolic_pencil(rng, 4)
        p = PencilProblem.from_coefficients(A, C)
        r1, r2 = hyperbolic_roots(p)
        assert r1.passed and r2.passed
        assert opnorm(r1.Z1 @ r2.Z1 - r2.Z1 @ r1.Z1) <= 1e-10 * p.scale()
        assert r1.factorization.product_defect <= 1e-10 * p.scale()
        # oracle: constructed branch eigenvalues
        assert np.allclose(np.sort_complex(np.linalg.eigvals(r1.Z1)), np.sort_complex(plus))
        assert np.allclose(np.sort_complex(np.linalg.eigvals(r2.Z1)), np.sort_complex(minus))


class TestFactorization:
    def test_scalar(self):
        fac = factorization_check(SCALAR, [[MU_PLUS]])
        assert fac.sum_defect == 0
        assert fac.product_defect < 1e-15

    def test_zero_not_root(self):
        C = np.diag([1.0, 2.0])
        fac = factorization_check((np.diag([3.0, 4.0]), C), np.zeros((2, 2)))
        assert fac.product_defect == pytest.approx(opnorm(C @ C))

    @pytest.mark.parametrize("seed", range(5))
    def test_routes_agree(self, seed):
        rng = np.random.default_rng(seed)
        A, C, plus, _ = hyperbolic_pencil(rng, 3)
        p = PencilProblem.from_coefficients(A, C)
        ang = operator_root_via_angular(p)
        hyp, _ = hyperbolic_roots(p)
        assert ang.passed and hyp.passed
        # the angular root picks the positive-type branch
        assert opnorm(ang.Z1 - hyp.Z1) <= 1e-8 * p.scale()
        assert root_spectrum_defect(p, ang) < 1e-8
        # every eigenpair of the root is an eigenpair of the pencil
        lam, V = np.linalg.eig(ang.Z1)
        for mu, v in zip(lam, V.T):
            assert np.linalg.norm(pencil_matrix(p, mu) @ v) <= 1e-9 * p.scale()

    def test_residual_function(self):
        assert root_residual(SCALAR, [[0.0]]) == pytest.approx(1.0)
