"""Indefinite inner products given by a Hermitian Gram matrix.

The convention throughout is ``[x, y] = (G x, y) = y^H G x``: linear in the
first argument, conjugate-linear in the second.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import PreconditionError
from .linalg import (
    DEFAULT_TOLERANCES,
    as_matrix,
    eig_structure,
    hausdorff_distance,
    opnorm,
    orthonormal_basis,
)

__all__ = [
    "KreinSpace",
    "KreinOperator",
    "NormalityCheck",
    "CartesianParts",
    "FundamentalDecomposition",
    "AngularOperator",
    "SpectralMappingReport",
    "indefinite_product",
    "gram_adjoint",
    "is_g_normal",
    "cartesian_parts",
    "compressed_gram",
    "fundamental_decomposition_from_projections",
    "angular_operator",
    "spectral_mapping",
    "spectrum_is_real",
]


@dataclass(frozen=True)
class KreinSpace:
    """``C^n`` with the product ``[x, y] = (G x, y)``.

    Build instances with :meth:`from_gram`, which enforces Hermiticity.  A
    singular ``G`` is allowed (a degenerate G-space) but every operation that
    needs the Krein adjoint rejects it.
    """

    G: np.ndarray = field(repr=False)
    inertia: tuple
    tol: float

    @classmethod
    def from_gram(cls, G, cfg=DEFAULT_TOLERANCES):
        G = as_matrix(G, "G")
        n = G.shape[0]
        norm = opnorm(G)
        tol = cfg.rank_tol(n) * norm
        if opnorm(G - G.conj().T) > tol:
            raise PreconditionError("gram not hermitian", "Gram matrix is not Hermitian")
        G = (G + G.conj().T) / 2
        lam = np.linalg.eigvalsh(G)
        inertia = (
            int(np.count_nonzero(lam > tol)),
            int(np.count_nonzero(lam < -tol)),
            int(np.count_nonzero(np.abs(lam) <= tol)),
        )
        return cls(G=G, inertia=inertia, tol=tol)

    @classmethod
    def hilbert(cls, n):
        return cls.from_gram(np.eye(n))

    @property
    def dim(self):
        return self.G.shape[0]

    @property
    def is_krein(self):
        return self.dim > 0 and self.inertia[2] == 0

    @cached_property
    def norm(self):
        return opnorm(self.G)

    @cached_property
    def G_inv(self):
        if not self.is_krein:
            raise PreconditionError("gram not invertible", "Gram matrix is singular")
        return np.linalg.inv(self.G)

    def product(self, x, y):
        return indefinite_product(x, y, self)


def indefinite_product(x, y, space):
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.shape != y.shape or x.shape[0] != space.dim:
        raise PreconditionError(
            "dimension mismatch", f"vectors {x.shape}, {y.shape} vs space of dim {space.dim}"
        )
    return complex(np.vdot(y, space.G @ x))


def gram_adjoint(T, space):
    """Krein adjoint ``G^{-1} T^* G``."""
    T = as_matrix(T, "T")
    if T.shape != space.G.shape:
        raise PreconditionError("dimension mismatch", f"T {T.shape} vs G {space.G.shape}")
    if not space.is_krein:
        raise PreconditionError("gram not invertible", "Gram matrix is singular")
    return np.linalg.solve(space.G, T.conj().T @ space.G)


@dataclass(frozen=True)
class KreinOperator:
    N: np.ndarray = field(repr=False)
    space: KreinSpace = field(repr=False)
    adjoint: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, N, space):
        N = as_matrix(N, "N")
        return cls(N=N, space=space, adjoint=gram_adjoint(N, space))

    @cached_property
    def normality_defect(self):
        return opnorm(self.adjoint @ self.N - self.N @ self.adjoint)


class NormalityCheck(NamedTuple):
    normal: bool
    defect: float


def is_g_normal(N, space, cfg=DEFAULT_TOLERANCES):
    """Whether ``N^+ N = N N^+`` within ``residual_rtol * ||N||^2``."""
    op = KreinOperator.of(N, space)
    defect = op.normality_defect
    return NormalityCheck(bool(defect <= cfg.residual_rtol * opnorm(op.N) ** 2), defect)


@dataclass(frozen=True)
class CartesianParts:
    re: np.ndarray
    im: np.ndarray
    commutator_defect: float


def cartesian_parts(N, space):
    """``Re N = (N + N^+)/2`` and ``Im N = (N - N^+)/(2i)``.

    Both parts are G-selfadjoint.  Their commutator vanishes exactly when
    ``N`` is normal, since ``[Re N, Im N] = (N^+ N - N N^+)/(2i)``.
    """
    op = KreinOperator.of(N, space)
    re = (op.N + op.adjoint) / 2
    im = (op.N - op.adjoint) / 2j
    return CartesianParts(re=re, im=im, commutator_defect=opnorm(re @ im - im @ re))


def compressed_gram(B, space):
    """``B^H G B`` for a column basis ``B`` (Hermitian part)."""
    M = B.conj().T @ space.G @ B
    return (M + M.conj().T) / 2


def _extreme_eigs(M):
    if M.shape[0] == 0:
        return np.inf, -np.inf
    lam = np.linalg.eigvalsh(M)
    return float(lam[0]), float(lam[-1])


@dataclass(frozen=True)
class FundamentalDecomposition:
    plus_basis: np.ndarray
    minus_basis: np.ndarray
    J: np.ndarray
    min_eig_GJ: float
    defects: dict


def fundamental_decomposition_from_projections(Qp, Qm, space, cfg=DEFAULT_TOLERANCES):
    """Fundamental symmetry ``J = Qp - Qm`` from complementary projections.

    ``Qp`` and ``Qm`` must be G-selfadjoint projections with ``Qp Qm = 0``,
    ``Qp + Qm = I``, ``G`` positive on ``ran Qp`` and negative on ``ran Qm``.
    Then ``[J x, y]`` is a Hilbert space product; its smallest eigenvalue
    (of ``G J``) is reported.

    Raises
    ------
    PreconditionError
        Naming the first violated condition.
    """
    Qp = as_matrix(Qp, "Qp")
    Qm = as_matrix(Qm, "Qm")
    if not space.is_krein:
        raise PreconditionError("gram not invertible", "Gram matrix is singular")
    n = space.dim
    G = space.G
    eye = np.eye(n)
    tol = cfg.residual_rtol
    scale = 1.0 + opnorm(Qp) + opnorm(Qm)
    defects = {
        "idempotent_plus": opnorm(Qp @ Qp - Qp),
        "idempotent_minus": opnorm(Qm @ Qm - Qm),
        "selfadjoint_plus": opnorm(G @ Qp - Qp.conj().T @ G) / space.norm,
        "selfadjoint_minus": opnorm(G @ Qm - Qm.conj().T @ G) / space.norm,
        "orthogonal": opnorm(Qp @ Qm) + opnorm(Qm @ Qp),
        "complete": opnorm(Qp + Qm - eye),
    }
    names = {
        "idempotent_plus": "Qp not a projection",
        "idempotent_minus": "Qm not a projection",
        "selfadjoint_plus": "Qp not G-selfadjoint",
        "selfadjoint_minus": "Qm not G-selfadjoint",
        "orthogonal": "Qp Qm != 0",
        "complete": "Qp + Qm != I",
    }
    for key, value in defects.items():
        if value > tol * scale**2:
            raise PreconditionError(names[key], f"{names[key]} (defect {value:.3e})")
    plus = orthonormal_basis(Qp, cfg)
    minus = orthonormal_basis(Qm, cfg)
    margin = cfg.rank_tol(n) * space.norm
    lo, _ = _extreme_eigs(compressed_gram(plus, space))
    if plus.shape[1] and lo <= margin:
        raise PreconditionError("G not positive on ran Qp", f"min eigenvalue {lo:.3e}")
    _, hi = _extreme_eigs(compressed_gram(minus, space))
    if minus.shape[1] and hi >= -margin:
        raise PreconditionError("G not negative on ran Qm", f"max eigenvalue {hi:.3e}")
    J = Qp - Qm
    GJ = G @ J
    min_eig = float(np.linalg.eigvalsh((GJ + GJ.conj().T) / 2)[0])
    defects["involution"] = opnorm(J @ J - eye)
    defects["GJ_hermitian"] = opnorm(GJ - GJ.conj().T) / space.norm
    return FundamentalDecomposition(
        plus_basis=plus, minus_basis=minus, J=J, min_eig_GJ=min_eig, defects=defects
    )


@dataclass(frozen=True)
class AngularOperator:
    K: np.ndarray
    norm_bound: float


def angular_operator(basis, space, cfg=DEFAULT_TOLERANCES, cond_bound=1e8):
    """Angular operator of a subspace with respect to ``G = diag(I, -I)``.

    Writing the basis as ``[X1; X2]``, the subspace is the graph
    ``{(x, K x)}`` with ``K = X2 X1^{-1}``; it is uniformly positive exactly
    when ``||K|| < 1``.
    """
    B = as_matrix(basis, "basis", square=False)
    n2 = space.dim
    if n2 % 2 or B.shape[0] != n2:
        raise PreconditionError("dimension mismatch", "basis must have 2n rows for G = diag(I, -I)")
    n = n2 // 2
    expected = np.diag(np.r_[np.ones(n), -np.ones(n)])
    if opnorm(space.G - expected) > cfg.rank_tol(n2):
        raise PreconditionError("gram not diag(I,-I)", "angular operators need G = diag(I, -I)")
    if B.shape[1] != n:
        raise PreconditionError(
            "not a graph over H+", f"basis has {B.shape[1]} columns, expected {n}"
        )
    X1, X2 = B[:n], B[n:]
    cond = np.linalg.cond(X1)
    if not np.isfinite(cond) or cond > cond_bound:
        raise PreconditionError("not a graph over H+", f"cond(X1) = {cond:.3e}")
    K = np.linalg.solve(X1.T, X2.T).T
    norm = opnorm(K)
    if norm >= 1.0 - cfg.rank_tol(n2):
        raise PreconditionError("not uniformly positive", f"||K|| = {norm:.6f} >= 1")
    return AngularOperator(K=K, norm_bound=norm)


@dataclass(frozen=True)
class SpectralMappingReport:
    hypothesis: bool
    re_distance: float
    im_distance: float
    spectrum: np.ndarray = field(repr=False)
    re_spectrum: np.ndarray = field(repr=False)
    im_spectrum: np.ndarray = field(repr=False)


def spectrum_is_real(es, scale, cfg):
    """Whether all eigenvalues of ``es`` lie within ``cluster_rtol * scale`` of the real axis."""
    if not es.clusters:
        return True
    return bool(np.max(np.abs(es.eigenvalues.imag)) <= cfg.cluster_rtol * max(scale, 1e-300))


def spectral_mapping(N, space, cfg=DEFAULT_TOLERANCES):
    """Compare ``sigma(Re N)``, ``sigma(Im N)`` with ``Re``/``Im`` of ``sigma(N)``.

    ``N`` and ``N^+`` commute when ``N`` is normal; if moreover ``N + N^+``
    has real and ``N - N^+`` imaginary spectrum, the spectra of the Cartesian
    parts are the real and imaginary parts of ``sigma(N)``.  ``hypothesis``
    records whether the realness conditions hold; the Hausdorff distances
    are always reported.
    """
    parts = cartesian_parts(N, space)
    N = as_matrix(N, "N")
    scale = opnorm(N)
    es_n = eig_structure(N, cfg)
    es_re = eig_structure(parts.re, cfg)
    es_im = eig_structure(parts.im, cfg)
    hyp = spectrum_is_real(es_re, scale, cfg) and spectrum_is_real(es_im, scale, cfg)
    lam = es_n.eigenvalues
    return SpectralMappingReport(
        hypothesis=hyp,
        re_distance=hausdorff_distance(es_re.eigenvalues, lam.real),
        im_distance=hausdorff_distance(es_im.eigenvalues, lam.imag),
        spectrum=lam,
        re_spectrum=es_re.eigenvalues,
        im_spectrum=es_im.eigenvalues,
    )
