"""Quadratic pencils ``L(lam) = lam^2 I + lam A C + C^2`` with normal coefficients.

``A`` is Hermitian, ``C`` normal and the two commute.  The pencil is
linearized by the companion ``[[0, C], [-C, -A C]]``, which is normal in the
Krein space ``C^n x C^n`` with ``G = diag(I, -I)``.  Operator roots ``Z`` of
``Z^2 + A C Z + C^2 = 0`` are obtained either from the angular operator of
the positive spectral subspace of the companion or, for hyperbolic pencils,
in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import PreconditionError
from .krein import KreinSpace, angular_operator, gram_adjoint, is_g_normal
from .linalg import (
    DEFAULT_TOLERANCES,
    as_matrix,
    hermitian_psd_sqrt,
    opnorm,
    orthonormal_basis,
)
from .spectralfn import strong_stability

__all__ = [
    "PencilProblem",
    "CompanionOperator",
    "FactorizationReport",
    "OperatorRoot",
    "build_companion",
    "pencil_matrix",
    "pencil_spectrum",
    "operator_root_via_angular",
    "hyperbolic_roots",
    "factorization_check",
    "root_residual",
    "root_spectrum_defect",
]


@dataclass(frozen=True)
class PencilProblem:
    """Coefficients of ``lam^2 I + lam A C + C^2``.

    Use :meth:`from_coefficients`, which checks that ``A`` is Hermitian,
    ``C`` normal and ``A C = C A``, all relative to ``residual_rtol``.
    """

    A: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    commutation_defect: float = 0.0

    @classmethod
    def from_coefficients(cls, A, C, cfg=DEFAULT_TOLERANCES):
        A = as_matrix(A, "A")
        C = as_matrix(C, "C")
        if A.shape != C.shape:
            raise PreconditionError("dimension mismatch", f"A {A.shape} vs C {C.shape}")
        tol = cfg.residual_rtol
        na, nc = opnorm(A), opnorm(C)
        if opnorm(A - A.conj().T) > tol * max(na, 1.0):
            raise PreconditionError("A not hermitian", "A must be selfadjoint")
        if opnorm(C @ C.conj().T - C.conj().T @ C) > tol * max(nc, 1.0) ** 2:
            raise PreconditionError("C not normal", "C must be normal")
        comm = opnorm(A @ C - C @ A)
        if comm > tol * max(na * nc, 1.0):
            raise PreconditionError("A and C do not commute", f"||AC - CA|| = {comm:.3e}")
        return cls(A=(A + A.conj().T) / 2, C=C, commutation_defect=comm)

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def AC(self):
        return self.A @ self.C

    def scale(self, Z=None):
        """``||A|| ||C|| + ||C||^2 (+ ||Z||^2)``, the size of the root equation."""
        s = opnorm(self.A) * opnorm(self.C) + opnorm(self.C) ** 2
        return s + (opnorm(Z) ** 2 if Z is not None else 0.0)


def _problem(problem, cfg):
    if isinstance(problem, PencilProblem):
        return problem
    A, C = problem
    return PencilProblem.from_coefficients(A, C, cfg)


@dataclass(frozen=True)
class CompanionOperator:
    matrix: np.ndarray
    adjoint: np.ndarray
    space: KreinSpace = field(repr=False)
    normality_defect: float = 0.0
    adjoint_defect: float = 0.0


def build_companion(problem, cfg=DEFAULT_TOLERANCES):
    """Companion ``[[0, C], [-C, -A C]]`` in the space with ``G = diag(I, -I)``.

    The closed-form adjoint ``[[0, C^*], [-C^*, -A C^*]]`` is cross-checked
    against ``G^{-1} M^* G`` (``adjoint_defect``).
    """
    p = _problem(problem, cfg)
    n = p.dim
    Z = np.zeros((n, n), dtype=complex)
    M = np.block([[Z, p.C], [-p.C, -p.AC]])
    Cs = p.C.conj().T
    closed = np.block([[Z, Cs], [-Cs, -p.A @ Cs]])
    space = KreinSpace.from_gram(np.diag(np.r_[np.ones(n), -np.ones(n)]), cfg)
    check = is_g_normal(M, space, cfg)
    return CompanionOperator(
        matrix=M,
        adjoint=closed,
        space=space,
        normality_defect=check.defect,
        adjoint_defect=opnorm(closed - gram_adjoint(M, space)),
    )


def pencil_matrix(problem, mu, cfg=DEFAULT_TOLERANCES):
    """``L(mu) = mu^2 I + mu A C + C^2``."""
    p = _problem(problem, cfg)
    return mu * mu * np.eye(p.dim) + mu * p.AC + p.C @ p.C


def pencil_spectrum(problem, cfg=DEFAULT_TOLERANCES):
    """The ``2n`` eigenvalues of the pencil, sorted by real then imaginary part."""
    p = _problem(problem, cfg)
    lam = np.linalg.eigvals(build_companion(p, cfg).matrix)
    return lam[np.lexsort((lam.imag, lam.real))]


def root_residual(problem, Z, cfg=DEFAULT_TOLERANCES):
    p = _problem(problem, cfg)
    Z = as_matrix(Z, "Z")
    return opnorm(Z @ Z + p.AC @ Z + p.C @ p.C)


@dataclass(frozen=True)
class FactorizationReport:
    """Defects of ``L(lam) = (lam - Zhat)(lam - Z)`` with ``Zhat = -A C - Z``.

    ``sum_defect`` measures ``||Z + Zhat + A C||`` and is zero up to round-off
    by construction; ``product_defect`` measures ``||Zhat Z - C^2||`` and is
    small exactly when ``Z`` is a root.
    """

    Zhat: np.ndarray = field(repr=False)
    sum_defect: float
    product_defect: float


def factorization_check(problem, Z1, cfg=DEFAULT_TOLERANCES):
    p = _problem(problem, cfg)
    Z1 = as_matrix(Z1, "Z1")
    Zhat = -p.AC - Z1
    return FactorizationReport(
        Zhat=Zhat,
        sum_defect=opnorm(Z1 + Zhat + p.AC),
        product_defect=opnorm(Zhat @ Z1 - p.C @ p.C),
    )


@dataclass(frozen=True)
class OperatorRoot:
    """A solution ``Z1`` of ``Z^2 + A C Z + C^2 = 0`` and its certificate.

    ``passed`` compares the residual with ``residual_rtol * scale`` where
    ``scale = ||A|| ||C|| + ||C||^2 + ||Z1||^2``.
    """

    Z1: np.ndarray
    Zhat1: np.ndarray
    residual: float
    scale: float
    factorization: FactorizationReport
    method: str
    passed: bool
    K: np.ndarray | None = None
    companion: CompanionOperator | None = field(default=None, repr=False)


def _root(p, Z1, method, cfg, K=None, companion=None):
    fac = factorization_check(p, Z1, cfg)
    res = root_residual(p, Z1, cfg)
    scale = p.scale(Z1)
    return OperatorRoot(
        Z1=Z1,
        Zhat1=fac.Zhat,
        residual=res,
        scale=scale,
        factorization=fac,
        method=method,
        passed=bool(res <= cfg.residual_rtol * scale),
        K=K,
        companion=companion,
    )


def operator_root_via_angular(problem, cfg=DEFAULT_TOLERANCES):
    """Root ``Z1 = K C`` from the angular operator of the positive subspace.

    The companion must be strongly stable; its spectral subspace for the
    positive-type eigenvalues is then the graph of a contraction ``K`` over
    the first component, and invariance of that graph is exactly the root
    equation for ``K C``.

    Raises
    ------
    PreconditionError
        ``"strong stability fails"`` (the message names the violated
        condition) or ``"not a graph over H+"`` / ``"not uniformly positive"``.
    """
    p = _problem(problem, cfg)
    comp = build_companion(p, cfg)
    try:
        report = strong_stability(comp.matrix, comp.space, cfg)
    except PreconditionError as exc:
        raise PreconditionError(
            "strong stability fails", f"strong stability fails: {exc.condition}"
        ) from exc
    if not report.stable:
        raise PreconditionError(
            "strong stability fails", f"strong stability fails: {report.violated}"
        )
    basis = orthonormal_basis(report.Qplus.E, cfg)
    K = angular_operator(basis, comp.space, cfg).K
    return _root(p, K @ p.C, "angular", cfg, K=K, companion=comp)


def hyperbolic_roots(problem, cfg=DEFAULT_TOLERANCES):
    """Closed-form roots ``Z1 = (W - A) C / 2`` and ``Z2 = -(W + A) C / 2``.

    ``W = (A^2 - 4 I)^{1/2}``; hyperbolicity is checked through ``A^2 - 4 I``
    being positive semidefinite.  ``D = (C + C^*)/2`` must have trivial
    kernel.  Returns a pair of :class:`OperatorRoot`.

    Raises
    ------
    PreconditionError
        ``"not hyperbolic"`` or ``"ker D nontrivial"``.
    """
    p = _problem(problem, cfg)
    n = p.dim
    D = (p.C + p.C.conj().T) / 2
    dmin = float(np.min(np.abs(np.linalg.eigvalsh(D)))) if n else 1.0
    if dmin <= cfg.rank_tol(n) * max(opnorm(p.C), 1.0):
        raise PreconditionError("ker D nontrivial", f"smallest |eig(D)| = {dmin:.3e}")
    try:
        W = hermitian_psd_sqrt(p.A @ p.A - 4 * np.eye(n), cfg)
    except PreconditionError as exc:
        raise PreconditionError("not hyperbolic", "A^2 - 4I is not positive semidefinite") from exc
    Z1 = (W - p.A) @ p.C / 2
    Z2 = -(W + p.A) @ p.C / 2
    return _root(p, Z1, "hyperbolic", cfg), _root(p, Z2, "hyperbolic", cfg)


def root_spectrum_defect(problem, root, cfg=DEFAULT_TOLERANCES):
    """Multiset distance between ``sigma(Z1) + sigma(Zhat1)`` and the pencil spectrum.

    The two multisets are paired by a minimum-cost assignment; the result is
    the largest distance between paired eigenvalues.
    """
    p = _problem(problem, cfg)
    both = np.concatenate([np.linalg.eigvals(root.Z1), np.linalg.eigvals(root.Zhat1)])
    ref = pencil_spectrum(p, cfg)
    cost = np.abs(both[:, None] - ref[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if cost.size else 0.0
