"""Dense complex matrix engine.

Eigenvalue clusters with multiplicities and root subspaces, numerical
nullspaces, the Sylvester equation and Hermitian square roots.  Everything
here works on small dense ``numpy`` arrays; nothing is iterative.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import NumericalFailure, PreconditionError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOLERANCES",
    "Cluster",
    "EigenStructure",
    "as_matrix",
    "opnorm",
    "numerical_rank",
    "eig_structure",
    "nullspace",
    "orthonormal_basis",
    "sylvester_solve",
    "sylvester_residual",
    "hermitian_psd_sqrt",
    "hausdorff_distance",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances used throughout the toolkit.

    Parameters
    ----------
    rank_rtol
        Relative singular value cutoff.  ``None`` means ``dim * 1e-12``,
        resolved per matrix by :meth:`rank_tol`.
    cluster_rtol
        Eigenvalues closer than ``cluster_rtol * ||T||`` are always grouped.
    residual_rtol
        Acceptance threshold for residuals and defects.
    merge_rtol
        Largest radius (relative to ``||T||``) over which split eigenvalues of
        a defective cluster may be coalesced.  A coalesced group must pass a
        backward-error test at level ``rank_tol``.
    """

    rank_rtol: float | None = None
    cluster_rtol: float = 1e-8
    residual_rtol: float = 1e-9
    merge_rtol: float = 1e-4

    def __post_init__(self):
        for name in ("rank_rtol", "cluster_rtol", "residual_rtol", "merge_rtol"):
            value = getattr(self, name)
            if value is None and name == "rank_rtol":
                continue
            if not (0.0 < value < 1.0):
                raise PreconditionError(
                    "invalid tolerance", f"{name}={value!r} must lie in (0, 1)"
                )

    def rank_tol(self, dim):
        if self.rank_rtol is not None:
            return self.rank_rtol
        return min(max(dim, 1) * 1e-12, 0.5)

    def as_dict(self, dim=None):
        out = {
            "rank_rtol": self.rank_rtol,
            "cluster_rtol": self.cluster_rtol,
            "residual_rtol": self.residual_rtol,
            "merge_rtol": self.merge_rtol,
        }
        if dim is not None:
            out["rank_rtol_resolved"] = self.rank_tol(dim)
        return out


DEFAULT_TOLERANCES = ToleranceConfig()


def as_matrix(T, name="matrix", square=True):
    """Return ``T`` as a finite 2-D complex array (a copy)."""
    A = np.array(T, dtype=complex, copy=True)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise PreconditionError("not a matrix", f"{name} has ndim={A.ndim}")
    if square and A.shape[0] != A.shape[1]:
        raise PreconditionError("not square", f"{name} has shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError("non-finite entries", f"{name} has non-finite entries")
    return A


def opnorm(T):
    """Spectral norm; zero for empty matrices."""
    T = np.asarray(T)
    if T.size == 0:
        return 0.0
    return float(np.linalg.norm(T, 2))


def numerical_rank(T, atol):
    """Number of singular values of ``T`` strictly above ``atol``."""
    T = np.asarray(T)
    if T.size == 0:
        return 0
    s = np.linalg.svd(T, compute_uv=False)
    return int(np.count_nonzero(s > atol))


@dataclass(frozen=True)
class Cluster:
    """One numerically distinct eigenvalue and its root subspace."""

    eigenvalue: complex
    algebraic: int
    geometric: int
    jordan_index: int
    jordan_sizes: tuple
    root_basis: np.ndarray = field(repr=False)
    members: np.ndarray = field(repr=False)

    @property
    def semisimple(self):
        return self.algebraic == self.geometric

    @property
    def spread(self):
        return float(np.max(np.abs(self.members - self.eigenvalue)))


@dataclass(frozen=True)
class EigenStructure:
    dim: int
    norm: float
    cluster_radius: float
    clusters: tuple

    @property
    def eigenvalues(self):
        return np.array([c.eigenvalue for c in self.clusters], dtype=complex)

    @property
    def spectral_radius(self):
        if not self.clusters:
            return 0.0
        return float(np.max(np.abs(self.eigenvalues)))

    def basis(self, indices=None):
        """Concatenated root bases (all clusters, or the selected ones)."""
        chosen = self.clusters if indices is None else [self.clusters[i] for i in indices]
        if not chosen:
            return np.zeros((self.dim, 0), dtype=complex)
        return np.hstack([c.root_basis for c in chosen])

    def basis_condition(self):
        return float(np.linalg.cond(self.basis())) if self.dim else 1.0

    def nearest(self, lam):
        """Index of the cluster closest to ``lam`` and its distance."""
        if not self.clusters:
            return None, np.inf
        d = np.abs(self.eigenvalues - lam)
        i = int(np.argmin(d))
        return i, float(d[i])

    def projector(self, indices):
        """Spectral (Riesz) projector onto the root subspaces of ``indices``.

        Built from the joint similarity ``V = [B_1 ... B_k]``: the projector
        is ``V[:, sel] @ inv(V)[sel, :]``.
        """
        indices = sorted(set(indices))
        if not indices:
            return np.zeros((self.dim, self.dim), dtype=complex)
        if len(indices) == len(self.clusters):
            return np.eye(self.dim, dtype=complex)
        V = self.basis()
        offsets = np.cumsum([0] + [c.algebraic for c in self.clusters])
        sel = np.concatenate([np.arange(offsets[i], offsets[i + 1]) for i in indices])
        try:
            W = np.linalg.solve(V, np.eye(self.dim))
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("root bases do not form a basis") from exc
        return V[:, sel] @ W[sel, :]


def _components(points, groups, radius):
    """Single-linkage components of ``groups`` (lists of point indices)."""
    k = len(groups)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(k):
        pa = points[groups[a]]
        for b in range(a + 1, k):
            pb = points[groups[b]]
            if np.min(np.abs(pa[:, None] - pb[None, :])) <= radius:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    comps = {}
    for i in range(k):
        comps.setdefault(find(i), []).append(i)
    return [comps[r] for r in sorted(comps)]


def _schur_block(schur, idx):
    """Leading block of the Schur form ``schur = (R, Z)`` reordered to put ``idx`` first.

    Eigenvalues are selected by their position on the diagonal of ``R``, so
    nearly equal eigenvalues outside ``idx`` are never swept along.
    """
    R, Z = schur
    n = R.shape[0]
    if len(idx) == n:
        return R, Z
    select = np.zeros(n, dtype=np.int32)
    select[idx] = 1
    Rs, Zs, _, m, _, _, info = sla.lapack.ztrsen(select, R, Z, job="N")
    if info != 0 or m != len(idx):
        raise NumericalFailure(
            f"Schur reordering failed (info={info}, selected {m} of {len(idx)})"
        )
    return Rs[:m, :m], Zs[:, :m]


def _backward_error(T11, mu, norm):
    # first-order size of the perturbation making T11 a single eigenvalue
    m = T11.shape[0]
    N = T11 - mu * np.eye(m)
    nN = opnorm(N)
    if nN == 0.0 or norm == 0.0:
        return 0.0
    return opnorm(np.linalg.matrix_power(N, m)) / (m * nN ** (m - 1) * norm)


def _connected(T, points, mu, atol):
    # every segment from a member to the centroid stays in the atol-pseudospectrum
    n = T.shape[0]
    eye = np.eye(n)
    for z in points:
        for t in (0.25, 0.5, 0.75, 1.0):
            s = np.linalg.svd(T - (z + t * (mu - z)) * eye, compute_uv=False)[-1]
            if s > atol:
                return False
    return True


def _coalesce(T, schur, norm, cfg):
    w = np.diag(schur[0])
    n = len(w)
    r = cfg.cluster_rtol * norm
    groups = [np.array(c, dtype=int) for c in _components(w, [[i] for i in range(n)], r)]
    rmax = cfg.merge_rtol * norm
    tol = cfg.rank_tol(n)
    while 0 < r < rmax and len(groups) > 1:
        r = min(2 * r, rmax)
        merged = []
        for comp in _components(w, groups, r):
            if len(comp) == 1:
                merged.append(groups[comp[0]])
                continue
            union = np.sort(np.concatenate([groups[i] for i in comp]))
            mu = w[union].mean()
            T11, _ = _schur_block(schur, union)
            if _backward_error(T11, mu, norm) <= tol and _connected(T, w[union], mu, tol * norm):
                merged.append(union)
            else:
                merged.extend(groups[i] for i in comp)
        groups = merged
    return groups


def _cluster(T, schur, idx, norm, cfg):
    w = np.diag(schur[0])
    n = T.shape[0]
    m = len(idx)
    mu = complex(w[idx].mean())
    if m == n:
        T11, B = T, np.eye(n, dtype=complex)
    else:
        T11, B = _schur_block(schur, idx)
    N = T11 - mu * np.eye(m)
    tol = cfg.rank_tol(n) * max(norm, np.finfo(float).tiny)
    nN = opnorm(N)
    nullities = [0]
    P = np.eye(m, dtype=complex)
    for j in range(1, m + 1):
        P = P @ N
        atol = j * tol * nN ** (j - 1)
        nullities.append(max(nullities[-1], m - numerical_rank(P, atol)))
        if nullities[-1] == m:
            break
    if nullities[-1] < m:
        nullities.append(m)
    nullities[1] = max(nullities[1], 1)
    index = next(j for j, v in enumerate(nullities) if v == m)
    at_least = [nullities[j] - nullities[j - 1] for j in range(1, len(nullities))] + [0]
    sizes = []
    for j in range(1, len(at_least)):
        sizes += [j] * (at_least[j - 1] - at_least[j])
    return Cluster(
        eigenvalue=mu,
        algebraic=m,
        geometric=nullities[1],
        jordan_index=index,
        jordan_sizes=tuple(sorted(sizes, reverse=True)),
        root_basis=B,
        members=w[idx].copy(),
    )


def eig_structure(T, cfg=DEFAULT_TOLERANCES):
    """Group the eigenvalues of ``T`` into clusters with multiplicities.

    Eigenvalues are read off a complex Schur form and grouped by single
    linkage at radius ``cfg.cluster_rtol * ||T||``.  Groups that sit within
    ``cfg.merge_rtol * ||T||`` of each other are then coalesced when their
    union is, up to a backward error of ``cfg.rank_tol(dim)``, a single
    defective eigenvalue and the segments joining its members to their
    centroid lie in the ``rank_tol * ||T||``-pseudospectrum.  This catches
    Jordan blocks that round-off has split into a ring of nearby eigenvalues
    without fusing distinct eigenvalues of badly conditioned matrices.

    For each cluster the reordered Schur basis gives an orthonormal basis of
    the root subspace, and ranks of powers of ``T11 - mu`` give the geometric
    multiplicity, the Jordan index and the Jordan block sizes.

    Raises
    ------
    NumericalFailure
        If the Schur decomposition does not converge.
    """
    T = as_matrix(T, "T")
    n = T.shape[0]
    norm = opnorm(T)
    if n == 0:
        return EigenStructure(0, 0.0, 0.0, ())
    try:
        R, Z = sla.schur(T, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Schur decomposition failed: {exc}") from exc
    w = np.diag(R).copy()
    if norm == 0.0:
        groups = [np.arange(n)]
    else:
        groups = _coalesce(T, (R, Z), norm, cfg)
    clusters = [_cluster(T, (R, Z), g, norm, cfg) for g in groups]
    clusters.sort(key=lambda c: (round(c.eigenvalue.real, 12), round(c.eigenvalue.imag, 12)))
    return EigenStructure(
        dim=n,
        norm=norm,
        cluster_radius=cfg.cluster_rtol * norm,
        clusters=tuple(clusters),
    )


def nullspace(T, cfg=DEFAULT_TOLERANCES):
    """Orthonormal basis of the numerical kernel of ``T``.

    The kernel dimension is the number of singular values that are at most
    ``rank_tol * sigma_max``.
    """
    T = as_matrix(T, "T", square=False)
    m, n = T.shape
    if T.size == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(T)
    cutoff = cfg.rank_tol(max(m, n)) * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > cutoff))
    return Vh[rank:].conj().T


def orthonormal_basis(B, cfg=DEFAULT_TOLERANCES):
    """Orthonormal basis for the column span of ``B``."""
    B = np.asarray(B, dtype=complex)
    if B.shape[1] == 0:
        return B.copy()
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    cutoff = cfg.rank_tol(B.shape[0]) * s[0]
    return U[:, s > cutoff]


def sylvester_residual(S, T, Z, X):
    return opnorm(S @ X - X @ T - Z)


def sylvester_solve(S, T, Z, cfg=DEFAULT_TOLERANCES):
    """Solve ``S X - X T = Z`` for ``X``.

    The equation is rewritten as the Kronecker system
    ``(I kron S - T^T kron I) vec(X) = vec(Z)``; intended for small sizes.

    Raises
    ------
    PreconditionError
        If the spectra of ``S`` and ``T`` come within the cluster tolerance of
        each other, in which case the solution is not unique.
    NumericalFailure
        If the computed solution misses the residual contract.
    """
    S = as_matrix(S, "S")
    T = as_matrix(T, "T")
    Z = as_matrix(Z, "Z", square=False)
    p, q = S.shape[0], T.shape[0]
    if Z.shape != (p, q):
        raise PreconditionError("dimension mismatch", f"Z has shape {Z.shape}, expected {(p, q)}")
    scale = opnorm(S) + opnorm(T)
    es, et = eig_structure(S, cfg), eig_structure(T, cfg)
    if es.clusters and et.clusters:
        gap = np.min(np.abs(es.eigenvalues[:, None] - et.eigenvalues[None, :]))
        spread = max([c.spread for c in es.clusters + et.clusters])
        if gap <= cfg.cluster_rtol * scale + spread:
            raise PreconditionError(
                "spectra overlap",
                f"sigma(S) and sigma(T) are {gap:.3e} apart (tolerance {cfg.cluster_rtol * scale:.3e})",
            )
    K = np.kron(np.eye(q), S) - np.kron(T.T, np.eye(p))
    try:
        x = np.linalg.solve(K, Z.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("Kronecker system is singular") from exc
    X = x.reshape((p, q), order="F")
    res = sylvester_residual(S, T, Z, X)
    if res > cfg.residual_rtol * scale * opnorm(X):
        raise NumericalFailure(f"Sylvester residual {res:.3e} exceeds contract")
    return X


def hermitian_psd_sqrt(A, cfg=DEFAULT_TOLERANCES):
    """Hermitian positive semidefinite square root of ``A``.

    Eigenvalues slightly below zero (within ``rank_tol * ||A||``) are clipped.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    norm = opnorm(A)
    tol = cfg.rank_tol(n) * norm
    if opnorm(A - A.conj().T) > tol:
        raise PreconditionError("not hermitian", "matrix is not Hermitian")
    A = (A + A.conj().T) / 2
    lam, Q = np.linalg.eigh(A)
    if lam.size and lam[0] < -tol:
        raise PreconditionError("indefinite", f"minimum eigenvalue {lam[0]:.3e} < 0")
    W = (Q * np.sqrt(np.clip(lam, 0.0, None))) @ Q.conj().T
    return (W + W.conj().T) / 2


def hausdorff_distance(a, b):
    """Hausdorff distance between two finite sets of complex numbers."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return np.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
