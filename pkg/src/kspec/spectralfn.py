"""Spectral projections of Krein-space normal matrices.

Riesz projections are computed two independent ways (root-subspace
similarity and contour quadrature).  On top of them sit the local spectral
function on rectangles of positive type, projections onto spectral sets of
positive type, the strong-stability decision and similarity diagnostics.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .krein import (
    cartesian_parts,
    compressed_gram,
    fundamental_decomposition_from_projections,
    gram_adjoint,
    is_g_normal,
    spectrum_is_real,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    as_matrix,
    eig_structure,
    hausdorff_distance,
    opnorm,
    orthonormal_basis,
)
from .regions import BOUNDARY, OUTSIDE, Circle, Rectangle, as_region
from .signtype import Label, classify_spectrum

__all__ = [
    "SpectralProjection",
    "AxiomReport",
    "StabilityReport",
    "SimilarityReport",
    "riesz_projection_eig",
    "riesz_projection_quadrature",
    "local_spectral_function",
    "verify_lsf_axioms",
    "spectral_set_projection",
    "strong_stability",
    "similarity_report",
    "restriction_normality_defect",
]

DEFAULT_NODES = 256


@dataclass(frozen=True)
class SpectralProjection:
    E: np.ndarray
    region: object
    eigenvalues: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def rank(self):
        return int(round(np.trace(self.E).real))


def _select(es, region, strict):
    inside, boundary = [], []
    for i, c in enumerate(es.clusters):
        status = region.status(c.eigenvalue, es.cluster_radius + c.spread)
        if status == OUTSIDE:
            continue
        if status == BOUNDARY:
            if strict:
                raise PreconditionError(
                    "spectrum on boundary",
                    f"eigenvalue {c.eigenvalue:.6g} lies on the region boundary",
                )
            boundary.append(c.eigenvalue)
        inside.append(i)
    return inside, boundary


def _idempotency(E):
    return opnorm(E @ E - E)


def riesz_projection_eig(N, region, cfg=DEFAULT_TOLERANCES, structure=None):
    """Riesz projection as the sum of root projectors of enclosed clusters."""
    N = as_matrix(N, "N")
    region = as_region(region)
    es = structure if structure is not None else eig_structure(N, cfg)
    chosen, _ = _select(es, region, strict=True)
    E = es.projector(chosen)
    return SpectralProjection(
        E=E,
        region=region,
        eigenvalues=tuple(es.clusters[i].eigenvalue for i in chosen),
        diagnostics={"idempotency": _idempotency(E), "basis_condition": es.basis_condition()},
    )


def riesz_projection_quadrature(N, contour, nodes=DEFAULT_NODES, cfg=DEFAULT_TOLERANCES):
    """Riesz projection ``-(1/2 pi i) \\oint (N - z)^{-1} dz`` by quadrature.

    Circles use the trapezoid rule in the angle; rectangles Gauss-Legendre
    on each edge.  Both converge geometrically when the contour keeps its
    distance from the spectrum.
    """
    N = as_matrix(N, "N")
    if not isinstance(contour, (Rectangle, Circle)):
        raise PreconditionError("unsupported contour", "contour must be a Rectangle or Circle")
    n = N.shape[0]
    es = eig_structure(N, cfg)
    members = np.concatenate([c.members for c in es.clusters])
    clearance = min(contour.boundary_distance(z) for z in members)
    if clearance <= es.cluster_radius:
        raise PreconditionError("contour too close to spectrum", f"clearance {clearance:.3e}")
    z, w = contour.quadrature(int(nodes))
    E = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for zj, wj in zip(z, w):
        E += wj * np.linalg.solve(zj * eye - N, eye)
    E /= 2j * np.pi
    return SpectralProjection(
        E=E,
        region=as_region(contour),
        eigenvalues=tuple(c.eigenvalue for c in es.clusters if contour.contains(c.eigenvalue)),
        diagnostics={"idempotency": _idempotency(E), "clearance": clearance, "nodes": len(z)},
    )


def _require_normal(N, space, cfg):
    check = is_g_normal(N, space, cfg)
    if not check.normal:
        raise PreconditionError("not normal", f"normality defect {check.defect:.3e}")


def _restriction_spectrum(N, B, cfg):
    if B.shape[1] == 0:
        return np.zeros(0, dtype=complex)
    return eig_structure(B.conj().T @ N @ B, cfg).eigenvalues


def local_spectral_function(N, space, Q, cfg=DEFAULT_TOLERANCES, _cache=None):
    """Spectral projection ``E(Q)`` of a normal ``N`` on a region of positive type.

    ``Q`` is a closed rectangle or a finite union of rectangles.  Requires
    ``N`` normal, ``sigma(Re N)`` and ``sigma(Im N)`` real, and every
    eigenvalue in ``Q`` of positive type.  ``E(Q)`` is the projection onto
    the root subspaces of the eigenvalues in ``Q`` (boundary band included);
    the diagnostics record its Krein selfadjointness, the Hilbert-space
    margin of its range, invariance and spectral inclusion.

    Raises
    ------
    PreconditionError
        Naming the failed hypothesis.
    """
    N = as_matrix(N, "N")
    region = as_region(Q)
    if _cache is None:
        _cache = _lsf_context(N, space, cfg)
    ctx = _cache
    es, spec = ctx["structure"], ctx["spectrum"]
    chosen, boundary = _select(es, region, strict=False)
    bad = [spec.points[i] for i in chosen if spec.points[i].label is not Label.POSITIVE]
    if bad:
        detail = ", ".join(
            f"{spec.points[i].eigenvalue:.6g}: {spec.points[i].label.value}" for i in chosen
        )
        raise PreconditionError("region not of positive type", detail)
    E = es.projector(chosen)
    n = N.shape[0]
    G = space.G
    B = orthonormal_basis(E, cfg) if chosen else np.zeros((n, 0), dtype=complex)
    C = orthonormal_basis(np.eye(n) - E, cfg)
    inside = es.eigenvalues[chosen]
    outside = np.delete(es.eigenvalues, chosen)
    gram = compressed_gram(B, space)
    diag = {
        "idempotency": _idempotency(E),
        "selfadjoint": opnorm(G @ E - E.conj().T @ G) / space.norm,
        "min_gram": float(np.linalg.eigvalsh(gram)[0]) if chosen else np.inf,
        "invariance": opnorm((np.eye(n) - E) @ N @ E),
        "commutes_N": opnorm(E @ N - N @ E),
        "commutes_adjoint": opnorm(E @ ctx["adjoint"] - ctx["adjoint"] @ E),
        "inclusion": hausdorff_distance(_restriction_spectrum(N, B, cfg), inside) if chosen else 0.0,
        "complement": hausdorff_distance(_restriction_spectrum(N, C, cfg), outside)
        if outside.size else 0.0,
        "boundary": tuple(boundary),
        "finite_order": ctx["order"],
    }
    return SpectralProjection(E=E, region=region, eigenvalues=tuple(inside), diagnostics=diag)


def _lsf_context(N, space, cfg):
    _require_normal(N, space, cfg)
    parts = cartesian_parts(N, space)
    scale = opnorm(N)
    es_re, es_im = eig_structure(parts.re, cfg), eig_structure(parts.im, cfg)
    if not spectrum_is_real(es_re, scale, cfg):
        raise PreconditionError("sigma(Re N) not real", "real part has nonreal spectrum")
    if not spectrum_is_real(es_im, scale, cfg):
        raise PreconditionError("sigma(Im N) not real", "imaginary part has nonreal spectrum")
    spec = classify_spectrum(N, space, cfg)
    return {
        "structure": spec.structure,
        "spectrum": spec,
        "adjoint": gram_adjoint(N, space),
        "order": max([c.jordan_index for c in es_im.clusters] + [1]),
    }


@dataclass(frozen=True)
class AxiomReport:
    """Defects of the local spectral function axioms over a finite family.

    All defects are relative: projection identities in the operator norm,
    commutation defects divided by ``||B||``, spectral inclusions divided by
    ``max(1, ||N||)``.
    """

    defects: dict
    hilbert: bool
    passed: bool
    projections: dict = field(repr=False, default_factory=dict)

    def lines(self):
        return [f"{k}: {v:.3e}" for k, v in self.defects.items()]


def _commutant_sample(N, adjoint, rng, count=3, degree=3):
    sample = [N, adjoint]
    n = N.shape[0]
    for _ in range(count):
        coef = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        P = np.zeros((n, n), dtype=complex)
        for c in coef[::-1]:
            P = P @ N + c * np.eye(n)
        sample.append(P)
    return sample


def verify_lsf_axioms(N, space, family, cfg=DEFAULT_TOLERANCES, seed=0):
    """Check the local spectral function axioms on ``family`` and derived sets.

    ``family`` is a sequence of rectangles (or unions).  Besides its members
    the check covers all pairwise intersections, unions of disjoint pairs and
    the empty set:

    (i) ``E(Q)`` is G-selfadjoint and ``(ran E(Q), [.,.])`` is a Hilbert space;
    (ii) ``E(Q1 & Q2) = E(Q1) E(Q2)``;
    (iii) ``E(Q1 | Q2) = E(Q1) + E(Q2)`` for disjoint ``Q1``, ``Q2`` (with finitely
    many clusters only finite additivity is observable);
    (iv) ``E(Q)`` commutes with ``N``, ``N^+`` and random polynomials in ``N``;
    (v) ``sigma(N | ran E(Q))`` lies in the closure of ``sigma(N) & Q``;
    (vi) ``sigma(N | ran (I - E(Q)))`` lies in the closure of ``sigma(N) - Q``.
    """
    N = as_matrix(N, "N")
    ctx = _lsf_context(N, space, cfg)
    rng = np.random.default_rng(seed)
    family = [as_region(Q) for Q in family]
    E = {}

    def proj(region):
        if region not in E:
            E[region] = local_spectral_function(N, space, region, cfg, _cache=ctx)
        return E[region]

    defects = {k: 0.0 for k in ("i", "ii", "iii", "iv", "v", "vi", "empty")}
    hilbert = True
    margin = cfg.rank_tol(space.dim) * space.norm
    nscale = max(1.0, opnorm(N))
    defects["empty"] = opnorm(proj(as_region(None)).E)
    for a, Qa in enumerate(family):
        for Qb in family[a:]:
            inter = Qa.intersection(Qb)
            d = opnorm(proj(inter).E - proj(Qa).E @ proj(Qb).E)
            defects["ii"] = max(defects["ii"], d)
            if inter.is_empty or not proj(inter).eigenvalues:
                if Qa is not Qb:
                    u = opnorm(proj(Qa.union(Qb)).E - proj(Qa).E - proj(Qb).E)
                    defects["iii"] = max(defects["iii"], u)
    probes = _commutant_sample(N, ctx["adjoint"], rng)
    for P in list(E.values()):
        d = P.diagnostics
        defects["i"] = max(defects["i"], d["selfadjoint"])
        if P.eigenvalues and d["min_gram"] <= margin:
            hilbert = False
        for Bm in probes:
            defects["iv"] = max(defects["iv"], opnorm(P.E @ Bm - Bm @ P.E) / max(opnorm(Bm), 1e-300))
        defects["v"] = max(defects["v"], d["inclusion"] / nscale)
        defects["vi"] = max(defects["vi"], d["complement"] / nscale)
    passed = hilbert and all(v <= cfg.residual_rtol for v in defects.values())
    return AxiomReport(defects=defects, hilbert=hilbert, passed=passed, projections=E)


def spectral_set_projection(N, space, region, cfg=DEFAULT_TOLERANCES):
    """Riesz projection onto a spectral set of positive type.

    For a normal ``N`` this projection is Krein-selfadjoint (``Q = Q^+ Q``),
    its range is invariant under ``N`` and ``N^+`` and is a Hilbert space
    under ``[.,.]``.
    """
    N = as_matrix(N, "N")
    _require_normal(N, space, cfg)
    spec = classify_spectrum(N, space, cfg)
    proj = riesz_projection_eig(N, region, cfg, structure=spec.structure)
    chosen = [i for i, c in enumerate(spec.structure.clusters) if c.eigenvalue in proj.eigenvalues]
    bad = [spec.points[i] for i in chosen if spec.points[i].label is not Label.POSITIVE]
    if bad:
        detail = ", ".join(
            f"{spec.points[i].eigenvalue:.6g}: {spec.points[i].label.value}" for i in chosen
        )
        raise PreconditionError("region not of positive type", detail)
    Q = proj.E
    n = N.shape[0]
    adj = gram_adjoint(N, space)
    Qplus = gram_adjoint(Q, space)
    B = orthonormal_basis(Q, cfg) if chosen else np.zeros((n, 0), dtype=complex)
    diag = dict(proj.diagnostics)
    diag.update(
        selfadjoint=opnorm(Qplus - Q),
        qplus_q=opnorm(Qplus @ Q - Q),
        invariant_N=opnorm((np.eye(n) - Q) @ N @ Q),
        invariant_adjoint=opnorm((np.eye(n) - Q) @ adj @ Q),
        min_gram=float(np.linalg.eigvalsh(compressed_gram(B, space))[0]) if chosen else np.inf,
    )
    return SpectralProjection(E=Q, region=proj.region, eigenvalues=proj.eigenvalues, diagnostics=diag)


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    violated: str | None
    conditions: dict
    Qplus: SpectralProjection | None = None
    Qminus: SpectralProjection | None = None
    J: np.ndarray | None = None
    min_eig_GJ: float | None = None
    hilbert_product_defect: float | None = None
    classified: object = field(default=None, repr=False)


def strong_stability(N, space, cfg=DEFAULT_TOLERANCES):
    """Decide strong stability of a normal ``N``.

    The conditions are: every eigenvalue of positive or negative type; real
    spectrum of ``Im N`` (or of ``Re N``); finite resolvent order of that
    part (always true for matrices, recorded as its Jordan index).  When
    they hold, ``J = Q+ - Q-`` built from the Riesz projections onto the
    positive and negative type eigenvalues is a fundamental symmetry, and
    ``N`` is normal for the Hilbert product ``[J., .]``.

    Raises
    ------
    PreconditionError
        If ``N`` is not normal.
    """
    N = as_matrix(N, "N")
    _require_normal(N, space, cfg)
    spec = classify_spectrum(N, space, cfg)
    parts = cartesian_parts(N, space)
    scale = opnorm(N)
    es_re, es_im = eig_structure(parts.re, cfg), eig_structure(parts.im, cfg)
    im_real, re_real = spectrum_is_real(es_im, scale, cfg), spectrum_is_real(es_re, scale, cfg)
    chosen = es_im if im_real else es_re
    conditions = {
        "definite_split": spec.definite_split,
        "im_real": im_real,
        "re_real": re_real,
        "finite_order": max([c.jordan_index for c in chosen.clusters] + [1]),
    }
    if not spec.definite_split:
        return StabilityReport(False, "sigma(N) != sigma++ u sigma--", conditions, classified=spec)
    if not (im_real or re_real):
        return StabilityReport(False, "sigma(Im N) and sigma(Re N) not real", conditions,
                               classified=spec)
    es = spec.structure
    pos, neg = spec.indices(Label.POSITIVE), spec.indices(Label.NEGATIVE)
    Qp, Qm = es.projector(pos), es.projector(neg)
    try:
        fd = fundamental_decomposition_from_projections(Qp, Qm, space, cfg)
    except PreconditionError as exc:
        return StabilityReport(False, exc.condition, conditions, classified=spec)
    J = fd.J
    adj = gram_adjoint(N, space)
    star = J @ adj @ J
    defect = opnorm(star @ N - N @ star)
    wrap = lambda E, idx: SpectralProjection(  # noqa: E731
        E=E, region=None, eigenvalues=tuple(es.clusters[i].eigenvalue for i in idx),
        diagnostics={"selfadjoint": opnorm(space.G @ E - E.conj().T @ space.G) / space.norm},
    )
    return StabilityReport(
        stable=True,
        violated=None,
        conditions=conditions,
        Qplus=wrap(Qp, pos),
        Qminus=wrap(Qm, neg),
        J=J,
        min_eig_GJ=fd.min_eig_GJ,
        hilbert_product_defect=defect,
        classified=spec,
    )


def restriction_normality_defect(N, space, E, cfg=DEFAULT_TOLERANCES):
    """Normality defect of ``N`` restricted to ``ran E`` in the product ``[.,.]``.

    ``[.,.]`` must be definite on ``ran E``; with an orthonormal basis ``B``
    of the range, the restriction is ``R = B^H N B`` and its adjoint for the
    Gram matrix ``M = B^H G B`` is ``M^{-1} R^H M``.
    """
    B = orthonormal_basis(np.asarray(E, dtype=complex), cfg)
    if B.shape[1] == 0:
        return 0.0
    N = as_matrix(N, "N")
    R = B.conj().T @ N @ B
    M = compressed_gram(B, space)
    star = np.linalg.solve(M, R.conj().T @ M)
    return opnorm(star @ R - R @ star)


@dataclass(frozen=True)
class SimilarityReport:
    re_diagonalizable: bool
    im_diagonalizable: bool
    re_real: bool
    im_real: bool
    commutation_defect: float

    @property
    def passed(self):
        return self.re_diagonalizable and self.im_diagonalizable and self.re_real and self.im_real


def similarity_report(N, space, cfg=DEFAULT_TOLERANCES):
    """Diagonalizability and realness of the Cartesian parts of a stable ``N``.

    ``||G N - N G||`` is informational: it vanishes when ``N`` is also
    normal for the Gram product ``(G., .)``.
    """
    N = as_matrix(N, "N")
    report = strong_stability(N, space, cfg)
    if not report.stable:
        raise PreconditionError("not strongly stable", report.violated)
    parts = cartesian_parts(N, space)
    scale = opnorm(N)
    es_re, es_im = eig_structure(parts.re, cfg), eig_structure(parts.im, cfg)
    return SimilarityReport(
        re_diagonalizable=all(c.semisimple for c in es_re.clusters),
        im_diagonalizable=all(c.semisimple for c in es_im.clusters),
        re_real=spectrum_is_real(es_re, scale, cfg),
        im_real=spectrum_is_real(es_im, scale, cfg),
        commutation_defect=opnorm(space.G @ N - N @ space.G),
    )
