"""Positive/negative type classification of eigenvalues.

For a matrix an approximate eigensequence at ``lam`` accumulates on the unit
sphere of ``ker(N - lam)``, so ``lam`` is of positive type exactly when the
Gram matrix compressed to that kernel is positive definite (negative type:
negative definite).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, ResolventPoint
from .krein import compressed_gram
from .linalg import DEFAULT_TOLERANCES, as_matrix, eig_structure
from .regions import OUTSIDE, as_region

__all__ = [
    "Label",
    "SpectralPointType",
    "ClassifiedSpectrum",
    "ProbeConfig",
    "RegionReport",
    "classify_point",
    "classify_spectrum",
    "epsdelta_probe",
    "probe_region",
    "region_is_positive_type",
]


class Label(str, enum.Enum):
    POSITIVE = "PositiveType"
    NEGATIVE = "NegativeType"
    NEUTRAL = "Neutral"
    INDEFINITE = "Indefinite"

    @property
    def definite(self):
        return self in (Label.POSITIVE, Label.NEGATIVE)

    @property
    def short(self):
        return {"PositiveType": "++", "NegativeType": "--"}.get(self.value, self.value.lower())


@dataclass(frozen=True)
class SpectralPointType:
    """Sign type of one eigenvalue cluster.

    ``witness`` holds the smallest and largest eigenvalue of the Gram matrix
    compressed to the kernel; ``root_witness`` the same on the whole root
    subspace (it differs from ``witness`` only when the cluster has Jordan
    chains).
    """

    eigenvalue: complex
    label: Label
    witness: tuple
    root_witness: tuple
    semisimple: bool
    kernel_dim: int
    algebraic: int
    kernel_basis: np.ndarray = field(repr=False)


def _label(lo, hi, margin):
    if lo > margin:
        return Label.POSITIVE
    if hi < -margin:
        return Label.NEGATIVE
    if lo < -margin and hi > margin:
        return Label.INDEFINITE
    return Label.NEUTRAL


def _extremes(M):
    lam = np.linalg.eigvalsh(M)
    return float(lam[0]), float(lam[-1])


def _classify_cluster(N, es, i, space, cfg):
    cl = es.clusters[i]
    B = cl.root_basis
    T11 = B.conj().T @ N @ B - cl.eigenvalue * np.eye(cl.algebraic)
    # kernel of N - lam inside the root subspace, of the detected dimension
    _, _, Vh = np.linalg.svd(T11)
    K = B @ Vh[cl.algebraic - cl.geometric:].conj().T
    margin = cfg.rank_tol(space.dim) * space.norm
    lo, hi = _extremes(compressed_gram(K, space))
    root = _extremes(compressed_gram(B, space))
    return SpectralPointType(
        eigenvalue=cl.eigenvalue,
        label=_label(lo, hi, margin),
        witness=(lo, hi),
        root_witness=root,
        semisimple=cl.semisimple,
        kernel_dim=cl.geometric,
        algebraic=cl.algebraic,
        kernel_basis=K,
    )


def _check(N, space):
    N = as_matrix(N, "N")
    if N.shape != space.G.shape:
        raise PreconditionError("dimension mismatch", f"N {N.shape} vs G {space.G.shape}")
    return N


def classify_point(N, space, lam, cfg=DEFAULT_TOLERANCES, structure=None):
    """Sign type of the eigenvalue cluster at ``lam``.

    Raises
    ------
    ResolventPoint
        If ``lam`` is farther than the cluster radius from every eigenvalue.
    """
    N = _check(N, space)
    es = structure if structure is not None else eig_structure(N, cfg)
    i, dist = es.nearest(complex(lam))
    if i is None or dist > es.cluster_radius + es.clusters[i].spread:
        raise ResolventPoint(complex(lam), dist)
    return _classify_cluster(N, es, i, space, cfg)


@dataclass(frozen=True)
class ClassifiedSpectrum:
    points: tuple
    structure: object = field(repr=False)

    @property
    def all_positive(self):
        return all(p.label is Label.POSITIVE for p in self.points)

    @property
    def all_negative(self):
        return all(p.label is Label.NEGATIVE for p in self.points)

    @property
    def definite_split(self):
        return all(p.label.definite for p in self.points)

    def indices(self, label):
        return [i for i, p in enumerate(self.points) if p.label is label]

    def labels(self):
        return {p.eigenvalue: p.label for p in self.points}


def classify_spectrum(N, space, cfg=DEFAULT_TOLERANCES):
    N = _check(N, space)
    es = eig_structure(N, cfg)
    points = tuple(_classify_cluster(N, es, i, space, cfg) for i in range(len(es.clusters)))
    return ClassifiedSpectrum(points=points, structure=es)


@dataclass(frozen=True)
class ProbeConfig:
    """Parameters of the epsilon-delta probe.

    ``eps`` bounds ``||(N - lam) x||`` for unit ``x``; region scans sample a
    ``grid`` x ``grid`` lattice, widened by ``tau`` on each side.
    """

    eps: float = 0.1
    grid: int = 9
    tau: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise PreconditionError("invalid eps", f"eps={self.eps!r} must lie in (0, 1)")
        if self.grid < 1 or self.tau < 0:
            raise PreconditionError("invalid probe", f"grid={self.grid}, tau={self.tau}")


def epsdelta_probe(N, space, lam, eps=0.1):
    """Smallest ``[x, x]`` over unit ``x`` with ``||(N - lam) x|| <= eps``-ish.

    The admissible set is the span of right singular vectors of ``N - lam``
    with singular value at most ``eps``; the minimum is the smallest
    eigenvalue of the Gram matrix compressed to that span.  A positive value
    certifies the implication ``||(N - lam)x|| <= eps ||x|| => [x,x] >= delta
    ||x||^2`` on that span.  Returns ``inf`` when the span is empty.
    """
    N = _check(N, space)
    _, s, Vh = np.linalg.svd(N - lam * np.eye(space.dim))
    V = Vh[s <= eps].conj().T
    if V.shape[1] == 0:
        return np.inf
    return _extremes(compressed_gram(V, space))[0]


def probe_region(N, space, rect, probe=ProbeConfig()):
    """Minimum of :func:`epsdelta_probe` over a lattice covering ``rect``."""
    t = probe.tau
    xs = np.linspace(rect.a - t, rect.b + t, probe.grid)
    ys = np.linspace(rect.c - t, rect.d + t, probe.grid)
    return min(epsdelta_probe(N, space, complex(x, y), probe.eps) for x in xs for y in ys)


@dataclass(frozen=True)
class RegionReport:
    positive: bool
    entries: tuple


def region_is_positive_type(N, space, Q, cfg=DEFAULT_TOLERANCES):
    """Whether every eigenvalue in the closed region ``Q`` is of positive type.

    ``entries`` lists ``(eigenvalue, label, status)`` for each cluster in or
    near ``Q``; ``status`` is ``"boundary"`` for clusters within the cluster
    tolerance band of the boundary (they count as inside).
    """
    region = as_region(Q)
    spec = classify_spectrum(N, space, cfg)
    tol = spec.structure.cluster_radius
    entries = []
    ok = True
    for p in spec.points:
        status = region.status(p.eigenvalue, tol)
        if status == OUTSIDE:
            continue
        entries.append((p.eigenvalue, p.label, status))
        ok = ok and p.label is Label.POSITIVE
    return RegionReport(positive=ok, entries=tuple(entries))

