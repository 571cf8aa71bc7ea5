"""Resolvent norms, growth order near the real axis and power bounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import PreconditionError
from .linalg import DEFAULT_TOLERANCES, as_matrix, eig_structure, opnorm, orthonormal_basis

__all__ = [
    "ResolventGrowthReport",
    "IntervalSubspace",
    "BoundCheck",
    "resolvent_norm",
    "strip_sup",
    "estimate_growth_order",
    "power_bound_check",
    "maximal_spectral_subspace",
    "interval_power_bound_check",
    "power_bound_constant",
]

LADDER_STEPS = 40
GRID_POINTS = 41
MULTISTARTS = 4
SLOPE_WINDOW = 9


def _rnorm(T, lam):
    s = np.linalg.svd(T - lam * np.eye(T.shape[0]), compute_uv=False)
    return np.inf if s[-1] == 0.0 else float(1.0 / s[-1])


def _smin_batch(T, z, chunk=4096):
    """Smallest singular values of ``T - z_k`` for a vector of shifts."""
    n = T.shape[0]
    eye = np.eye(n)
    out = []
    for i in range(0, len(z), chunk):
        stack = T[None, :, :] - z[i:i + chunk, None, None] * eye
        out.append(np.linalg.svd(stack, compute_uv=False)[:, -1])
    return np.concatenate(out) if out else np.zeros(0)


def resolvent_norm(T, lam, cfg=DEFAULT_TOLERANCES):
    """``||(T - lam)^{-1}|| = 1 / sigma_min(T - lam)``.

    Returns ``inf`` when ``lam`` lies within the cluster tolerance of an
    eigenvalue of ``T``.
    """
    T = as_matrix(T, "T")
    es = eig_structure(T, cfg)
    _, dist = es.nearest(complex(lam))
    if dist <= es.cluster_radius:
        return np.inf
    return _rnorm(T, complex(lam))


def _real_structure(T, cfg):
    es = eig_structure(T, cfg)
    scale = max(es.norm, np.finfo(float).tiny)
    if es.clusters and np.max(np.abs(es.eigenvalues.imag)) > cfg.cluster_rtol * scale:
        raise PreconditionError("nonreal spectrum", "sigma(T) is not real within tolerance")
    return es


def strip_sup(T, order, width, centers=()):
    """Estimate ``sup |Im z|^order ||(T - z)^{-1}||`` over ``0 < |Im z| < width``.

    A lattice of real parts times a geometric ladder ``width * 2^-j``
    (``j = 1..40``) in both half planes is searched; the best lattice points
    seed Nelder-Mead refinements.  The estimate approaches the supremum from
    below.  Returns ``(value, argmax, samples)``.
    """
    T = np.asarray(T, dtype=complex)
    centers = np.asarray(list(centers), dtype=float)
    lo = (centers.min() if centers.size else 0.0) - width
    hi = (centers.max() if centers.size else 0.0) + width
    xs = np.unique(np.concatenate([np.linspace(lo, hi, GRID_POINTS), centers]))
    ys = width * 2.0 ** -np.arange(1, LADDER_STEPS + 1)

    def value(x, y):
        return abs(y) ** order * _rnorm(T, complex(x, y))

    z = np.concatenate([(xs[:, None] + 1j * sign * ys[None, :]).ravel() for sign in (1.0, -1.0)])
    smin = _smin_batch(T, z)
    with np.errstate(divide="ignore"):
        vals = np.abs(z.imag) ** order / smin
    samples = list(zip(z.tolist(), vals.tolist()))
    finite = np.isfinite(vals)
    if not finite.all():
        i = int(np.argmax(~finite))
        return np.inf, samples[i][0], samples
    best = int(np.argmax(vals))
    best_val, best_z = vals[best], samples[best][0]

    # log2 of |y| / width, kept strictly inside the open strip
    t_lo, t_hi = -200.0, -(2.0**-40)

    def height(t, sign):
        return sign * width * 2.0 ** float(np.clip(t, t_lo, t_hi))

    def neg_log(p, sign):
        x, t = p
        v = value(x, height(t, sign))
        # finite penalty keeps the simplex arithmetic free of inf - inf
        return -np.log(v) if 0 < v < np.inf else 1e300

    for i in np.argsort(vals)[::-1][:MULTISTARTS]:
        z0 = samples[i][0]
        sign = 1.0 if z0.imag > 0 else -1.0
        t0 = float(np.clip(np.log2(abs(z0.imag) / width), t_lo, t_hi))
        res = minimize(neg_log, [z0.real, t0], args=(sign,), method="Nelder-Mead",
                       bounds=[(lo - width, hi + width), (t_lo, t_hi)],
                       options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 150})
        if np.isfinite(res.fun) and -res.fun > np.log(best_val):
            best_val = float(np.exp(-res.fun))
            y = height(res.x[1], sign)
            best_z = complex(res.x[0], y)
    return float(best_val), best_z, samples


@dataclass(frozen=True)
class ResolventGrowthReport:
    """Growth of ``||(T - z)^{-1}||`` near the real axis.

    ``order`` is the exact order (largest Jordan index over the real
    eigenvalues); ``empirical_order`` the rounded log-log slope measured along
    vertical lines through each eigenvalue.  ``M`` estimates the constant for
    ``order`` over the strip ``0 < |Im z| < strip``.
    """

    order: int
    empirical_order: int
    slopes: tuple
    M: float
    argmax: complex
    strip: float
    spectral_radius: float
    norm: float
    samples: list = field(repr=False)


def _slope(T, x, scale, floor):
    """Least-squares slope of ``log ||R||`` against ``log(1/eps)`` over the last decade.

    ``eps`` runs over ``scale * 10^(-j/8)``, ``j = 0..96``; points below
    ``floor`` (where split eigenvalues of a perturbed cluster take over) or
    where ``sigma_min`` is within round-off of zero are discarded.  The fit
    uses the smallest remaining decade, where the leading Jordan term
    dominates.
    """
    eps = scale * np.logspace(0, -12, 97)
    n = T.shape[0]
    noise = 1e4 * np.finfo(float).eps * max(opnorm(T), np.finfo(float).tiny)
    keep_e, keep_r = [], []
    for e in eps:
        if e < floor:
            break
        s = np.linalg.svd(T - complex(x, e) * np.eye(n), compute_uv=False)[-1]
        if s <= noise:
            break
        keep_e.append(e)
        keep_r.append(1.0 / s)
    if len(keep_e) < 2:
        return np.inf
    u, v = np.log(1.0 / np.array(keep_e)), np.log(np.array(keep_r))
    width = min(SLOPE_WINDOW, len(u))
    return float(np.polyfit(u[-width:], v[-width:], 1)[0])


def estimate_growth_order(T, cfg=DEFAULT_TOLERANCES, strip=None):
    """Order and constant of the resolvent growth of a real-spectrum matrix.

    Raises
    ------
    PreconditionError
        If the spectrum is not real within the cluster tolerance.
    """
    T = as_matrix(T, "T")
    es = _real_structure(T, cfg)
    norm = es.norm
    order = max([c.jordan_index for c in es.clusters] + [1])
    width = float(strip) if strip is not None else (norm if norm > 0 else 1.0)
    centers = es.eigenvalues.real
    slopes = []
    for i, x in enumerate(centers):
        others = np.delete(centers, i)
        scale = norm if norm > 0 else 1.0
        if others.size:
            scale = min(scale, np.min(np.abs(others - x)) / 2)
        floor = 10 * (es.clusters[i].spread + es.cluster_radius)
        slopes.append(_slope(T, x, scale, floor))
    empirical = max([int(round(s)) for s in slopes if np.isfinite(s)] + [1])
    M, argmax, samples = strip_sup(T, order, width, centers)
    return ResolventGrowthReport(
        order=order,
        empirical_order=empirical,
        slopes=tuple(slopes),
        M=M,
        argmax=argmax,
        strip=width,
        spectral_radius=es.spectral_radius,
        norm=norm,
        samples=samples,
    )


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


def power_bound_check(T, k, report, slack=1.1):
    """``||T^k|| <= 2^k ||T||^(k-n) (M + ||T||^(n-1)) r(T)`` for ``k >= n``."""
    T = as_matrix(T, "T")
    n = report.order
    if k < n:
        raise PreconditionError("k < n", f"power {k} below growth order {n}")
    norm = opnorm(T)
    if norm == 0.0:
        raise PreconditionError("zero operator", "T must be nonzero")
    lhs = opnorm(np.linalg.matrix_power(T, k))
    rhs = 2.0**k * norm ** (k - n) * (report.M + norm ** (n - 1)) * report.spectral_radius
    return BoundCheck(lhs, rhs, bool(lhs <= slack * rhs))


@dataclass(frozen=True)
class IntervalSubspace:
    """Sum of the root subspaces of ``T`` belonging to a real interval."""

    interval: tuple
    basis: np.ndarray = field(repr=False)
    eigenvalues: tuple
    boundary: tuple
    invariance_defect: float
    restriction_spectrum: np.ndarray = field(repr=False)
    hyperinvariance_defects: tuple = ()

    @property
    def length(self):
        return self.interval[1] - self.interval[0]

    @property
    def dim(self):
        return self.basis.shape[1]


def maximal_spectral_subspace(T, interval, cfg=DEFAULT_TOLERANCES, commuting=()):
    """Maximal spectral subspace of ``T`` for the closed interval ``[alpha, beta]``.

    In finite dimensions this is the sum of the root subspaces of the
    eigenvalues in the interval.  Eigenvalues within the cluster tolerance of
    an endpoint are included and listed in ``boundary``.  For each operator in
    ``commuting`` the defect ``||(I - P) B P||`` of leaving the subspace is
    reported (hyperinvariance spot check).
    """
    T = as_matrix(T, "T")
    alpha, beta = map(float, interval)
    if alpha > beta:
        raise PreconditionError("invalid interval", f"[{alpha}, {beta}]")
    es = _real_structure(T, cfg)
    tol = es.cluster_radius
    chosen, boundary = [], []
    for i, c in enumerate(es.clusters):
        x = c.eigenvalue.real
        if not (alpha - tol <= x <= beta + tol):
            continue
        chosen.append(i)
        if min(abs(x - alpha), abs(x - beta)) <= tol:
            boundary.append(x)
    B = orthonormal_basis(es.basis(chosen), cfg)
    n = T.shape[0]
    P = B @ B.conj().T
    leak = lambda A: opnorm((np.eye(n) - P) @ A @ B)  # noqa: E731
    restriction = B.conj().T @ T @ B
    return IntervalSubspace(
        interval=(alpha, beta),
        basis=B,
        eigenvalues=tuple(es.clusters[i].eigenvalue.real for i in chosen),
        boundary=tuple(boundary),
        invariance_defect=leak(T),
        restriction_spectrum=np.linalg.eigvals(restriction) if B.shape[1] else np.zeros(0),
        hyperinvariance_defects=tuple(leak(as_matrix(A, "commuting")) for A in commuting),
    )


def power_bound_constant(T, order, cfg=DEFAULT_TOLERANCES):
    """``C = (M2 + 2^(n-1) ||T||^(n-1)) / (2^n ||T||^n)``.

    ``M2`` is the strip supremum over ``0 < |Im z| < 2 ||T||``.
    """
    T = as_matrix(T, "T")
    norm = opnorm(T)
    es = eig_structure(T, cfg)
    M2, _, _ = strip_sup(T, order, 2 * norm, es.eigenvalues.real)
    return (M2 + 2.0 ** (order - 1) * norm ** (order - 1)) / (2.0**order * norm**order)


def interval_power_bound_check(T, interval, lam, k, C=None, cfg=DEFAULT_TOLERANCES, order=None):
    """``||(T|L - lam)^k|| <= 4^k ||T||^k C l(interval)`` on the interval subspace.

    The restriction is taken in an orthonormal basis of the subspace.  When
    ``C`` is omitted it is computed by :func:`power_bound_constant`.
    """
    T = as_matrix(T, "T")
    alpha, beta = map(float, interval)
    lam = complex(lam)
    norm = opnorm(T)
    if abs(lam.imag) > 0 or not (alpha <= lam.real <= beta):
        raise PreconditionError("lambda not in interval", f"{lam} not in [{alpha}, {beta}]")
    if beta - alpha > norm:
        raise PreconditionError("interval too long", f"length {beta - alpha} > ||T|| = {norm}")
    if order is None:
        order = max([c.jordan_index for c in _real_structure(T, cfg).clusters] + [1])
    if k < order:
        raise PreconditionError("k < n", f"power {k} below growth order {order}")
    es = eig_structure(T, cfg)
    _, dist = es.nearest(lam)
    if dist > es.cluster_radius:
        raise PreconditionError("lambda not in spectrum", f"{lam} is not an eigenvalue")
    sub = maximal_spectral_subspace(T, (alpha, beta), cfg)
    B = sub.basis
    R = B.conj().T @ T @ B - lam.real * np.eye(B.shape[1])
    lhs = opnorm(np.linalg.matrix_power(R, k)) if B.shape[1] else 0.0
    if C is None:
        C = power_bound_constant(T, order, cfg)
    rhs = 4.0**k * norm**k * C * sub.length
    return BoundCheck(lhs, rhs, bool(lhs <= rhs))
