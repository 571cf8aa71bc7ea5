"""Closed regions of the complex plane and contour quadrature on them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

__all__ = ["Rectangle", "Circle", "Region", "as_region"]

INSIDE, BOUNDARY, OUTSIDE = "inside", "boundary", "outside"


@dataclass(frozen=True)
class Rectangle:
    """Closed rectangle ``{x + iy : a <= x <= b, c <= y <= d}``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(vals)):
            raise PreconditionError("invalid rectangle", f"non-finite corners {vals}")
        if self.a > self.b or self.c > self.d:
            raise PreconditionError("invalid rectangle", f"need a <= b and c <= d, got {vals}")

    def contains(self, z, tol=0.0):
        return bool(
            self.a - tol <= z.real <= self.b + tol and self.c - tol <= z.imag <= self.d + tol
        )

    def boundary_distance(self, z):
        x, y = z.real, z.imag
        dx = max(self.a - x, 0.0, x - self.b)
        dy = max(self.c - y, 0.0, y - self.d)
        if dx == 0.0 and dy == 0.0:
            return float(min(x - self.a, self.b - x, y - self.c, self.d - y))
        return float(np.hypot(dx, dy))

    def intersection(self, other):
        a, b = max(self.a, other.a), min(self.b, other.b)
        c, d = max(self.c, other.c), min(self.d, other.d)
        if a > b or c > d:
            return None
        return Rectangle(a, b, c, d)

    @property
    def corners(self):
        return np.array(
            [complex(self.a, self.c), complex(self.b, self.c),
             complex(self.b, self.d), complex(self.a, self.d)]
        )

    def quadrature(self, nodes):
        """Gauss-Legendre nodes and weights on each edge, counterclockwise.

        Returns ``(z, w)`` with ``sum(w * f(z))`` approximating the contour
        integral of ``f``.  The node budget is split in proportion to the
        edge lengths.
        """
        corners = self.corners
        ends = np.roll(corners, -1)
        lengths = np.abs(ends - corners)
        perimeter = lengths.sum()
        if perimeter == 0.0:
            raise PreconditionError("degenerate contour", "rectangle has zero perimeter")
        counts = np.maximum(1, np.floor(nodes * lengths / perimeter)).astype(int)
        counts[lengths == 0] = 0
        counts[np.argmax(lengths)] += max(0, nodes - counts.sum())
        zs, ws = [], []
        for z0, z1, m in zip(corners, ends, counts):
            if m == 0:
                continue
            t, wt = np.polynomial.legendre.leggauss(int(m))
            half = (z1 - z0) / 2
            zs.append(z0 + half * (t + 1))
            ws.append(half * wt)
        return np.concatenate(zs), np.concatenate(ws)


@dataclass(frozen=True)
class Circle:
    """Closed disk ``|z - center| <= radius``; its boundary as a contour."""

    center: complex
    radius: float

    def __post_init__(self):
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise PreconditionError("invalid circle", f"radius {self.radius!r}")

    def contains(self, z, tol=0.0):
        return bool(abs(z - self.center) <= self.radius + tol)

    def boundary_distance(self, z):
        return float(abs(abs(z - self.center) - self.radius))

    def quadrature(self, nodes):
        """Trapezoid rule at equally spaced angles (counterclockwise)."""
        theta = 2 * np.pi * np.arange(nodes) / nodes
        e = np.exp(1j * theta)
        return self.center + self.radius * e, 2j * np.pi * self.radius * e / nodes


class Region:
    """Finite union of closed rectangles and disks.  ``Region(())`` is empty."""

    def __init__(self, parts=()):
        self.parts = tuple(parts)

    def __repr__(self):
        return f"Region({list(self.parts)!r})"

    def __eq__(self, other):
        return isinstance(other, Region) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    @property
    def is_empty(self):
        return not self.parts

    def contains(self, z, tol=0.0):
        return any(p.contains(z, tol) for p in self.parts)

    def status(self, z, tol):
        """Classify ``z`` as inside, within ``tol`` of the boundary, or outside."""
        if not self.contains(z, tol):
            return OUTSIDE
        for p in self.parts:
            if p.contains(z) and p.boundary_distance(z) > tol:
                return INSIDE
        return BOUNDARY

    def intersection(self, other):
        other = as_region(other)
        parts = []
        for p in self.parts:
            for q in other.parts:
                if not (isinstance(p, Rectangle) and isinstance(q, Rectangle)):
                    raise PreconditionError(
                        "unsupported region", "intersections are defined for rectangles only"
                    )
                r = p.intersection(q)
                if r is not None:
                    parts.append(r)
        return Region(parts)

    def union(self, other):
        return Region(self.parts + as_region(other).parts)


def as_region(obj):
    if isinstance(obj, Region):
        return obj
    if isinstance(obj, (Rectangle, Circle)):
        return Region((obj,))
    if obj is None:
        return Region(())
    parts = []
    for o in obj:
        parts.extend(as_region(o).parts)
    return Region(parts)
