"""JSON matrix files and deterministic report serialization.

A matrix file looks like::

    {"dim": 2, "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], "role": "gram"}

Complex entries are ``[re, im]`` pairs.  ``dim`` is the size of a square
matrix, or ``[rows, cols]`` for a rectangular one.  :func:`dumps_matrix`
produces the canonical form, so ``dumps_matrix(loads_matrix(text)) == text``
for canonical text.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .krein import KreinSpace
from .linalg import DEFAULT_TOLERANCES

__all__ = [
    "MatrixFile",
    "loads_matrix",
    "dumps_matrix",
    "read_matrix",
    "write_matrix",
    "read_gram",
    "canonical",
    "dumps_report",
    "atomic_write",
]

ROLES = ("operator", "gram", "coefficient")
SQUARE_ROLES = ROLES


@dataclass(frozen=True)
class MatrixFile:
    matrix: np.ndarray
    role: str | None = None


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        raise PreconditionError("unparseable matrix file", f"non-finite entry {x!r}")
    return 0.0 if x == 0.0 else x


def loads_matrix(text, role=None):
    """Parse a matrix file; ``role`` (if given) must match the file's tag."""
    try:
        obj = json.loads(text)
        rows = obj["entries"]
        M = np.array([[complex(_num(re), _num(im)) for re, im in row] for row in rows],
                     dtype=complex)
    except PreconditionError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise PreconditionError("unparseable matrix file", str(exc)) from exc
    if len({len(r) for r in rows}) > 1 or M.ndim != 2:
        raise PreconditionError("unparseable matrix file", "entries are not rectangular")
    tag = obj.get("role")
    if tag is not None and tag not in ROLES:
        raise PreconditionError("unparseable matrix file", f"unknown role {tag!r}")
    if role is not None and tag is not None and tag != role:
        raise PreconditionError("unparseable matrix file", f"expected role {role!r}, got {tag!r}")
    dim = obj.get("dim")
    shape = list(M.shape)
    if dim is not None and dim != shape[0] and dim != shape:
        raise PreconditionError("unparseable matrix file", f"dim {dim!r} does not match {shape}")
    if (tag in SQUARE_ROLES or role in SQUARE_ROLES) and M.shape[0] != M.shape[1]:
        raise PreconditionError("not square", f"matrix has shape {tuple(M.shape)}")
    return MatrixFile(matrix=M, role=tag)


def _fmt(x):
    return repr(_num(x))


def dumps_matrix(M, role=None):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    p, q = M.shape
    dim = str(p) if p == q else f"[{p}, {q}]"
    rows = ", ".join(
        "[" + ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in row) + "]" for row in M
    )
    parts = [f'"dim": {dim}', f'"entries": [{rows}]']
    if role is not None:
        parts.append(f'"role": "{role}"')
    return "{" + ", ".join(parts) + "}\n"


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".kspec-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_matrix(path, role=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PreconditionError("unreadable file", f"{path}: {exc.strerror}") from exc
    return loads_matrix(text, role).matrix


def write_matrix(path, M, role=None):
    atomic_write(path, dumps_matrix(M, role))


def read_gram(path, cfg=DEFAULT_TOLERANCES):
    """Load a Gram matrix and check Hermiticity."""
    return KreinSpace.from_gram(read_matrix(path, "gram"), cfg)


def canonical(obj):
    """Convert a report into JSON-ready values with fixed float formatting.

    Floats keep 12 significant digits; complex numbers become ``[re, im]``;
    arrays become nested lists; infinities become the strings ``"inf"`` and
    ``"-inf"``.
    """
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [canonical(obj.real), canonical(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.12g}")
        return 0.0 if x == 0.0 else x
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps_report(report):
    return json.dumps(canonical(report), sort_keys=True, indent=2) + "\n"
