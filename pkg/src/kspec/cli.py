"""Command-line front end.

Exit codes: 0 on success, 1 when an input violates a hypothesis, 2 on
numerical failure.  Reports are JSON with sorted keys, written to stdout or
atomically to ``--report``.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import NumericalFailure, PreconditionError
from .io import atomic_write, dumps_report, read_gram, read_matrix, write_matrix
from .krein import is_g_normal, spectral_mapping
from .linalg import ToleranceConfig, opnorm, sylvester_residual, sylvester_solve
from .pencil import (
    PencilProblem,
    build_companion,
    hyperbolic_roots,
    operator_root_via_angular,
    pencil_spectrum,
)
from .regions import Rectangle
from .resolvent import estimate_growth_order
from .signtype import Label, classify_spectrum
from .spectralfn import (
    local_spectral_function,
    riesz_projection_quadrature,
    strong_stability,
    verify_lsf_axioms,
)

__all__ = ["main", "main_exit", "build_parser"]


def _config(args):
    return ToleranceConfig(
        rank_rtol=args.tol_rank,
        cluster_rtol=args.tol_cluster,
        residual_rtol=args.tol_residual,
    )


def _seed(args):
    env = os.environ.get("KSPEC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise PreconditionError("invalid seed", f"KSPEC_SEED={env!r}") from exc
    return args.seed


def _header(args, cfg, dim):
    return {"version": __version__, "command": args.command,
            "tolerances": cfg.as_dict(dim), "seed": _seed(args)}


def _points(spec):
    return [
        {
            "eigenvalue": p.eigenvalue,
            "label": p.label.value,
            "algebraic": p.algebraic,
            "geometric": p.kernel_dim,
            "semisimple": p.semisimple,
            "witness": list(p.witness),
        }
        for p in spec.points
    ]


def _load_pair(args, cfg):
    space = read_gram(args.gram, cfg)
    N = read_matrix(args.matrix, "operator")
    if N.shape != space.G.shape:
        raise PreconditionError("dimension mismatch", f"N {N.shape} vs G {space.G.shape}")
    if not space.is_krein:
        raise PreconditionError("gram not invertible", "Gram matrix is singular")
    return N, space


def _isolating_squares(spec, label=Label.POSITIVE):
    """Disjoint squares around each eigenvalue of the given type."""
    lam = spec.structure.eigenvalues
    out = []
    for i in spec.indices(label):
        others = np.delete(lam, i)
        gap = np.min(np.abs(others - lam[i])) if others.size else 1.0
        h = gap / 3 if gap > 0 else 1.0
        z = lam[i]
        out.append(Rectangle(z.real - h, z.real + h, z.imag - h, z.imag + h))
    return out


def cmd_analyze(args, cfg):
    N, space = _load_pair(args, cfg)
    report = _header(args, cfg, space.dim)
    check = is_g_normal(N, space, cfg)
    spec = classify_spectrum(N, space, cfg)
    report["normality"] = {"normal": check.normal, "defect": check.defect}
    report["spectrum"] = _points(spec)
    if not check.normal:
        report["stability"] = {"stable": False, "violated": "not normal"}
        return report
    stab = strong_stability(N, space, cfg)
    report["stability"] = {
        "stable": stab.stable,
        "violated": stab.violated,
        "conditions": stab.conditions,
        "J": stab.J,
        "min_eig_GJ": stab.min_eig_GJ,
        "hilbert_product_defect": stab.hilbert_product_defect,
    }
    mapping = spectral_mapping(N, space, cfg)
    report["spectral_mapping"] = {
        "hypothesis": mapping.hypothesis,
        "re_distance": mapping.re_distance,
        "im_distance": mapping.im_distance,
    }
    family = _isolating_squares(spec)
    if not mapping.hypothesis:
        report["axioms"] = {"checked": False, "reason": "sigma(Re N) or sigma(Im N) not real"}
    elif not family:
        report["axioms"] = {"checked": False, "reason": "no eigenvalue of positive type"}
    else:
        ax = verify_lsf_axioms(N, space, family, cfg, seed=_seed(args))
        report["axioms"] = {"checked": True, "passed": ax.passed, "hilbert": ax.hilbert,
                            "defects": ax.defects}
    return report


def cmd_spectral_function(args, cfg):
    N, space = _load_pair(args, cfg)
    rect = Rectangle(*args.rect)
    report = _header(args, cfg, space.dim)
    proj = local_spectral_function(N, space, rect, cfg)
    ax = verify_lsf_axioms(N, space, [rect], cfg, seed=_seed(args))
    diag = {k: v for k, v in proj.diagnostics.items()}
    report.update(
        rectangle=[rect.a, rect.b, rect.c, rect.d],
        rank=proj.rank,
        eigenvalues=list(proj.eigenvalues),
        diagnostics=diag,
        axioms={"passed": ax.passed, "hilbert": ax.hilbert, "defects": ax.defects},
    )
    if args.quad_nodes and proj.eigenvalues:
        try:
            quad = riesz_projection_quadrature(N, rect, args.quad_nodes, cfg)
            report["quadrature_difference"] = opnorm(quad.E - proj.E)
        except PreconditionError as exc:
            report["quadrature_difference"] = None
            report["quadrature_skipped"] = exc.condition
    if args.out:
        write_matrix(args.out, proj.E, "operator")
    return report


def cmd_pencil_root(args, cfg):
    A = read_matrix(args.A, "coefficient")
    C = read_matrix(args.C, "coefficient")
    problem = PencilProblem.from_coefficients(A, C, cfg)
    report = _header(args, cfg, problem.dim)
    comp = build_companion(problem, cfg)
    report["companion"] = {"normality_defect": comp.normality_defect,
                           "adjoint_defect": comp.adjoint_defect}
    report["spectrum"] = list(pencil_spectrum(problem, cfg))
    roots = {}
    if args.method in ("angular", "both"):
        roots["angular"] = operator_root_via_angular(problem, cfg)
    if args.method in ("hyperbolic", "both"):
        roots["hyperbolic"] = hyperbolic_roots(problem, cfg)[0]
    report["roots"] = {
        name: {
            "residual": r.residual,
            "scale": r.scale,
            "passed": r.passed,
            "sum_defect": r.factorization.sum_defect,
            "product_defect": r.factorization.product_defect,
        }
        for name, r in roots.items()
    }
    if len(roots) == 2:
        report["agreement"] = opnorm(roots["angular"].Z1 - roots["hyperbolic"].Z1)
    if args.out_dir:
        for name, r in roots.items():
            write_matrix(os.path.join(args.out_dir, f"Z1_{name}.json"), r.Z1, "operator")
    return report


def cmd_resolvent_order(args, cfg):
    T = read_matrix(args.matrix, "operator")
    rep = estimate_growth_order(T, cfg)
    out = _header(args, cfg, T.shape[0])
    out.update(order=rep.order, empirical_order=rep.empirical_order, slopes=list(rep.slopes),
               M=rep.M, argmax=rep.argmax, strip=rep.strip,
               spectral_radius=rep.spectral_radius, norm=rep.norm)
    return out


def cmd_sylvester(args, cfg):
    S = read_matrix(args.S, "operator")
    T = read_matrix(args.T, "operator")
    Z = read_matrix(args.Z)
    X = sylvester_solve(S, T, Z, cfg)
    out = _header(args, cfg, S.shape[0])
    out.update(residual=sylvester_residual(S, T, Z, X), norm=opnorm(X))
    if args.out:
        write_matrix(args.out, X)
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "spectral-function": cmd_spectral_function,
    "pencil-root": cmd_pencil_root,
    "resolvent-order": cmd_resolvent_order,
    "sylvester": cmd_sylvester,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None, help="relative rank cutoff")
    common.add_argument("--tol-cluster", type=float, default=1e-8, help="eigenvalue grouping")
    common.add_argument("--tol-residual", type=float, default=1e-9, help="residual threshold")
    common.add_argument("--quad-nodes", type=int, default=256, help="contour quadrature nodes")
    common.add_argument("--seed", type=int, default=0, help="seed (KSPEC_SEED overrides)")
    common.add_argument("--report", help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(prog="kspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="normality, sign types, stability")
    p.add_argument("matrix")
    p.add_argument("gram")

    p = sub.add_parser("spectral-function", parents=[common], help="E(Q) for a rectangle")
    p.add_argument("matrix")
    p.add_argument("gram")
    p.add_argument("--rect", type=float, nargs=4, required=True, metavar=("A", "B", "C", "D"))
    p.add_argument("--out", help="projection matrix file")

    p = sub.add_parser("pencil-root", parents=[common], help="operator roots of the pencil")
    p.add_argument("A")
    p.add_argument("C")
    p.add_argument("--method", choices=("angular", "hyperbolic", "both"), default="both")
    p.add_argument("--out-dir", help="directory for Z1_<method>.json")

    p = sub.add_parser("resolvent-order", parents=[common], help="resolvent growth order")
    p.add_argument("matrix")

    p = sub.add_parser("sylvester", parents=[common], help="solve S X - X T = Z")
    p.add_argument("S")
    p.add_argument("T")
    p.add_argument("Z")
    p.add_argument("--out", help="solution matrix file")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        report = COMMANDS[args.command](args, cfg)
        text = dumps_report(report)
        if args.report:
            atomic_write(args.report, text)
        else:
            sys.stdout.write(text)
        return 0
    except PreconditionError as exc:
        print(f"kspec: precondition violated [{exc.condition}]: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"kspec: numerical failure: {exc}", file=sys.stderr)
        return 2


def main_exit():
    sys.exit(main())
