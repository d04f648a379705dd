"""Command line front end.

Exit codes: 0 success, 1 validation failure, 2 parse failure, 3 solver
failure.
"""
import argparse
import io
import sys
import warnings

import numpy as np

from .errors import (
    Degenerate,
    DualtriError,
    LoopObstruction,
    ParseError,
    SolverError,
    ValidationError,
)
from .fixtures import FIXTURES, generate_fixture
from .geometry import compute_geometry, total_volume_check
from .laplace import (
    assemble_laplacian,
    check_semidefiniteness,
    entropy_lambda,
    heat_evolve,
    solve_poisson,
)
from .meshfile import format_float, read_mesh, write_mesh
from .metric import (
    as_duality,
    as_weighted,
    check_compatibility,
    loop_residuals,
    weighted_to_thurston,
)
from .regularity import regularize

EXIT_OK, EXIT_VALIDATION, EXIT_PARSE, EXIT_SOLVER = 0, 1, 2, 3


def _tol(args, default):
    return default if args.tolerance is None else args.tolerance


def cmd_validate(args, out):
    cx, metric, f = read_mesh(args.mesh)
    out.write("valid %s mesh\n" % metric.kind)
    out.write("dimension %d\n" % cx.n)
    out.write("simplices %s\n" % " ".join(str(cx.count(k)) for k in range(cx.n + 1)))
    out.write("euler_characteristic %d\n" % cx.euler_characteristic())
    out.write("closed %s\n" % ("yes" if cx.is_closed else "no"))
    if metric.kind == "duality":
        comp = check_compatibility(metric, _tol(args, 1e-10))
        out.write("compatibility_worst %s\n" % format_float(comp.worst))
        _, res, _ = loop_residuals(metric)
        worst = max(res.values(), key=abs) if res else 0.0
        out.write("loop_residual_worst %s\n" % format_float(abs(worst)))
    return EXIT_OK


def cmd_convert(args, out):
    cx, metric, f = read_mesh(args.mesh)
    if args.to == "duality":
        new = as_duality(metric)
    else:
        new = as_weighted(metric, args.base_vertex, args.w0, _tol(args, 1e-10))
        if args.to == "thurston":
            new = weighted_to_thurston(new)
    out.write(write_mesh(cx, new, f))
    return EXIT_OK


def cmd_dualize(args, out):
    cx, metric, _ = read_mesh(args.mesh)
    geo = compute_geometry(metric)
    out.write("# k id simplex_volume dual_volume center_weight\n")
    for k in range(cx.n + 1):
        for sid in range(cx.count(k)):
            cw = "nan" if geo.center_weights is None else format_float(geo.center_weights[k][sid])
            out.write(
                "%d %d %s %s %s\n"
                % (k, sid, format_float(geo.volumes[k][sid]), format_float(geo.dual_volumes[k][sid]), cw)
            )
    rep = total_volume_check(geo)
    out.write("# total_volume %s\n" % format_float(rep.simplex_total))
    out.write("# total_vertex_dual_volume %s\n" % format_float(rep.dual_total))
    out.write("# volume_identity %s%s\n" % ("pass" if rep.passed else "fail", "" if rep.closed else " (boundary)"))
    out.write("# perpendicularity_residual %s\n" % format_float(geo.perp_residual))
    out.write("# frame_mismatch %s\n" % format_float(geo.frame_mismatch()))
    return EXIT_OK


def cmd_regularize(args, out):
    cx, metric, f = read_mesh(args.mesh)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = regularize(
            metric,
            f=f,
            seed=args.seed,
            tol=_tol(args, 1e-12),
            max_flips=args.max_flips,
            energy_log=args.energy_log,
        )
    for w in caught:
        print("warning: %s" % w.message, file=sys.stderr)
    out.write(write_mesh(res.metric.complex, res.metric, f))
    print(
        "flips %d stalled %d edge_positive %s" % (len(res.flips), len(res.stalled), res.edge_positive),
        file=sys.stderr,
    )
    return EXIT_OK


def _load_vector(path, n, what):
    data = np.loadtxt(path, ndmin=1, dtype=float)
    if data.shape != (n,):
        raise ValidationError("%s file needs %d values, found %d" % (what, n, data.size), invariant=what)
    return data


def cmd_laplace(args, out):
    cx, metric, f = read_mesh(args.mesh)
    system = assemble_laplacian(compute_geometry(metric))
    nv = cx.num_vertices
    if args.action == "assemble":
        L = system.L.tocoo()
        entries = sorted(zip(L.row, L.col, L.data))
        for i, j, x in entries:
            out.write("%d %d %s\n" % (i, j, format_float(x)))
    elif args.action == "poisson":
        rhs = _load_vector(args.rhs, nv, "rhs") if args.rhs else f
        if rhs is None:
            raise ValidationError("poisson needs --rhs or an f block in the mesh", invariant="rhs")
        u = solve_poisson(system, rhs)
        for v in range(nv):
            out.write("%d %s\n" % (cx.vertex_label(v), format_float(u[v])))
    elif args.action == "heat":
        u0 = _load_vector(args.u0, nv, "u0") if args.u0 else f
        if u0 is None:
            raise ValidationError("heat needs --u0 or an f block in the mesh", invariant="u0")
        traj = heat_evolve(system, u0, args.t_end, args.dt, args.method)
        out.write("t," + ",".join(str(cx.vertex_label(v)) for v in range(nv)) + "\n")
        for t, row in zip(traj.times, traj.values):
            out.write(format_float(t) + "," + ",".join(format_float(x) for x in row) + "\n")
    elif args.action == "spectrum":
        rep = check_semidefiniteness(system, tol=_tol(args, 1e-9))
        for x in rep.eigenvalues:
            out.write(format_float(x) + "\n")
        print(
            "semidefinite %s null_dim %d hypotheses %s"
            % ("pass" if rep.passed else "fail", rep.null_dim, ",".join(rep.hypotheses) or "none"),
            file=sys.stderr,
        )
    elif args.action == "entropy":
        out.write(format_float(entropy_lambda(system)) + "\n")
    return EXIT_OK


def _parse_param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("parameters look like name=value")
    for conv in (int, float):
        try:
            return key, conv(value)
        except ValueError:
            pass
    if value.lower() in ("true", "false"):
        return key, value.lower() == "true"
    return key, value


def cmd_gen(args, out):
    doc = generate_fixture(args.fixture, dict(args.param), args.seed)
    out.write(doc.text())
    return EXIT_OK


def _global_options(default):
    opts = argparse.ArgumentParser(add_help=False)
    opts.add_argument(
        "--tolerance",
        type=float,
        default=default,
        help="numerical tolerance (each command has its own default)",
    )
    opts.add_argument("--output", "-o", default=default, help="write the main output here instead of stdout")
    return opts


def build_parser():
    # accepted before or after the subcommand; the subcommand copy must not
    # overwrite a value given before it
    common = _global_options(argparse.SUPPRESS)
    p = argparse.ArgumentParser(
        prog="dualtri", description="Duality structures on triangulations.", parents=[_global_options(None)]
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a mesh document")
    s.add_argument("mesh")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("convert", parents=[common], help="convert the metric structure")
    s.add_argument("mesh")
    s.add_argument("--to", required=True, choices=["weighted", "thurston", "duality"])
    s.add_argument("--base-vertex", type=int, help="vertex label whose weight is fixed")
    s.add_argument("--w0", type=float, default=0.0, help="weight of the base vertex")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("dualize", parents=[common], help="report simplex and dual volumes")
    s.add_argument("mesh")
    s.set_defaults(func=cmd_dualize)

    s = sub.add_parser("regularize", parents=[common], help="flip to a regular triangulation (surfaces)")
    s.add_argument("mesh")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-flips", type=int)
    s.add_argument("--energy-log", help="CSV path for the energy log")
    s.set_defaults(func=cmd_regularize)

    s = sub.add_parser("laplace", parents=[common], help="Laplacian tools")
    s.add_argument("action", choices=["assemble", "poisson", "heat", "spectrum", "entropy"])
    s.add_argument("mesh")
    s.add_argument("--rhs", help="file with one value per vertex (poisson)")
    s.add_argument("--u0", help="file with one value per vertex (heat)")
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--dt", type=float)
    s.add_argument("--method", choices=["midpoint", "euler"], default="midpoint")
    s.set_defaults(func=cmd_laplace)

    s = sub.add_parser("gen", parents=[common], help="write a fixture mesh")
    s.add_argument("fixture", choices=sorted(FIXTURES))
    s.add_argument("--param", "-p", action="append", type=_parse_param, default=[], metavar="NAME=VALUE")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, LoopObstruction, Degenerate) as exc:
        inv = getattr(exc, "invariant", None)
        print("validation error%s: %s" % (" [%s]" % inv if inv else "", exc), file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print("solver error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    except (DualtriError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
