"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage or parameter error, 3 I/O error.
"""
import argparse
import json
import logging
import os
import sys

from . import continuous as C
from . import discrete as D
from . import icnet
from . import lowdim
from . import mesh
from . import verify as V
from .errors import DomainError, GeometryError, ParameterError, SolverError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("dconfocal")


class UsageError(Exception):
    pass


def _fix_window_argv(argv):
    """Glue '--window -5:-1,...' into '--window=-5:-1,...' (argparse would read it as an option)."""
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--window":
            val = next(it, None)
            if val is None:
                out.append(tok)
            else:
                out.append(f"--window={val}")
        else:
            out.append(tok)
    return out


def _params(args):
    if not args.alphas:
        raise UsageError("--alphas is required")
    return D.DiscreteParams(tuple(args.alphas))


def _window(args, params):
    if args.window:
        w = D.parse_window(args.window)
    else:
        w = default_window(params)
    if len(w) != params.N:
        raise UsageError(f"--window needs {params.N} axes")
    return w


def default_window(params, extent=7):
    """[-alpha_k, -alpha_{k+1}] per axis, last axis [-alpha_N, -alpha_N + extent]."""
    al = params.alpha
    return [(-al[k], -al[k + 1]) for k in range(params.N - 1)] + [(-al[-1], -al[-1] + extent)]


def _parities(args):
    return (0, 1) if args.both_parities else (0,)


def _write(path, data):
    if path in (None, "-"):
        sys.stdout.write(data if isinstance(data, str) else data.decode())
        if not (data if isinstance(data, str) else data.decode()).endswith("\n"):
            sys.stdout.write("\n")
        return
    mode = "w" if isinstance(data, str) else "wb"
    with open(path, mode) as fh:
        fh.write(data)


def _read(path):
    with open(path) as fh:
        return fh.read()


def _echo(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def _apply_tols(suites, overrides):
    for key, val in overrides.items():
        if key in suites:
            s = suites[key]
            s["tolerance"] = val
            if key == "continuous_epd_order":
                s["pass"] = s["max_residual"] >= val
            else:
                s["pass"] = s["count"] > 0 and s["max_residual"] <= val
    return suites


def _parse_tols(items):
    out = {}
    for item in items or []:
        try:
            k, v = item.split("=")
            out[k] = float(v)
        except ValueError:
            raise UsageError(f"bad --tol {item!r}; expected SUITE=VALUE") from None
    return out


# --- subcommands ---------------------------------------------------------------------


def cmd_generate(args):
    if args.continuous:
        if not args.a:
            raise UsageError("--continuous needs --a")
        cp = C.ContinuousParams(tuple(args.a))
        try:
            counts = [int(v) for v in args.grid.lower().split("x")]
        except ValueError:
            raise UsageError(f"bad --grid {args.grid!r}") from None
        if len(counts) != cp.N:
            raise UsageError(f"--grid needs {cp.N} counts")
        pts = C.sample_grid(cp, counts)
        doc = {"a": list(cp.a), "samples": [{"u": [float(v) for v in u],
                                             "x": [float(v) for v in C.eval_continuous(cp, u)]} for u in pts]}
        _write(args.output, json.dumps(doc, indent=1))
        return EXIT_OK
    params = _params(args)
    pts = D.window_points(params, _window(args, params), _parities(args))
    _write(args.output, D.net_to_json(params, pts))
    log.info("wrote %d points", len(pts))
    return EXIT_OK


def _net_and_points(args):
    if args.net:
        net = D.net_from_json(_read(args.net))
        return net, net.points(), None
    params = _params(args)
    w = _window(args, params)
    return D.DiscreteNet(params), D.window_points(params, w, _parities(args)), w


def cmd_verify(args):
    net, points, window = _net_and_points(args)
    groups = set(args.suites)
    if "all" in groups:
        groups = {"net", "specfun", "continuous", "umbilic", "mesh", "continuum", "icnet"}
    suites = {}
    if "net" in groups:
        suites.update(V.verify_net(net, points))
        suites["koenigs_nu_relations"] = V.nu_relations_suite(net.params.N)
    if "specfun" in groups:
        suites.update(V.specfun_suites())
    if "continuous" in groups:
        suites.update(V.continuous_suites(net.params.identified_a))
    if net.params.N == 3 and "umbilic" in groups:
        a, b, g = net.params.alpha
        suites.update(V.umbilic_suites(lowdim.Params3D(a, b, g)))
    if net.params.N == 3 and "mesh" in groups and net.values is None:
        suites.update(V.mesh_suites(net.params, window))
    if "continuum" in groups:
        suites["continuum_trend"] = V.continuum_suite()
    if "icnet" in groups:
        suites.update(V.icnet_suites())
    _apply_tols(suites, _parse_tols(args.tol))
    report = {"suites": suites, "config_echo": _echo(args)}
    _write(args.report, json.dumps(report, indent=1, sort_keys=True))
    failed = [k for k, s in suites.items() if not s["pass"]]
    if failed:
        print("FAILED: " + ", ".join(sorted(failed)), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _parse_layer(spec, N):
    try:
        d, lvl = spec.split("=")
        d = int(d) - 1
        lvl = float(lvl)
    except ValueError:
        raise UsageError(f"bad --layer {spec!r}; expected DIR=LEVEL (1-based direction)") from None
    if not 0 <= d < N:
        raise UsageError(f"layer direction out of range 1..{N}")
    return d, lvl


def cmd_export(args):
    params = _params(args)
    os.makedirs(args.outdir, exist_ok=True)
    written = []
    if args.focal_curves:
        if params.N != 3:
            raise UsageError("focal curves need N = 3")
        P = lowdim.Params3D(*params.alpha)
        n3_max = D.parse_window(args.window)[2][1] if args.window else -P.gamma_lat + 9
        _, hyp = lowdim.umbilic_curve_ellipsoid(P, n3_max)
        _, ell = lowdim.umbilic_curve_hyperboloid(P)
        for kind, pts in (("focal_hyperbola", hyp), ("focal_ellipse", ell)):
            path = os.path.join(args.outdir, f"{args.prefix}{kind}.json")
            _write(path, lowdim.polyline_json(kind, pts))
            written.append(path)
    if args.layer:
        window = _window(args, params)
        fixed, level = _parse_layer(args.layer, params.N)
        free = [w for k, w in enumerate(window) if k != fixed]
        meshes = (mesh.surface_with_dual_layers(params, fixed, level, free) if args.dual_layers
                  else [mesh.surface_mesh(params, fixed, level, free)])
        for m in meshes:
            if args.reflect:
                m = mesh.reflect_mesh(m)
            tag = f"n{fixed + 1}_{m.layer['level']:g}".replace("-", "m").replace(".", "p")
            path = os.path.join(args.outdir, f"{args.prefix}{tag}.{args.format}")
            _write(path, mesh.export_mesh(m, args.format))
            written.append(path)
    if not written:
        raise UsageError("nothing to export: give --layer and/or --focal-curves")
    for p in written:
        print(p)
    return EXIT_OK


def cmd_icnet(args):
    if args.builtin:
        if args.builtin not in icnet.BUILTINS:
            raise UsageError(f"unknown builtin {args.builtin!r}")
        grid = icnet.BUILTINS[args.builtin](args.size)
    elif args.solve or args.verify_file:
        grid = icnet.LineGrid.from_json(_read(args.solve or args.verify_file))
    else:
        raise UsageError("give --builtin, --solve FILE or --verify-file FILE")
    out = {"config_echo": _echo(args)}
    if args.solve:
        try:
            res = icnet.icnet_solve(grid, iterations=args.iterations, tol=args.tol)
        except SolverError as exc:
            out["solver"] = {"converged": False, "residual": exc.residual, "error": str(exc)}
            _write(args.report, json.dumps(out, indent=1, sort_keys=True))
            return EXIT_FAIL
        grid = res.grid
        out["solver"] = {"converged": True, "iterations": res.iterations, "residual": res.residual}
        if args.output:
            _write(args.output, grid.to_json())
    rep = icnet.icnet_report(grid, tol=args.theorem_tol)
    out["report"] = rep
    _write(args.report, json.dumps(out, indent=1, sort_keys=True))
    ok = rep["ok"] and rep.get("vi_factorization", {"pass": True})["pass"]
    return EXIT_OK if ok else EXIT_FAIL


# --- parser ------------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="dconfocal", description="Discrete confocal quadrics toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def spectrum(p):
        p.add_argument("--alphas", type=int, nargs="+", help="integer spectrum alpha_1 > ... > alpha_N")
        p.add_argument("--window", help="lo:hi per axis, comma separated (lattice units)")
        p.add_argument("--both-parities", action="store_true", help="include the half-integer lattice")

    g = sub.add_parser("generate", help="tabulate a net")
    spectrum(g)
    g.add_argument("--continuous", action="store_true")
    g.add_argument("--a", type=float, nargs="+")
    g.add_argument("--grid", default="16x16")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="run identity suites")
    spectrum(v)
    v.add_argument("--net", help="tabulated net JSON (from generate)")
    v.add_argument("--suites", nargs="+", default=["net", "umbilic", "mesh"],
                   choices=["net", "specfun", "continuous", "umbilic", "mesh", "continuum", "icnet", "all"])
    v.add_argument("--tol", action="append", metavar="SUITE=VALUE", help="override a suite tolerance")
    v.add_argument("--report", default="-")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="export meshes and focal curves")
    spectrum(e)
    e.add_argument("--layer", help="DIR=LEVEL, e.g. 3=2 for n_3 = 2 (1-based)")
    e.add_argument("--dual-layers", action="store_true")
    e.add_argument("--reflect", action="store_true")
    e.add_argument("--focal-curves", action="store_true")
    e.add_argument("--format", choices=["obj", "json"], default="obj")
    e.add_argument("--outdir", default=".")
    e.add_argument("--prefix", default="")
    e.set_defaults(func=cmd_export)

    c = sub.add_parser("icnet", help="verify or solve IC-nets")
    c.add_argument("--builtin")
    c.add_argument("--size", type=int, default=8)
    c.add_argument("--solve", metavar="FILE")
    c.add_argument("--verify-file", "--verify", dest="verify_file", nargs="?", const=None, metavar="FILE")
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--theorem-tol", type=float, default=icnet.THEOREM_TOL)
    c.add_argument("--iterations", type=int, default=30)
    c.add_argument("-o", "--output")
    c.add_argument("--report", default="-")
    c.set_defaults(func=cmd_icnet)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(_fix_window_argv(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
