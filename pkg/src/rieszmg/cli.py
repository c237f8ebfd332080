"""``riesz-mg`` command line: tables, deblurring, figure data and single solves."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .bench import BenchSpec, BenchTable, DeblurSpec, UnknownMethodError

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p, sizes_help):
    p.add_argument("--alpha", type=float, nargs="+", help="fractional order(s) in (1, 2]")
    p.add_argument("--beta", type=float, nargs="+", help="y-direction order(s) for 2D runs")
    p.add_argument("--size", type=int, nargs="+", help=sizes_help)
    p.add_argument("--method", nargs="+", help="restrict to these method columns")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--maxit", type=int, default=None)
    p.add_argument("--omega", type=float, default=None, help="Jacobi weight (default: per-order optimum)")
    p.add_argument("--bandwidth", type=int, default=None, help="s for the banded preconditioner")
    p.add_argument("--coarsest", type=int, default=3, help="stop coarsening at this many points per axis")
    p.add_argument("--rhs", choices=("discrete", "analytic"), default=None)
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timings", action="store_true", help="omit wall-time columns (byte-stable output)")


def build_parser():
    ap = _Parser(prog="riesz-mg", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table1", help="1D constant-coefficient sweep")
    _common(p, "M + 1 values (powers of two, 64..1024)")
    p = sub.add_parser("table2", help="2D constant coefficients, CG")
    _common(p, "M1 + 1 values (default 32 64 128)")
    p.add_argument("--large", action="store_true", help="also run 256 and 512")
    p = sub.add_parser("table3", help="2D variable coefficients, GMRES")
    _common(p, "M1 + 1 values (default 16..128)")
    p.add_argument("--large", action="store_true", help="also run 256 and 512")

    p = sub.add_parser("deblur", help="Tikhonov deblurring sweep over mu")
    p.add_argument("--mu", type=float, nargs="+", default=list(bench.DEFAULT_MUS))
    p.add_argument("--prec", nargs="+", choices=("none", "strang", "tau"), default=["none", "strang", "tau"])
    p.add_argument("--psf-std", type=float, default=2.0)
    p.add_argument("--psf-size", type=int, default=9)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.1)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--maxit", type=int, default=5000)
    p.add_argument("--image", default=None, help="8-bit PGM (default: bundled 128x128 sample)")
    p.add_argument("--save-images", default=None, metavar="DIR")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--no-timings", action="store_true")

    p = sub.add_parser("figures", help="symbol data behind the figures")
    p.add_argument("--alpha", type=float, nargs="+", default=list(bench.FIGURE_ALPHAS))
    p.add_argument("--bandwidth", type=int, nargs="+", default=list(bench.FIGURE_BANDS))
    p.add_argument("--out", default="figures", help="output directory")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--plot", action="store_true", help="also render PNGs (needs matplotlib)")

    p = sub.add_parser("solve", help="one solve on a benchmark problem")
    p.add_argument("--problem", choices=("example1", "example2", "example3"), default="example1")
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--size", type=int, default=128, help="M + 1 (per axis)")
    p.add_argument("--method", default="mgm",
                   help="mgm (uses --coarsening/--cycle/--nu-*), CG, GMRES, PV(1,1), PtV(1,1), "
                        "PsV(1,1), PC, PS, Ptau, or a name like gal-V(1,1)")
    p.add_argument("--krylov", choices=("cg", "gmres"), default=None)
    p.add_argument("--coarsening", choices=("galerkin", "geometric"), default="galerkin")
    p.add_argument("--cycle", choices=("tgm", "v", "w"), default="v")
    p.add_argument("--nu-pre", type=int, default=1)
    p.add_argument("--nu-post", type=int, default=1)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--bandwidth", type=int, default=None)
    p.add_argument("--coarsest", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--maxit", type=int, default=None)
    p.add_argument("--rhs", choices=("discrete", "analytic"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    return ap


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _pairs(args):
    if not args.alpha:
        if args.beta:
            raise UsageError("--beta needs --alpha")
        return ()
    betas = args.beta or args.alpha
    if len(betas) != len(args.alpha):
        raise UsageError("--alpha and --beta need the same number of values")
    return tuple(zip(args.alpha, betas))


def _table_spec(args, name):
    return BenchSpec(
        table=name, sizes=tuple(args.size or ()),
        alphas=tuple(args.alpha or ()) if name == "table1" else _pairs(args),
        methods=tuple(args.method) if args.method else None, output=args.out, format=args.format,
        tol=args.tol, maxit=args.maxit, omega=args.omega, bandwidth=args.bandwidth,
        coarsest_cap=args.coarsest, rhs_mode=args.rhs, seed=args.seed,
        large=getattr(args, "large", False), timings=not args.no_timings)


def _solve(args):
    from .problems import example1, example2, example3, relative_error
    m = args.size - 1
    bench.size_exponent(args.size)
    beta = args.beta if args.beta is not None else args.alpha
    if args.problem == "example1":
        A, b, u_ex = example1(args.alpha, m, args.rhs or "analytic")
    elif args.problem == "example2":
        A, b, u_ex = example2(args.alpha, beta, m, rhs_mode=args.rhs or "analytic")
    else:
        if args.rhs == "analytic":
            raise UsageError("example3 only supports --rhs discrete")
        A, b, u_ex = example3(args.alpha, beta, m)
    krylov = args.krylov or ("gmres" if args.problem == "example3" else "cg")
    ctx = bench._Ctx(tol=args.tol, maxit=args.maxit, omega=args.omega, bandwidth=args.bandwidth,
                     coarsest_cap=args.coarsest, krylov=krylov)
    name = args.method
    if name == "mgm":
        name = "{}-{}({},{})".format("gal" if args.coarsening == "galerkin" else "geo",
                                     args.cycle.upper(),
                                     args.nu_pre, args.nu_post)
    if name.lower() in ("cg", "gmres"):
        name = name.upper()
    u, rep = bench.run_method(name, A, b, ctx)
    tab = BenchTable(["problem", "alpha", "beta", "size", "method", "iters", "relres",
                      "rel_error", "converged", "wall_time"])
    tab.rows.append([args.problem, args.alpha, beta if args.problem != "example1" else None,
                     args.size, name, rep.iterations, rep.final_relres,
                     relative_error(u, u_ex), rep.converged, rep.wall_time])
    return tab


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("table1", "table2", "table3"):
            spec = _table_spec(args, args.command)
            tab = getattr(bench, f"run_{args.command}")(spec)
        elif args.command == "deblur":
            spec = DeblurSpec(mus=tuple(args.mu), methods=tuple(args.prec), psf_std=args.psf_std,
                              psf_size=args.psf_size, noise=args.noise, seed=args.seed,
                              alpha=args.alpha, tol=args.tol, maxit=args.maxit, image=args.image,
                              save_dir=args.save_images, timings=not args.no_timings)
            tab = bench.run_deblur(spec)
        elif args.command == "figures":
            for p in bench.run_figures(args.out, tuple(args.alpha), tuple(args.bandwidth),
                                       args.format, args.plot):
                print(p)
            return EXIT_OK
        else:
            tab = _solve(args)
    except (UsageError, UnknownMethodError, ValueError) as exc:
        print(f"riesz-mg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(tab.render(args.format), args.out)
    if not tab.all_converged:
        print("riesz-mg: some solves did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
