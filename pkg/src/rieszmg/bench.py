"""Benchmark runners behind the ``riesz-mg`` command.

Every runner returns a :class:`BenchTable`: a header plus rows in a fixed,
deterministic order (parameters outer, methods inner).
"""
from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reference, symbols
from .deblur import (DEFAULT_MUS, TikhonovSystem, degrade, gaussian_psf, load_pgm,
                     load_sample_image, save_pgm, tikhonov_solve)
from .krylov import KrylovConfig, cg_solve, gmres_solve
from .multigrid import build_hierarchy, mgm_solve
from .preconditioners import (build_banded_mg, build_banded_mg_2d, build_chan, build_mg_prec,
                              build_strang, build_strang_2d, build_tau, build_tau_2d,
                              default_bandwidth)
from .problems import example1, example2, example3
from .toeplitz import Riesz2DOperator

log = logging.getLogger(__name__)

TABLE1_ALPHAS = (1.2, 1.5, 1.8)
TABLE1_SIZES = (64, 128, 256, 512, 1024)
TABLE2_PAIRS = ((1.1, 1.2), (1.5, 1.5), (1.7, 1.9))
TABLE2_SIZES = (32, 64, 128)
TABLE3_PAIRS = ((1.1, 1.2), (1.5, 1.5), (1.7, 1.9), (1.9, 1.9))
TABLE3_SIZES = (16, 32, 64, 128)
LARGE_2D_SIZES = (256, 512)

TABLE1_METHODS = tuple(c for c in reference.TABLE1_COLUMNS if c != "s")
TABLE2_METHODS = reference.TABLE2_COLUMNS
TABLE3_METHODS = reference.TABLE3_COLUMNS

_MG_NAME = re.compile(r"^(gal|geo)-(TGM|V|W)\((\d+),(\d+)\)$")
_PREC_NAMES = ("PsV(1,1)", "PV(1,1)", "PtV(1,1)", "PC", "PS", "Ptau")


class UnknownMethodError(ValueError):
    pass


@dataclass
class BenchSpec:
    table: str
    sizes: tuple = ()
    alphas: tuple = ()
    methods: tuple | None = None
    output: str | None = None
    format: str = "csv"
    tol: float | None = None
    maxit: int | None = None
    omega: float | None = None
    bandwidth: int | None = None
    coarsest_cap: int = 3
    rhs_mode: str | None = None
    seed: int = 0
    large: bool = False
    timings: bool = True


@dataclass
class BenchTable:
    header: list
    rows: list = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        if "converged" not in self.header:
            return True
        i = self.header.index("converged")
        return all(r[i] in (True, "", None) for r in self.rows)

    def column(self, name):
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def lookup(self, **keys):
        """Return the unique row matching the given column values."""
        idx = {k: self.header.index(k) for k in keys}
        hits = [r for r in self.rows if all(r[i] == keys[k] for k, i in idx.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {keys}")
        return dict(zip(self.header, hits[0]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = ["| " + " | ".join(self.header) + " |",
                 "|" + "|".join("---" for _ in self.header) + "|"]
        lines += ["| " + " | ".join(fmt(v) for v in r) + " |" for r in self.rows]
        return "\n".join(lines) + "\n"

    def render(self, format="csv") -> str:
        if format == "csv":
            return self.to_csv()
        if format == "markdown":
            return self.to_markdown()
        raise ValueError(f"unknown format {format!r}")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def size_exponent(n_plus_1: int) -> int:
    t = int(round(math.log2(n_plus_1)))
    if n_plus_1 < 8 or 2 ** t != n_plus_1:
        raise ValueError(f"size {n_plus_1} must be a power of two >= 8 (it is M + 1)")
    return t


def check_methods(methods, allowed):
    if methods is None:
        return tuple(allowed)
    bad = [m for m in methods if m not in allowed]
    if bad:
        raise UnknownMethodError(f"unknown method(s) {bad}; choose from {list(allowed)}")
    return tuple(m for m in allowed if m in methods)


# -- method runners ------------------------------------------------------

@dataclass
class _Ctx:
    tol: float = 1e-8
    maxit: int | None = None
    omega: float | None = None
    bandwidth: int | None = None
    coarsest_cap: int = 3
    krylov: str = "cg"

    def kcfg(self):
        return KrylovConfig(tol=self.tol, maxit=self.maxit or 2000, method=self.krylov)


def parse_mg_name(name):
    m = _MG_NAME.match(name)
    if m is None:
        return None
    co = "galerkin" if m.group(1) == "gal" else "geometric"
    return co, m.group(2).lower(), int(m.group(3)), int(m.group(4))


def build_prec(name, A, ctx: _Ctx):
    """Construct the named preconditioner for A (1D RieszMatrix1D or 2D operator)."""
    two_d = isinstance(A, Riesz2DOperator)
    kw = dict(omega=ctx.omega, coarsest_cap=ctx.coarsest_cap)
    if name == "PV(1,1)":
        return build_mg_prec(A, "galerkin", **kw)
    if name == "PtV(1,1)":
        return build_mg_prec(A, "geometric", **kw)
    if name == "PsV(1,1)":
        if two_d:
            return build_banded_mg_2d(A, ctx.bandwidth, **kw)
        return build_banded_mg(A.alpha, A.M, ctx.bandwidth, A.d, A.domain, **kw)
    if name == "PS":
        return build_strang_2d(A) if two_d else build_strang(A)
    if name == "PC":
        if two_d:
            raise UnknownMethodError("PC is only defined for 1D problems")
        return build_chan(A)
    if name == "Ptau":
        return build_tau_2d(A) if two_d else build_tau(A)
    raise UnknownMethodError(f"unknown preconditioner {name!r}")


def run_method(name, A, b, ctx: _Ctx):
    """Solve A u = b with the named method; returns (u, SolveReport)."""
    if name in ("CG", "GMRES"):
        solver = cg_solve if name == "CG" else gmres_solve
        return solver(A, b, None, ctx.kcfg(), tag=name)
    mg = parse_mg_name(name)
    if mg is not None:
        co, cyc, nu1, nu2 = mg
        hier = build_hierarchy(A, coarsening=co, cycle=cyc, nu_pre=nu1, nu_post=nu2,
                               omega=ctx.omega, coarsest_cap=ctx.coarsest_cap)
        u, rep = mgm_solve(hier, b, ctx.tol, ctx.maxit or 500)
        rep.method_tag = name
        return u, rep
    if name in _PREC_NAMES:
        P = build_prec(name, A, ctx)
        solver = cg_solve if ctx.krylov == "cg" else gmres_solve
        return solver(A, b, P, ctx.kcfg(), tag=name)
    raise UnknownMethodError(f"unknown method {name!r}")


def _ctx(spec: BenchSpec, krylov="cg"):
    return _Ctx(tol=spec.tol or 1e-8, maxit=spec.maxit, omega=spec.omega,
                bandwidth=spec.bandwidth, coarsest_cap=spec.coarsest_cap, krylov=krylov)


_ROW_HEADER = ["alpha", "beta", "size", "method", "iters", "published", "s", "converged"]


def _header(spec):
    return _ROW_HEADER + (["wall_time"] if spec.timings else [])


def _row(spec, alpha, beta, size, name, rep, published, s=None):
    row = [alpha, beta, size, name, rep.iterations, published, s, rep.converged]
    if spec.timings:
        row.append(rep.wall_time)
    return row


def run_table1(spec: BenchSpec) -> BenchTable:
    """1D constant-coefficient sweep (multigrid solvers and PCG)."""
    alphas = spec.alphas or TABLE1_ALPHAS
    sizes = spec.sizes or TABLE1_SIZES
    methods = check_methods(spec.methods, TABLE1_METHODS)
    ctx = _ctx(spec)
    out = BenchTable(_header(spec))
    for a in alphas:
        for size in sizes:
            t = size_exponent(size)
            if t > 12:
                raise ValueError("1D sizes above 2^12 are outside the benchmark range")
            A, b, _ = example1(a, size - 1, spec.rhs_mode or "analytic")
            ref = reference.TABLE1.get((a, t))
            s = ctx.bandwidth or default_bandwidth(size - 1)
            for name in methods:
                _, rep = run_method(name, A, b, ctx)
                published = ref[reference.TABLE1_COLUMNS.index(name)] if ref else None
                out.rows.append(_row(spec, a, None, size, name, rep, published,
                                     s if name == "PsV(1,1)" else None))
    return out


def _run_2d(spec, pairs, sizes, methods, refs, cols, build, krylov):
    ctx = _ctx(spec, krylov)
    out = BenchTable(_header(spec))
    for a, bt in pairs:
        for size in sizes:
            t = size_exponent(size)
            A, b, _ = build(a, bt, size - 1)
            ref = refs.get(((a, bt), t))
            for name in methods:
                _, rep = run_method(name, A, b, ctx)
                published = ref[cols.index(name)] if ref else None
                s = (ctx.bandwidth or default_bandwidth(size - 1)) if name == "PsV(1,1)" else None
                out.rows.append(_row(spec, a, bt, size, name, rep, published, s))
    return out


def _sizes_2d(spec, default):
    sizes = spec.sizes or default + (LARGE_2D_SIZES if spec.large else ())
    for n in sizes:
        if n > 128 and not spec.large:
            raise ValueError(f"2D size {n} needs --large")
    return sizes


def _pairs(spec, default):
    if not spec.alphas:
        return default
    return tuple(p if isinstance(p, tuple) else (p, p) for p in spec.alphas)


def run_table2(spec: BenchSpec) -> BenchTable:
    """2D constant coefficients (Example 2), CG family."""
    methods = check_methods(spec.methods, TABLE2_METHODS)
    build = lambda a, b, m: example2(a, b, m, rhs_mode=spec.rhs_mode or "analytic")  # noqa: E731
    return _run_2d(spec, _pairs(spec, TABLE2_PAIRS), _sizes_2d(spec, TABLE2_SIZES), methods,
                   reference.TABLE2, reference.TABLE2_COLUMNS, build, "cg")


def run_table3(spec: BenchSpec) -> BenchTable:
    """2D variable coefficients (Example 3), GMRES family."""
    methods = check_methods(spec.methods, TABLE3_METHODS)
    return _run_2d(spec, _pairs(spec, TABLE3_PAIRS), _sizes_2d(spec, TABLE3_SIZES), methods,
                   reference.TABLE3, reference.TABLE3_COLUMNS, example3, "gmres")


@dataclass
class DeblurSpec:
    mus: tuple = DEFAULT_MUS
    methods: tuple = ("none", "strang", "tau")
    psf_std: float = 2.0
    psf_size: int = 9
    noise: float = 0.05
    seed: int = 0
    alpha: float = 1.1
    tol: float = 1e-6
    maxit: int = 5000
    image: str | None = None
    save_dir: str | None = None
    timings: bool = True


def run_deblur(spec: DeblurSpec) -> BenchTable:
    true = load_sample_image() if spec.image is None else load_pgm(spec.image)
    psf = gaussian_psf(spec.psf_std, spec.psf_size)
    observed = degrade(true, psf, spec.noise, spec.seed)
    header = ["mu", "method", "iters", "rre", "converged"] + (["wall_time"] if spec.timings else [])
    out = BenchTable(header)
    if spec.save_dir:
        Path(spec.save_dir).mkdir(parents=True, exist_ok=True)
        save_pgm(observed, Path(spec.save_dir) / "observed.pgm")
    for mu in spec.mus:
        system = TikhonovSystem.build(observed, psf, mu, spec.alpha)
        for name in spec.methods:
            img, rep, err = tikhonov_solve(system, name, spec.tol, spec.maxit, true)
            row = [mu, name, rep.iterations, err, rep.converged]
            if spec.timings:
                row.append(rep.wall_time)
            out.rows.append(row)
            if spec.save_dir and name == spec.methods[-1]:
                save_pgm(img, Path(spec.save_dir) / f"restored_mu{mu:.0e}.pgm")
    return out


# -- figure data ----------------------------------------------------------

FIGURE_ALPHAS = (1.2, 1.5, 1.8, 2.0)
FIGURE_BANDS = (1, 2, 3, 5, 7)


def figure_tables(alphas=FIGURE_ALPHAS, bands=FIGURE_BANDS, levels=15, n=257):
    """All figure data sets as {name: BenchTable}."""
    ck = symbols.ck_table(alphas, levels)
    coarse = {}
    rows = []
    for a in alphas:
        h, r = symbols.coarse_symbols_table(a, levels=8, n=n)
        rows.extend((a,) + tuple(row) for row in r)
    coarse = (["alpha"] + h, rows)
    fg_h, fg_r = symbols.f_vs_gs_table(alphas, bands, n)
    delta = (["alpha", "s", "x", "delta_s"], [(a, s, x, d) for a, s, x, _, _, d in fg_r])
    kap = symbols.kappa_table(alphas, bands, n)
    mono = symbols.g_monotone_table(tuple(a for a in alphas if a < 2), kmax=8, n=n)
    tabs = {
        "ck_vs_level": ck,
        "coarse_symbols": coarse,
        "f_vs_gs": (fg_h, fg_r),
        "delta_s": delta,
        "kappa_minus_1": kap,
        "g_monotone": mono,
    }
    return {k: BenchTable(list(h), [list(r) for r in rs]) for k, (h, rs) in tabs.items()}


def run_figures(out_dir, alphas=FIGURE_ALPHAS, bands=FIGURE_BANDS, format="csv", plot=False):
    """Write one file per figure data set; optionally render PNGs next to them."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tabs = figure_tables(alphas, bands)
    ext = "csv" if format == "csv" else "md"
    written = []
    for name, tab in tabs.items():
        p = out / f"{name}.{ext}"
        p.write_text(tab.render(format))
        written.append(p)
    if plot:
        from .plotting import render_figures
        written += render_figures(tabs, out)
    return written
