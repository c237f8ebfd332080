"""Coarse-level symbol recursion and the two-grid convergence diagnostics.

Symbols are kept in normalised form (divided by c(alpha)), so every level
satisfies f_k(pi) = 2^(alpha+1).  Evaluating level k at n points costs
2^k n base evaluations; analysis runs are capped at MAX_LEVELS.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .kernel import c_alpha, symbol_f, symbol_f_normalized, symbol_g_s, validate_order

MAX_LEVELS = 16
FD_STEP = math.pi / 2 ** 14


def _p(x):
    return 1.0 + np.cos(x)


@dataclass
class SymbolLevelChain:
    alpha: float
    levels: int
    grid: np.ndarray
    C2: list[float] = field(default_factory=list)
    samples: list[np.ndarray] = field(default_factory=list)

    @property
    def C(self) -> np.ndarray:
        """C_1 .. C_levels (C[k] scales the projector leaving level k)."""
        return np.sqrt(np.asarray(self.C2))

    def f(self, k: int, x, normalized: bool = True):
        """Evaluate f_k at arbitrary points of [0, pi] by unrolling the recursion."""
        if k < 0 or k > len(self.C2):
            raise IndexError(f"level {k} not available (have 0..{len(self.C2)})")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        vals = _eval_level(self.alpha, self.C2, k, x)
        return vals if normalized else c_alpha(self.alpha) * vals

    def L(self, k: int, x):
        """The recursion for f_k without the C_k^2 factor."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return _eval_level(self.alpha, self.C2, k, x) / self.C2[k - 1]


def _eval_level(alpha, C2, k, x):
    if k == 0:
        return symbol_f_normalized(alpha, x)
    n = x.size
    y = np.concatenate([x / 2.0, np.pi - x / 2.0])
    v = _eval_level(alpha, C2, k - 1, y) * _p(y) ** 2
    return 0.5 * C2[k - 1] * (v[:n] + v[n:])


def coarse_symbol_recursion(alpha: float, levels: int, grid_size: int = 4096) -> SymbolLevelChain:
    """Build f_0..f_levels with C_{k+1}^2 = 2^(alpha+1) / f_k(pi/2).

    Since p(pi/2) = 1 and p(pi) = 0 the two-term L_{k+1}(pi) collapses to
    f_k(pi/2); ``L`` lets callers check the unsimplified form.
    """
    alpha = validate_order(alpha)
    if levels < 1 or levels > MAX_LEVELS:
        raise ValueError(f"levels must be in 1..{MAX_LEVELS}")
    grid = np.linspace(0.0, np.pi, int(grid_size))
    chain = SymbolLevelChain(alpha=alpha, levels=levels, grid=grid)
    top = 2.0 ** (alpha + 1)
    for k in range(levels):
        half = _eval_level(alpha, chain.C2, k, np.array([np.pi / 2]))[0]
        chain.C2.append(top / half)
    sample_upto = min(levels, 10)
    for k in range(sample_upto + 1):
        chain.samples.append(chain.f(k, grid))
    return chain


def projector_constant(alpha: float, k: int, chain: SymbolLevelChain | None = None) -> float:
    """C_{k+1}: positive root of 2^(alpha+1) / f_k(pi/2)."""
    if chain is None or len(chain.C2) <= k:
        chain = coarse_symbol_recursion(alpha, k + 1, grid_size=2)
    return math.sqrt(chain.C2[k])


@dataclass
class TgmDiagnostics:
    gamma_k: np.ndarray
    bound: np.ndarray
    sigma: float
    omega: float
    failed: bool = False


def gamma_k(alpha: float, k: int, chain: SymbolLevelChain) -> tuple[float, float, bool]:
    """Approximation-property quantities at level k.

    Returns ``(gamma, bound, failed)``: gamma is the extrapolated limit of
    p_k(x + pi)^2 / f_{k+1}(x) as x -> 0, bound is max_x g_k(x) = 4 C_{k+1}^2 / 2^(alpha+1)
    (normalised symbols), and failed flags a non-finite extrapolation.
    """
    if k + 1 > len(chain.C2):
        raise IndexError("chain too short for this level")
    C2 = chain.C2[k]
    xs = np.array([1e-2, 1e-3, 1e-4])
    num = C2 * (1.0 - np.cos(xs)) ** 2
    ratios = num / chain.f(k + 1, xs)
    # ratio ~ a + b x^(4 - alpha); eliminate b from the last two samples
    q = (xs[1] / xs[2]) ** (4.0 - chain.alpha)
    gamma = (q * ratios[2] - ratios[1]) / (q - 1.0)
    bound = 4.0 * C2 / 2.0 ** (chain.alpha + 1)
    failed = not (math.isfinite(gamma) and math.isfinite(bound))
    return float(gamma), float(bound), failed


def tgm_diagnostics(alpha: float, levels: int = 10) -> TgmDiagnostics:
    chain = coarse_symbol_recursion(alpha, levels + 1, grid_size=2)
    gam, bnd, bad = zip(*(gamma_k(alpha, k, chain) for k in range(levels)))
    om, sig, _ = smoothing_constants(alpha)
    return TgmDiagnostics(np.array(gam), np.array(bnd), sig, om, any(bad))


@dataclass
class MonotoneReport:
    alpha: float
    k: int
    ok: bool
    violations: list[tuple[str, float, float]]
    g_values: np.ndarray
    bold_g: np.ndarray


def check_g_monotone(alpha: float, k: int, chain: SymbolLevelChain, grid=None,
                     diff_tol: float = 1e-12, bold_tol: float = 1e-10) -> MonotoneReport:
    """Check g_k(x) = p_k(pi - x)^2 / f_k(x) is nondecreasing on (0, pi].

    Also checks 2 sin(x) f_k(x) - (1 - cos x) f_k'(x) >= 0, with f_k' from
    central differences of step pi / 2^14.
    """
    if grid is None:
        grid = chain.grid[1:]
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > np.pi):
        raise ValueError("grid must lie in (0, pi]")
    C2 = chain.C2[k]
    fk = chain.f(k, grid)
    g = C2 * (1.0 - np.cos(grid)) ** 2 / fk
    # one-sided near pi keeps the stencil inside the even, 2pi-periodic domain
    hstep = FD_STEP
    xp = grid + hstep
    xm = grid - hstep
    fp = chain.f(k, np.where(xp > np.pi, 2 * np.pi - xp, xp))
    fm = chain.f(k, np.abs(xm))
    deriv = (fp - fm) / (2 * hstep)
    bold = 2.0 * np.sin(grid) * fk - (1.0 - np.cos(grid)) * deriv
    violations = []
    dg = np.diff(g)
    for i in np.nonzero(dg < -diff_tol)[0]:
        violations.append(("g_decrease", float(grid[i + 1]), float(dg[i])))
    for i in np.nonzero(bold < -bold_tol)[0]:
        violations.append(("bold_g_negative", float(grid[i]), float(bold[i])))
    return MonotoneReport(alpha, k, not violations, violations, g, bold)


def smoothing_constants(alpha: float) -> tuple[float, float, float]:
    """(omega_star, sigma, omega_max) for weighted Jacobi on T(f_alpha)."""
    alpha = validate_order(alpha)
    omega_max = alpha / 2.0 ** (alpha - 1)
    omega_star = 2.0 ** (2 - alpha) * alpha / 3.0
    sigma = 2.0 ** (-alpha) / 9.0
    return omega_star, sigma, omega_max


@dataclass
class WeylReport:
    eigenvalues: np.ndarray
    kappa_samples: np.ndarray
    eig_hist: np.ndarray
    kappa_hist: np.ndarray
    bin_edges: np.ndarray
    discrepancy: float
    inf_kappa: float
    sup_kappa: float


_TEST_FUNCTIONS = (
    lambda t: t,
    lambda t: t ** 2,
    lambda t: np.exp(-t),
    lambda t: 1.0 / (1.0 + t ** 2),
)


def weyl_histogram(f_op, g_prec, bins: int = 20, kappa=None, n_samples: int = 20000) -> WeylReport:
    """Eigenvalues of T(g)^{-1} T(f) against samples of kappa = f / g.

    ``f_op`` and ``g_prec`` are symmetric operators (at most 512 unknowns);
    ``kappa`` is a callable on [0, pi].  Without it the eigenvalues are
    compared with themselves, which only makes sense for tests.
    The discrepancy is max over a fixed family F of
    |mean F(lambda_j) - mean F(kappa(t))|.
    """
    from .toeplitz import materialize_dense

    F = materialize_dense(f_op)
    G = materialize_dense(g_prec)
    if F.shape[0] > 512:
        raise ValueError("weyl_histogram is limited to 512 unknowns")
    try:
        lam = sla.eigh(F, G, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError("preconditioner is not symmetric positive definite") from exc
    t = (np.arange(n_samples) + 0.5) * np.pi / n_samples
    ks = kappa(t) if kappa is not None else np.ones_like(t)
    lo = min(lam.min(), ks.min())
    hi = max(lam.max(), ks.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    eh, _ = np.histogram(lam, edges, density=False)
    kh, _ = np.histogram(ks, edges, density=False)
    disc = max(abs(np.mean(Fn(lam)) - np.mean(Fn(ks))) for Fn in _TEST_FUNCTIONS)
    return WeylReport(lam, ks, eh / lam.size, kh / ks.size, edges, float(disc),
                      float(ks.min()), float(ks.max()))


# CSV emitters ---------------------------------------------------------------


def _write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def ck_table(alphas, levels: int = 15):
    rows = []
    for a in alphas:
        chain = coarse_symbol_recursion(a, levels, grid_size=2)
        for k, c in enumerate(chain.C, start=1):
            rows.append((a, k, c))
    return ["alpha", "level", "C_k"], rows


def coarse_symbols_table(alpha: float, levels: int = 8, n: int = 257):
    chain = coarse_symbol_recursion(alpha, levels, grid_size=n)
    header = ["x"] + [f"f{k}" for k in range(levels + 1)]
    cols = [chain.grid] + [chain.f(k, chain.grid) for k in range(levels + 1)]
    return header, list(zip(*cols))


def g_monotone_table(alphas, kmax: int = 8, n: int = 257):
    rows = []
    for a in alphas:
        chain = coarse_symbol_recursion(a, kmax + 1, grid_size=n)
        x = chain.grid[1:]
        for k in range(kmax + 1):
            rep = check_g_monotone(a, k, chain, x)
            rows.extend((a, k, xi, gi, bi) for xi, gi, bi in zip(x, rep.g_values, rep.bold_g))
    return ["alpha", "k", "x", "g", "bold_g"], rows


def f_vs_gs_table(alphas, bands=(1, 3, 5), n: int = 257):
    x = np.linspace(0, np.pi, n)
    rows = []
    for a in alphas:
        f = symbol_f(a, x)
        for s in bands:
            gs = symbol_g_s(a, s, x)
            rows.extend((a, s, xi, fi, gi, fi - gi) for xi, fi, gi in zip(x, f, gs))
    return ["alpha", "s", "x", "f", "g_s", "delta_s"], rows


def kappa_table(alphas, bands=(1, 3, 5), n: int = 257):
    x = np.linspace(0, np.pi, n)[1:]
    rows = []
    for a in alphas:
        f = symbol_f(a, x)
        for s in bands:
            k = f / symbol_g_s(a, s, x)
            rows.extend((a, s, xi, ki - 1.0) for xi, ki in zip(x, k))
    return ["alpha", "s", "x", "kappa_minus_1"], rows


def write_ck_csv(path, alphas=(1.2, 1.5, 1.8), levels=15):
    return _write_csv(path, *ck_table(alphas, levels))


def write_coarse_symbols_csv(path, alpha=1.5, levels=8):
    return _write_csv(path, *coarse_symbols_table(alpha, levels))


def write_g_monotone_csv(path, alphas=(1.2, 1.5, 1.8), kmax=8):
    return _write_csv(path, *g_monotone_table(alphas, kmax))


def write_kappa_csv(path, alphas=(1.2, 1.8), bands=(1, 3, 5)):
    return _write_csv(path, *kappa_table(alphas, bands))
