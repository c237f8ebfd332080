"""CG / PCG and full GMRES with a relative-residual stopping rule."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .multigrid import SolveReport

log = logging.getLogger(__name__)


class IndefiniteError(ArithmeticError):
    """Raised when CG meets p^T A p <= 0."""


@dataclass(frozen=True)
class KrylovConfig:
    tol: float = 1e-8
    maxit: int = 2000
    method: str = "cg"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.maxit < 1:
            raise ValueError("maxit must be >= 1")


def _apply(prec, r):
    if prec is None:
        return r.copy()
    if callable(prec) and not hasattr(prec, "apply"):
        return prec(r)
    return prec.apply(r)


def cg_solve(A, rhs, prec=None, cfg: KrylovConfig | None = None, tag: str | None = None,
             callback=None):
    """Preconditioned CG from a zero guess.

    Stops once ||b - A x_k|| / ||b|| < tol, using the recursively updated
    (unpreconditioned) residual.  ``iterations`` counts products with A.
    """
    cfg = cfg or KrylovConfig()
    b = np.asarray(rhs, dtype=float)
    t0 = time.perf_counter()
    x = np.zeros_like(b)
    bnorm = float(np.linalg.norm(b))
    tag = tag or ("pcg" if prec is not None else "cg")
    if bnorm == 0.0:
        return x, SolveReport(0, [0.0], 0.0, 0.0, tag)
    r = b.copy()
    z = _apply(prec, r)
    p = z.copy()
    rz = float(r @ z)
    hist = [1.0]
    for it in range(1, cfg.maxit + 1):
        Ap = A @ p
        pAp = float(p @ Ap)
        if pAp <= 0 or not math.isfinite(pAp):
            raise IndefiniteError(f"p^T A p = {pAp:.3e} at iteration {it}")
        step = rz / pAp
        x += step * p
        r -= step * Ap
        rel = float(np.linalg.norm(r)) / bnorm
        hist.append(rel)
        if callback is not None:
            callback(x)
        if rel < cfg.tol:
            return x, SolveReport(it, hist, rel, time.perf_counter() - t0, tag)
        z = _apply(prec, r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, SolveReport(cfg.maxit, hist, hist[-1], time.perf_counter() - t0, tag, converged=False)


def gmres_solve(A, rhs, prec=None, cfg: KrylovConfig | None = None, tag: str | None = None):
    """Full (unrestarted) left-preconditioned GMRES from a zero guess.

    Arnoldi uses modified Gram-Schmidt and Givens rotations; the stopping
    test is on the preconditioned residual ||M^{-1} r_k|| / ||M^{-1} b||.
    """
    cfg = cfg or KrylovConfig(method="gmres")
    b = np.asarray(rhs, dtype=float)
    t0 = time.perf_counter()
    tag = tag or ("pgmres" if prec is not None else "gmres")
    n = b.size
    z0 = _apply(prec, b)
    beta = float(np.linalg.norm(z0))
    if beta == 0.0:
        return np.zeros(n), SolveReport(0, [0.0], 0.0, 0.0, tag)
    m = min(cfg.maxit, n)
    V = [z0 / beta]
    H = np.zeros((m + 1, m))
    cs = np.zeros(m)
    sn = np.zeros(m)
    g = np.zeros(m + 1)
    g[0] = beta
    hist = [1.0]
    k_done = 0
    converged = False
    for j in range(m):
        w = _apply(prec, A @ V[j])
        for i in range(j + 1):
            H[i, j] = w @ V[i]
            w -= H[i, j] * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        breakdown = H[j + 1, j] <= 1e-14 * beta
        if not breakdown:
            V.append(w / H[j + 1, j])
        for i in range(j):
            tmp = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = tmp
        denom = math.hypot(H[j, j], H[j + 1, j])
        cs[j], sn[j] = H[j, j] / denom, H[j + 1, j] / denom
        H[j, j] = denom
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        rel = abs(g[j + 1]) / beta
        hist.append(rel)
        k_done = j + 1
        if rel < cfg.tol or breakdown:
            converged = True
            break
    y = np.linalg.solve(np.triu(H[:k_done, :k_done]), g[:k_done])
    x = np.asarray(V[:k_done]).T @ y
    true_rel = float(np.linalg.norm(b - A @ x) / np.linalg.norm(b))
    log.debug("gmres exit: preconditioned %.2e, true %.2e", hist[-1], true_rel)
    return x, SolveReport(k_done, hist, hist[-1], time.perf_counter() - t0, tag, converged)
