"""Two-grid, V- and W-cycle multigrid for the 1D and 2D Riesz systems.

Galerkin coarsening forms P A P^T with P = K T(C (1 + cos x)) (K keeps the
odd 0-based fine points).  Geometric coarsening rediscretises the operator
on the coarse grid and uses linear interpolation with full weighting,
i.e. the same stencil scaled by 1/sqrt(2) per direction.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .kernel import validate_order
from .symbols import coarse_symbol_recursion, smoothing_constants
from .toeplitz import (
    Riesz2DOperator,
    RieszMatrix1D,
    SymmToeplitz,
    diagonal_of,
    materialize_dense,
)

GEOMETRIC_SCALE = 1.0 / math.sqrt(2.0)


@dataclass
class SolveReport:
    iterations: int
    residual_history: list[float]
    final_relres: float
    wall_time: float
    method_tag: str
    converged: bool = True

    def as_row(self) -> dict:
        return {
            "method": self.method_tag,
            "iters": self.iterations,
            "relres": self.final_relres,
            "converged": self.converged,
            "wall_time": self.wall_time,
        }


def _restrict_axis(u, c, axis):
    u = np.moveaxis(u, axis, -1)
    out = c * (0.5 * u[..., 0:-2:2] + u[..., 1:-1:2] + 0.5 * u[..., 2::2])
    return np.moveaxis(out, -1, axis)


def _prolong_axis(v, c, axis, n_fine):
    v = np.moveaxis(v, axis, -1)
    out = np.zeros(v.shape[:-1] + (n_fine,))
    cv = c * v
    out[..., 1::2] += cv
    out[..., 0:-1:2] += 0.5 * cv
    out[..., 2::2] += 0.5 * cv
    return np.moveaxis(out, -1, axis)


def _transfer_1d(n_fine: int, c: float) -> sp.csr_matrix:
    n_coarse = (n_fine - 1) // 2
    rows = np.repeat(np.arange(n_coarse), 3)
    cols = (2 * np.arange(n_coarse)[:, None] + np.arange(3)).ravel()
    vals = np.tile(c * np.array([0.5, 1.0, 0.5]), n_coarse)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n_coarse, n_fine))


@dataclass(frozen=True)
class GridTransfer:
    """Restriction P = K T(C (1 + cos x)) along each axis; prolongation is P^T.

    ``fine_shape`` is (M,) in 1D and (M2, M1) in 2D (row-major, x fastest);
    ``scales`` holds one constant per axis in the same order.
    """

    fine_shape: tuple[int, ...]
    scales: tuple[float, ...]

    @property
    def coarse_shape(self) -> tuple[int, ...]:
        return tuple((n - 1) // 2 for n in self.fine_shape)

    @property
    def fine_size(self) -> int:
        return int(np.prod(self.fine_shape))

    @property
    def coarse_size(self) -> int:
        return int(np.prod(self.coarse_shape))

    @property
    def scale(self) -> float:
        return float(np.prod(self.scales))

    def restrict(self, v: np.ndarray) -> np.ndarray:
        u = np.asarray(v, dtype=float).reshape(self.fine_shape)
        for axis, c in enumerate(self.scales):
            u = _restrict_axis(u, c, axis)
        return u.ravel()

    def prolong(self, v: np.ndarray) -> np.ndarray:
        u = np.asarray(v, dtype=float).reshape(self.coarse_shape)
        for axis, (c, n) in enumerate(zip(self.scales, self.fine_shape)):
            u = _prolong_axis(u, c, axis, n)
        return u.ravel()

    def matrix(self) -> sp.csr_matrix:
        mats = [_transfer_1d(n, c) for n, c in zip(self.fine_shape, self.scales)]
        out = mats[0]
        for m in mats[1:]:
            out = sp.kron(out, m, format="csr")
        return out


@dataclass
class Level:
    A: object
    diag: np.ndarray
    shape: tuple[int, ...]
    transfer: GridTransfer | None = None


@dataclass
class MultigridHierarchy:
    levels: list[Level]
    omega: float
    nu_pre: int
    nu_post: int
    coarsening: str
    cycle: str
    coarsest_cap: int
    coarse_lu: tuple = field(repr=False, default=None)

    @property
    def sizes(self) -> list[int]:
        return [int(np.prod(lv.shape)) for lv in self.levels]

    @property
    def gamma(self) -> int:
        return 2 if self.cycle == "w" else 1

    def tag(self) -> str:
        kind = {"tgm": "TGM", "v": "V", "w": "W"}[self.cycle]
        return f"{self.coarsening}-{kind}({self.nu_pre},{self.nu_post})"


def _grid_shape(A) -> tuple[int, ...]:
    if isinstance(A, Riesz2DOperator):
        return (A.M2, A.M1)
    return (A.shape[0],)


def _is_compatible(n: int) -> bool:
    return n >= 1 and (n + 1) & n == 0


def jacobi_weight_2d(alpha: float, beta: float) -> float:
    """4/5 * 2 F_0 / max F for F = f_alpha/c(alpha) + f_beta/c(beta)."""
    f0 = 2 * alpha + 2 * beta
    fmax = 2.0 ** (alpha + 1) + 2.0 ** (beta + 1)
    return 0.8 * 2.0 * f0 / fmax


def default_omega(A) -> float:
    if isinstance(A, Riesz2DOperator):
        return jacobi_weight_2d(A.alpha, A.beta)
    return smoothing_constants(A.alpha)[0]


def _galerkin_product(P: sp.csr_matrix, A):
    if sp.issparse(A):
        return (P @ A @ P.T).tocsr()
    PA = P @ A
    return np.ascontiguousarray((P @ PA.T).T)


def build_hierarchy(A, alpha: float | None = None, beta: float | None = None,
                    coarsening: str = "galerkin", omega: float | None = None,
                    nu_pre: int = 1, nu_post: int = 1, cycle: str = "v",
                    coarsest_cap: int = 3) -> MultigridHierarchy:
    """Build the level matrices and transfers for ``A``.

    ``A`` is a RieszMatrix1D (possibly banded), a Riesz2DOperator, or a
    dense/sparse matrix (Galerkin only; ``alpha`` then fixes the projector
    constants).  ``cycle='tgm'`` stops after one coarsening.
    """
    coarsening = coarsening.lower()
    cycle = cycle.lower()
    if coarsening not in ("galerkin", "geometric"):
        raise ValueError(f"unknown coarsening {coarsening!r}")
    if cycle not in ("tgm", "v", "w"):
        raise ValueError(f"unknown cycle {cycle!r}")
    if coarsest_cap < 3:
        raise ValueError("coarsest_cap must be at least 3")
    shape = _grid_shape(A)
    if not all(_is_compatible(n) for n in shape):
        raise ValueError(f"grid sizes {shape} are not of the form 2^t - 1")
    two_d = len(shape) == 2
    if alpha is None:
        alpha = getattr(A, "alpha", 2.0)
    if two_d and beta is None:
        beta = A.beta
    alpha = validate_order(alpha)
    if coarsening == "geometric" and not hasattr(A, "rediscretize"):
        raise ValueError("geometric coarsening needs an operator that can rediscretise")
    if omega is None:
        omega = default_omega(A)

    n_steps = 0
    s = shape
    while min(s) > coarsest_cap and (cycle != "tgm" or n_steps < 1):
        s = tuple((n - 1) // 2 for n in s)
        n_steps += 1
    if n_steps == 0:
        raise ValueError("operator is already at or below the coarsest size")

    cx = coarse_symbol_recursion(alpha, n_steps, grid_size=2).C
    cy = coarse_symbol_recursion(validate_order(beta), n_steps, grid_size=2).C if two_d else None

    levels = [Level(A, diagonal_of(A), shape)]
    if coarsening == "galerkin":
        if isinstance(A, Riesz2DOperator):
            work = A.tosparse()
        elif isinstance(A, RieszMatrix1D) and A.bandwidth_s is not None:
            work = A.tosparse()
        elif isinstance(A, SymmToeplitz):
            work = A.todense()
        elif sp.issparse(A):
            work = A.tocsr()
        else:
            work = np.asarray(A, dtype=float)
    cur = A
    for k in range(n_steps):
        fshape = levels[-1].shape
        if coarsening == "galerkin":
            scales = (cy[k], cx[k]) if two_d else (cx[k],)
        else:
            scales = (GEOMETRIC_SCALE,) * len(fshape)
        tr = GridTransfer(fshape, scales)
        levels[-1].transfer = tr
        if coarsening == "galerkin":
            work = _galerkin_product(tr.matrix(), work)
            nxt = work
        else:
            cur = cur.rediscretize(*reversed(tr.coarse_shape)) if two_d else cur.rediscretize(tr.coarse_shape[0])
            nxt = cur
        levels.append(Level(nxt, diagonal_of(nxt), tr.coarse_shape))
    coarse = levels[-1].A
    dense = coarse.toarray() if sp.issparse(coarse) else materialize_dense(coarse)
    lu = sla.lu_factor(dense)
    return MultigridHierarchy(levels, float(omega), int(nu_pre), int(nu_post),
                              coarsening, cycle, int(coarsest_cap), lu)


def jacobi_smooth(A, D_diag, omega, u, rhs, sweeps=1):
    """u <- u + omega D^{-1} (rhs - A u), ``sweeps`` times."""
    D_diag = np.asarray(D_diag, dtype=float)
    if np.any(D_diag == 0):
        raise ZeroDivisionError("Jacobi smoother needs a nonzero diagonal")
    u = np.array(u, dtype=float, copy=True)
    for _ in range(int(sweeps)):
        u += omega * (rhs - A @ u) / D_diag
    return u


def cycle(hier: MultigridHierarchy, level: int, u, rhs):
    """One multigrid cycle at ``level``; returns the updated iterate."""
    if level < 0 or level >= len(hier.levels):
        raise IndexError(f"level {level} outside hierarchy")
    if level == len(hier.levels) - 1:
        return sla.lu_solve(hier.coarse_lu, rhs)
    lv = hier.levels[level]
    u = jacobi_smooth(lv.A, lv.diag, hier.omega, u, rhs, hier.nu_pre)
    r = rhs - lv.A @ u
    rc = lv.transfer.restrict(r)
    ec = np.zeros(lv.transfer.coarse_size)
    for _ in range(hier.gamma):
        ec = cycle(hier, level + 1, ec, rc)
    u = u + lv.transfer.prolong(ec)
    return jacobi_smooth(lv.A, lv.diag, hier.omega, u, rhs, hier.nu_post)


def mgm_solve(hier: MultigridHierarchy, rhs, tol: float = 1e-8, maxit: int = 500):
    """Stationary multigrid from a zero guess until ||r_k|| / ||r_0|| < tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rhs = np.asarray(rhs, dtype=float)
    A = hier.levels[0].A
    t0 = time.perf_counter()
    u = np.zeros_like(rhs)
    r0 = float(np.linalg.norm(rhs))
    hist = [1.0]
    if r0 == 0.0:
        return u, SolveReport(0, hist, 0.0, 0.0, hier.tag())
    it = 0
    while it < maxit:
        u = cycle(hier, 0, u, rhs)
        it += 1
        rel = float(np.linalg.norm(rhs - A @ u)) / r0
        hist.append(rel)
        if rel < tol:
            return u, SolveReport(it, hist, rel, time.perf_counter() - t0, hier.tag())
        if not math.isfinite(rel):
            break
    return u, SolveReport(it, hist, hist[-1], time.perf_counter() - t0, hier.tag(), converged=False)
