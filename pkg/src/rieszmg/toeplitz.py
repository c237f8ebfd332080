"""Structured operators for the discretised Riesz derivative.

All operators expose ``shape``, ``matvec``, ``__matmul__`` and ``diagonal``
so the solvers can treat them, dense arrays and scipy sparse matrices alike.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np
import scipy.fft as sfft
import scipy.linalg as sla
import scipy.sparse as sp

from .kernel import c_alpha, grunwald_coeffs, validate_order

DENSE_LIMIT = 4096


class StructuredOperator:
    """Minimal linear-operator protocol shared by every structured type."""

    shape: tuple[int, int]
    symmetric = False

    def matvec(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __matmul__(self, v):
        v = np.asarray(v)
        if v.ndim == 2:
            return np.column_stack([self.matvec(col) for col in v.T])
        return self.matvec(v)

    def diagonal(self) -> np.ndarray:
        raise NotImplementedError

    def _check(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.shape[1],):
            raise ValueError(f"vector of length {v.shape} does not match operator {self.shape}")
        return v


class IdentityOperator(StructuredOperator):
    symmetric = True

    def __init__(self, n: int):
        self.shape = (n, n)

    def matvec(self, v):
        return self._check(v).copy()

    def diagonal(self):
        return np.ones(self.shape[0])


class SymmToeplitz(StructuredOperator):
    """Symmetric Toeplitz matrix with entries ``first_col[|i - j|]``.

    Products go through a circulant embedding of length
    ``next_pow2(2M - 1)`` and a real FFT.
    """

    symmetric = True

    def __init__(self, first_col):
        col = np.array(first_col, dtype=float)
        if col.ndim != 1 or col.size == 0:
            raise ValueError("first_col must be a non-empty 1-D sequence")
        col.setflags(write=False)
        self.first_col = col
        m = col.size
        self.size = m
        self.shape = (m, m)
        n = 1 << max(1, (2 * m - 1 - 1).bit_length())
        emb = np.zeros(n)
        emb[:m] = col
        emb[n - m + 1:] = col[1:][::-1]
        self._nfft = n
        self._eig = sfft.rfft(emb)

    def matvec(self, v):
        v = self._check(v)
        return sfft.irfft(self._eig * sfft.rfft(v, self._nfft), self._nfft)[: self.size]

    def apply_along(self, arr: np.ndarray, axis: int) -> np.ndarray:
        """Multiply every 1-D fibre of ``arr`` along ``axis``."""
        arr = np.moveaxis(np.asarray(arr, dtype=float), axis, -1)
        if arr.shape[-1] != self.size:
            raise ValueError("axis length does not match the Toeplitz size")
        spec = sfft.rfft(arr, self._nfft, axis=-1) * self._eig
        out = sfft.irfft(spec, self._nfft, axis=-1)[..., : self.size]
        return np.moveaxis(out, -1, axis)

    def diagonal(self):
        return np.full(self.size, self.first_col[0])

    def todense(self) -> np.ndarray:
        return sla.toeplitz(self.first_col)

    def bandwidth(self, tol: float = 0.0) -> int:
        nz = np.nonzero(np.abs(self.first_col) > tol)[0]
        return int(nz[-1]) if nz.size else 0

    def tosparse(self, tol: float = 0.0) -> sp.csr_matrix:
        b = self.bandwidth(tol)
        offsets = list(range(-b, b + 1))
        diags = [np.full(self.size - abs(o), self.first_col[abs(o)]) for o in offsets]
        return sp.diags(diags, offsets, shape=self.shape, format="csr")


def riesz_first_column(alpha: float, m: int, bandwidth: int | None = None) -> np.ndarray:
    """First column of -(G + G^T), i.e. the SPD-signed symmetrised Grunwald matrix.

    Entry 0 is -2 g_1, entry 1 is -(g_0 + g_2), entry j >= 2 is -g_{j+1}.
    With ``bandwidth=s`` only g_0..g_s are kept, so the column is that of
    T(g_s): the last nonzero entry is -g_s at distance s - 1 (distance 1
    for s = 1, where g_2 is dropped).
    """
    tab = grunwald_coeffs(alpha, m + 1)
    g = tab.g.copy()
    if bandwidth is not None:
        if bandwidth < 1:
            raise ValueError("bandwidth s must be >= 1")
        g[bandwidth + 1:] = 0.0
    col = np.empty(m)
    col[0] = -2.0 * g[1]
    if m > 1:
        col[1] = -(g[0] + g[2])
    col[2:] = -g[3 : m + 1]
    return col


class RieszMatrix1D(SymmToeplitz):
    """A_M^alpha for -d D^alpha u = m on [a, b] with homogeneous Dirichlet data.

    Written either as -d c(alpha)/h^alpha (G + G^T) or with the opposite sign
    convention on both factors; either way the matrix is SPD and is stored
    here with diagonal 2 d c(alpha) alpha / h^alpha.
    """

    def __init__(self, alpha, m, domain=(0.0, 1.0), d=1.0, bandwidth=None):
        alpha = validate_order(alpha)
        if m < 3:
            raise ValueError(f"need at least 3 unknowns, got M={m}")
        a, b = map(float, domain)
        self.alpha = alpha
        self.domain = (a, b)
        self.d = float(d)
        self.h = (b - a) / (m + 1)
        self.bandwidth_s = bandwidth
        self.scale = self.d * c_alpha(alpha) / self.h ** alpha
        super().__init__(self.scale * riesz_first_column(alpha, m, bandwidth))

    @property
    def M(self) -> int:
        return self.size

    def grid(self) -> np.ndarray:
        return self.domain[0] + self.h * np.arange(1, self.size + 1)

    def rediscretize(self, m: int) -> "RieszMatrix1D":
        return RieszMatrix1D(self.alpha, m, self.domain, self.d, self.bandwidth_s)


def assemble_riesz_1d(alpha, M, domain=(0.0, 1.0), d=1.0) -> RieszMatrix1D:
    return RieszMatrix1D(alpha, M, domain, d)


class BandedRiesz(RieszMatrix1D):
    """c_bar * T(g_s): the banded approximation whose symbol is g_s."""

    def __init__(self, alpha, m, s, domain=(0.0, 1.0), d=1.0):
        if s < 1:
            raise ValueError("bandwidth s must be >= 1")
        self.s = int(s)
        super().__init__(alpha, m, domain, d, bandwidth=int(s))

    @property
    def half_width(self) -> int:
        """Number of nonzero off-diagonals on each side: max(1, s - 1)."""
        return max(1, self.s - 1)

    def stencil(self) -> np.ndarray:
        """The 2 * half_width + 1 entries of one interior row."""
        half = self.first_col[: self.half_width + 1]
        return np.concatenate([half[:0:-1], half])


def _sample(fn, X, Y):
    if fn is None:
        return np.ones_like(X)
    vals = np.broadcast_to(np.asarray(fn(X, Y), dtype=float), X.shape).copy()
    if np.any(vals < 0):
        raise ValueError("diffusion coefficients must be nonnegative on the grid")
    return vals


class Riesz2DOperator(StructuredOperator):
    """c_bar_a C (I kron Gx) + c_bar_b E (Gy kron I) on an M1 x M2 interior grid.

    Unknowns are ordered x-fastest: index i + M1 * j holds u(x_i, y_j), so a
    vector reshapes to an (M2, M1) array whose rows are x-lines.
    """

    def __init__(self, alpha, beta, m1, m2, domain=((0.0, 1.0), (0.0, 1.0)),
                 coeff_c: Callable | None = None, coeff_e: Callable | None = None,
                 bandwidth: int | None = None):
        self.alpha = validate_order(alpha)
        self.beta = validate_order(beta)
        if m1 < 3 or m2 < 3:
            raise ValueError("need at least 3 unknowns per direction")
        (a1, b1), (a2, b2) = domain
        self.domain = ((float(a1), float(b1)), (float(a2), float(b2)))
        self.M1, self.M2 = int(m1), int(m2)
        self.hx = (b1 - a1) / (m1 + 1)
        self.hy = (b2 - a2) / (m2 + 1)
        self.coeff_c, self.coeff_e = coeff_c, coeff_e
        self.bandwidth_s = bandwidth
        x = a1 + self.hx * np.arange(1, m1 + 1)
        y = a2 + self.hy * np.arange(1, m2 + 1)
        X, Y = np.meshgrid(x, y)  # shape (M2, M1), x fastest
        self.x, self.y = x, y
        self.C = _sample(coeff_c, X, Y)
        self.E = _sample(coeff_e, X, Y)
        self.cbar_x = c_alpha(self.alpha) / self.hx ** self.alpha
        self.cbar_y = c_alpha(self.beta) / self.hy ** self.beta
        self.Gx = SymmToeplitz(riesz_first_column(self.alpha, m1, bandwidth))
        self.Gy = SymmToeplitz(riesz_first_column(self.beta, m2, bandwidth))
        n = self.M1 * self.M2
        self.shape = (n, n)
        self.symmetric = bool(
            np.all(self.C == self.C.flat[0]) and np.all(self.E == self.E.flat[0])
            and self.alpha == self.beta and self.hx == self.hy
            and self.C.flat[0] == self.E.flat[0]
        )

    @property
    def Cdiag(self) -> np.ndarray:
        return self.C.ravel()

    @property
    def Ediag(self) -> np.ndarray:
        return self.E.ravel()

    def matvec(self, v):
        u = self._check(v).reshape(self.M2, self.M1)
        out = self.cbar_x * self.C * self.Gx.apply_along(u, 1)
        out += self.cbar_y * self.E * self.Gy.apply_along(u, 0)
        return out.ravel()

    def diagonal(self):
        return (self.cbar_x * self.Gx.first_col[0] * self.C
                + self.cbar_y * self.Gy.first_col[0] * self.E).ravel()

    def tosparse(self) -> sp.csr_matrix:
        gx = sp.csr_matrix(self.Gx.todense()) if self.bandwidth_s is None else self.Gx.tosparse()
        gy = sp.csr_matrix(self.Gy.todense()) if self.bandwidth_s is None else self.Gy.tosparse()
        kx = sp.kron(sp.identity(self.M2), gx, format="csr")
        ky = sp.kron(gy, sp.identity(self.M1), format="csr")
        return (sp.diags(self.cbar_x * self.Cdiag) @ kx + sp.diags(self.cbar_y * self.Ediag) @ ky).tocsr()

    def rediscretize(self, m1: int, m2: int) -> "Riesz2DOperator":
        return Riesz2DOperator(self.alpha, self.beta, m1, m2, self.domain,
                               self.coeff_c, self.coeff_e, self.bandwidth_s)

    def banded(self, s: int) -> "Riesz2DOperator":
        return Riesz2DOperator(self.alpha, self.beta, self.M1, self.M2, self.domain,
                               self.coeff_c, self.coeff_e, bandwidth=s)


def assemble_riesz_2d(alpha, beta, M1, M2, domain=((0.0, 1.0), (0.0, 1.0)),
                      coeff_c=None, coeff_e=None) -> Riesz2DOperator:
    return Riesz2DOperator(alpha, beta, M1, M2, domain, coeff_c, coeff_e)


def toeplitz_matvec(T: SymmToeplitz, v) -> np.ndarray:
    return T.matvec(v)


def materialize_dense(op) -> np.ndarray:
    """Dense matrix of ``op`` built column by column (testing oracle)."""
    if isinstance(op, np.ndarray):
        return op.copy()
    if sp.issparse(op):
        n = op.shape[0]
        if n > DENSE_LIMIT:
            raise ValueError(f"refusing to materialise {n} unknowns (limit {DENSE_LIMIT})")
        return op.toarray()
    n = op.shape[1]
    if n > DENSE_LIMIT:
        raise ValueError(f"refusing to materialise {n} unknowns (limit {DENSE_LIMIT})")
    if isinstance(op, SymmToeplitz):
        return op.todense()
    eye = np.eye(n)
    return np.column_stack([op @ eye[:, j] for j in range(n)])


def diagonal_of(A) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return np.diag(A).copy()
    return np.asarray(A.diagonal(), dtype=float)


def extremal_eigs(op, which: str = "max", tol: float = 1e-10, maxiter: int = 10000) -> float:
    """Extremal eigenvalue of an SPD operator.

    ``max`` runs Lanczos (scipy ``eigsh``) on the matvec; ``min`` runs
    inverse iteration against an LU factorisation of the dense matrix.
    """
    from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

    n = op.shape[0]
    if which == "max":
        lin = LinearOperator((n, n), matvec=lambda v: op @ np.ravel(v), dtype=float)
        try:
            val = eigsh(lin, k=1, which="LA", tol=tol, maxiter=maxiter,
                        v0=np.ones(n), return_eigenvectors=False)
        except ArpackNoConvergence as exc:
            raise RuntimeError("Lanczos did not converge for lambda_max") from exc
        return float(val[0])
    if which != "min":
        raise ValueError("which must be 'min' or 'max'")
    lu = sla.lu_factor(materialize_dense(op))
    v = np.ones(n) / math.sqrt(n)
    lam = math.inf
    for _ in range(maxiter):
        w = sla.lu_solve(lu, v)
        w /= np.linalg.norm(w)
        new = float(w @ (op @ w))
        if abs(new - lam) <= tol * abs(new):
            return new
        lam, v = new, w
    raise RuntimeError("inverse iteration did not converge for lambda_min")
