"""Approximate inverses behind one ``apply(r)`` interface.

Circulant (Strang, Chan) and tau preconditioners are diagonalised by the
FFT and the orthonormal DST-I respectively.  Multigrid preconditioners run a
single cycle from a zero guess, which keeps them fixed linear maps.
"""
from __future__ import annotations

import logging
import math

import numpy as np
import scipy.fft as sfft

from .kernel import symbol_g_s
from .multigrid import build_hierarchy, cycle
from .toeplitz import BandedRiesz, Riesz2DOperator, RieszMatrix1D, SymmToeplitz

log = logging.getLogger(__name__)


class IndefinitePreconditionerError(ValueError):
    pass


def _check_positive(eigs, what):
    if np.any(~np.isfinite(eigs)) or np.any(eigs <= 0):
        raise IndefinitePreconditionerError(
            f"{what} preconditioner has a nonpositive eigenvalue (min {np.min(eigs):.3e})"
        )


class CirculantPrec:
    """Symmetric (multilevel) circulant with real eigenvalues on a grid."""

    def __init__(self, eigenvalues, flavor: str):
        eigs = np.asarray(eigenvalues, dtype=float)
        _check_positive(eigs, flavor)
        self.eigenvalues = eigs
        self.flavor = flavor
        self.shape = eigs.shape
        self.size = eigs.size

    def apply(self, r):
        r = np.asarray(r, dtype=float)
        if r.size != self.size:
            raise ValueError("residual length does not match the preconditioner")
        spec = sfft.fftn(r.reshape(self.shape)) / self.eigenvalues
        return np.real(sfft.ifftn(spec)).ravel()

    def matvec(self, v):
        """Multiply by the circulant itself (not its inverse)."""
        spec = sfft.fftn(np.asarray(v, dtype=float).reshape(self.shape)) * self.eigenvalues
        return np.real(sfft.ifftn(spec)).ravel()


def strang_column(first_col) -> np.ndarray:
    """Strang's rule: keep a_0..a_{floor(M/2)} and wrap the rest.

    For even M the entry at M/2 is shared by both halves; with a symmetric
    Toeplitz source that is just a_{M/2}.
    """
    a = np.asarray(first_col, dtype=float)
    m = a.size
    j = np.arange(m)
    return np.where(j <= m // 2, a[j], a[(m - j) % m])


def chan_column(first_col) -> np.ndarray:
    """Frobenius-optimal circulant: c_j = ((M - j) a_j + j a_{M-j}) / M."""
    a = np.asarray(first_col, dtype=float)
    m = a.size
    j = np.arange(m)
    return ((m - j) * a + j * a[(m - j) % m]) / m


def circulant_eigs(col) -> np.ndarray:
    return np.real(sfft.fft(col))


def build_strang(T: SymmToeplitz) -> CirculantPrec:
    if T.size < 3:
        raise ValueError("Strang preconditioner needs M >= 3")
    return CirculantPrec(circulant_eigs(strang_column(T.first_col)), "strang")


def build_chan(T: SymmToeplitz) -> CirculantPrec:
    if T.size < 3:
        raise ValueError("Chan preconditioner needs M >= 3")
    return CirculantPrec(circulant_eigs(chan_column(T.first_col)), "chan")


def _mean_weights(op: Riesz2DOperator):
    return op.cbar_x * float(np.mean(op.C)), op.cbar_y * float(np.mean(op.E))


def build_strang_2d(op: Riesz2DOperator) -> CirculantPrec:
    """Two-level Strang circulant with the diffusion coefficients frozen at their means."""
    wx, wy = _mean_weights(op)
    lx = circulant_eigs(strang_column(op.Gx.first_col))
    ly = circulant_eigs(strang_column(op.Gy.first_col))
    return CirculantPrec(wx * lx[None, :] + wy * ly[:, None], "strang2d")


def tau_eigs(first_col) -> np.ndarray:
    """Eigenvalues of tau(T) = T - H at x_j = j pi / (M + 1), j = 1..M.

    lambda_j = a_0 + 2 sum_k a_k cos(k x_j), evaluated with one DCT-I.
    """
    a = np.asarray(first_col, dtype=float)
    m = a.size
    x = np.zeros(m + 2)
    x[:m] = a
    return sfft.dct(x, type=1)[1 : m + 1]


def dst(v, axis=-1):
    """Orthonormal sine transform S (symmetric and involutory)."""
    return sfft.dst(v, type=1, norm="ortho", axis=axis)


def tau_hankel(first_col) -> np.ndarray:
    """The Hankel correction H with tau(T) = T - H (dense, for checks)."""
    a = np.asarray(first_col, dtype=float)
    m = a.size
    seq = np.zeros(2 * m - 1)
    head = a[2:]
    seq[: m - 2] = head
    seq[m + 1:] = head[::-1]
    i, j = np.indices((m, m))
    return seq[i + j]


class TauPrec:
    """Preconditioner D S Lambda S with S the (multi-dimensional) sine transform.

    ``eigenvalues`` has the grid shape; ``scaling`` is an optional diagonal
    applied on the left (the averaged diffusion in the pointwise variant).
    """

    def __init__(self, eigenvalues, scaling=None, flavor="tau"):
        eigs = np.asarray(eigenvalues, dtype=float)
        _check_positive(eigs, "tau")
        self.eigenvalues = eigs
        self.shape = eigs.shape
        self.size = eigs.size
        self.scaling = None if scaling is None else np.asarray(scaling, dtype=float).reshape(self.shape)
        self.flavor = flavor

    def _s(self, u):
        for ax in range(u.ndim):
            u = dst(u, axis=ax)
        return u

    def apply(self, r):
        r = np.asarray(r, dtype=float)
        if r.size != self.size:
            raise ValueError("residual length does not match the preconditioner")
        u = r.reshape(self.shape)
        if self.scaling is not None:
            u = u / self.scaling
        return self._s(self._s(u) / self.eigenvalues).ravel()

    def matvec(self, v):
        u = self._s(self._s(np.asarray(v, dtype=float).reshape(self.shape)) * self.eigenvalues)
        if self.scaling is not None:
            u = u * self.scaling
        return u.ravel()


def build_tau(T: SymmToeplitz) -> TauPrec:
    if T.size < 3:
        raise ValueError("tau preconditioner needs M >= 3")
    return TauPrec(tau_eigs(T.first_col))


def build_tau_2d(op: Riesz2DOperator, averaging: str = "pointwise") -> TauPrec:
    """tau preconditioner for the 2D operator.

    The default ``'pointwise'`` factors out the diagonal diag((c + e) / 2)
    and inverts the constant-coefficient tau matrix in the sine basis.
    ``averaging='mean'`` instead freezes c and e at their grid means.
    Both coincide when c = e = 1.
    """
    lx = tau_eigs(op.Gx.first_col)
    ly = tau_eigs(op.Gy.first_col)
    if averaging == "mean":
        wx, wy = _mean_weights(op)
        return TauPrec(wx * lx[None, :] + wy * ly[:, None])
    if averaging == "pointwise":
        lam = op.cbar_x * lx[None, :] + op.cbar_y * ly[:, None]
        return TauPrec(lam, scaling=0.5 * (op.C + op.E), flavor="tau-pointwise")
    raise ValueError(f"unknown averaging {averaging!r}")


class MgPrec:
    """One multigrid cycle from a zero initial guess."""

    def __init__(self, hierarchy, flavor: str = "galerkin"):
        self.hierarchy = hierarchy
        self.flavor = flavor
        self.size = hierarchy.sizes[0]

    def apply(self, r):
        r = np.asarray(r, dtype=float)
        if r.size != self.size:
            raise ValueError("residual length does not match the preconditioner")
        return cycle(self.hierarchy, 0, np.zeros(self.size), r)


def build_mg_prec(A, coarsening="galerkin", **kw) -> MgPrec:
    kw.setdefault("cycle", "v")
    hier = build_hierarchy(A, coarsening=coarsening, **kw)
    return MgPrec(hier, coarsening)


class BandedMgPrec(MgPrec):
    def __init__(self, banded, hierarchy, s):
        super().__init__(hierarchy, "banded")
        self.banded = banded
        self.s = s


def default_bandwidth(m: int) -> int:
    """Bandwidth used for M + 1 = 2^t: the odd number in {t, t + 1}."""
    t = int(round(math.log2(m + 1)))
    return 2 * (t // 2) + 1


def _warn_if_negative(alpha, s):
    x = np.linspace(0, np.pi, 1025)
    gmin = float(np.min(symbol_g_s(alpha, s, x)))
    if gmin < -1e-12:
        log.warning("g_s(alpha=%s, s=%d) dips to %.3e; V-cycle optimality not guaranteed", alpha, s, gmin)
    return gmin


def build_banded_mg(alpha, M, s=None, d=1.0, domain=(0.0, 1.0), **kw) -> BandedMgPrec:
    """Galerkin V(1,1) on the bandwidth-s truncation of A_M^alpha."""
    s = default_bandwidth(M) if s is None else int(s)
    _warn_if_negative(alpha, s)
    B = BandedRiesz(alpha, M, s, domain, d)
    kw.setdefault("cycle", "v")
    return BandedMgPrec(B, build_hierarchy(B, coarsening="galerkin", **kw), s)


def build_banded_mg_2d(op: Riesz2DOperator, s=None, **kw) -> BandedMgPrec:
    s = default_bandwidth(op.M1) if s is None else int(s)
    _warn_if_negative(op.alpha, s)
    _warn_if_negative(op.beta, s)
    B = op.banded(s)
    kw.setdefault("cycle", "v")
    return BandedMgPrec(B, build_hierarchy(B, coarsening="galerkin", **kw), s)


def apply(prec, r):
    """Apply any preconditioner (``None`` is the identity)."""
    if prec is None:
        return np.array(r, dtype=float, copy=True)
    return prec.apply(r)
