"""Tikhonov deblurring with a fractional-Laplacian penalty.

The normal system (B^T B + mu A) u = B^T m is solved by PCG.  B is a
zero-boundary convolution (BTTB) applied by FFT with zero padding, A is the
2D Riesz operator with alpha = beta on the unit square.  The structured
preconditioners approximate the whole coefficient matrix in one algebra:
tau(B)^2 + mu tau(A) in the sine basis, or the Strang analogue in the
Fourier basis.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.fft as sfft
from scipy import ndimage

from .krylov import KrylovConfig, cg_solve
from .preconditioners import CirculantPrec, TauPrec, circulant_eigs, strang_column, tau_eigs
from .toeplitz import Riesz2DOperator

log = logging.getLogger(__name__)

DEFAULT_MUS = (1e-3, 1e-4, 1e-5, 1e-6)
SAMPLE_IMAGE = "satellite128.pgm"


def gaussian_psf(std: float = 2.0, size: int = 9) -> np.ndarray:
    """Centred, unit-sum Gaussian kernel on an odd size x size support."""
    if size < 1 or size % 2 == 0:
        raise ValueError("psf size must be a positive odd integer")
    if std <= 0:
        raise ValueError("psf std must be positive")
    r = np.arange(size) - size // 2
    g = np.exp(-(r ** 2) / (2.0 * std ** 2))
    k = np.outer(g, g)
    return k / k.sum()


def delta_psf() -> np.ndarray:
    return np.ones((1, 1))


class BlurOperator:
    """Zero-boundary 2D convolution with a centred, odd-sized kernel."""

    def __init__(self, psf, n: int):
        psf = np.asarray(psf, dtype=float)
        if psf.ndim != 2 or psf.shape[0] % 2 == 0 or psf.shape[1] % 2 == 0:
            raise ValueError("psf must be a 2D array with odd dimensions")
        self.psf = psf / psf.sum()
        self.n = int(n)
        self.shape = (self.n * self.n, self.n * self.n)
        self._c = (psf.shape[0] // 2, psf.shape[1] // 2)
        self._pad = (self.n + psf.shape[0] - 1, self.n + psf.shape[1] - 1)
        self._fwd = sfft.rfft2(self.psf, self._pad)
        self._adj = sfft.rfft2(self.psf[::-1, ::-1], self._pad)
        self.symmetric = bool(np.allclose(self.psf, self.psf[::-1, ::-1], atol=1e-15, rtol=0))

    def _conv(self, v, spec):
        n, (ci, cj) = self.n, self._c
        full = sfft.irfft2(sfft.rfft2(np.asarray(v, dtype=float).reshape(n, n), self._pad) * spec, self._pad)
        return full[ci:ci + n, cj:cj + n].ravel()

    def matvec(self, v):
        return self._conv(v, self._fwd)

    def rmatvec(self, v):
        return self._conv(v, self._adj)

    def __matmul__(self, v):
        return self.matvec(v)

    def _check_sym(self):
        if not (np.allclose(self.psf, self.psf[::-1, :]) and np.allclose(self.psf, self.psf[:, ::-1])):
            raise ValueError("structured preconditioners need a psf symmetric in each axis")

    def tau_eigs(self) -> np.ndarray:
        """Eigenvalues of tau(B) on the sine grid, shape (n, n)."""
        self._check_sym()
        n, (ci, cj) = self.n, self._c
        quad = self.psf[ci:, cj:][: n, : n]
        x = np.zeros((n + 2, n + 2))
        x[: quad.shape[0], : quad.shape[1]] = quad
        lam = sfft.dct(sfft.dct(x, type=1, axis=0), type=1, axis=1)
        return lam[1: n + 1, 1: n + 1]

    def strang_eigs(self) -> np.ndarray:
        """Eigenvalues of the two-level Strang circulant of B, shape (n, n)."""
        self._check_sym()
        n, (ci, cj) = self.n, self._c
        w = np.zeros((n, n))
        for i in range(self.psf.shape[0]):
            for j in range(self.psf.shape[1]):
                di, dj = i - ci, j - cj
                if abs(di) <= n // 2 and abs(dj) <= n // 2:
                    w[di % n, dj % n] += self.psf[i, j]
        return np.real(sfft.fft2(w))


def degrade(true_image, psf, noise_level: float = 0.05, seed: int = 0) -> np.ndarray:
    """Blur and add white Gaussian noise with ||eta|| = noise_level ||B u||."""
    if not 0.0 <= noise_level < 1.0:
        raise ValueError("noise_level must lie in [0, 1)")
    u = np.asarray(true_image, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square image")
    B = BlurOperator(psf, u.shape[0])
    bu = B.matvec(u.ravel())
    if noise_level == 0.0:
        return bu.reshape(u.shape)
    eta = np.random.default_rng(seed).standard_normal(bu.size)
    eta *= noise_level * np.linalg.norm(bu) / np.linalg.norm(eta)
    return (bu + eta).reshape(u.shape)


class _NormalOperator:
    def __init__(self, system):
        self.s = system
        self.shape = system.B.shape

    def matvec(self, v):
        return self.s.B.rmatvec(self.s.B.matvec(v)) + self.s.mu * self.s.A.matvec(v)

    def __matmul__(self, v):
        return self.matvec(v)


@dataclass
class TikhonovSystem:
    B: BlurOperator
    A: Riesz2DOperator
    mu: float
    observed: np.ndarray

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.A.alpha != self.A.beta:
            raise ValueError("the penalty must be isotropic (alpha == beta)")
        self.observed = np.asarray(self.observed, dtype=float).ravel()
        if self.observed.size != self.B.shape[0] or self.A.shape != self.B.shape:
            raise ValueError("image, blur and penalty sizes disagree")

    @classmethod
    def build(cls, observed, psf, mu, alpha=1.1):
        observed = np.asarray(observed, dtype=float)
        n = observed.shape[0]
        return cls(BlurOperator(psf, n), Riesz2DOperator(alpha, alpha, n, n), mu, observed)

    @property
    def n(self):
        return self.B.n

    @property
    def operator(self):
        return _NormalOperator(self)

    def rhs(self):
        return self.B.rmatvec(self.observed)

    def preconditioner(self, kind: str):
        A = self.A
        if kind in (None, "none"):
            return None
        if kind == "tau":
            lx = tau_eigs(A.Gx.first_col)
            lam_a = A.cbar_x * lx[None, :] + A.cbar_y * lx[:, None]
            return TauPrec(self.B.tau_eigs() ** 2 + self.mu * lam_a, flavor="tau-tikhonov")
        if kind == "strang":
            lx = circulant_eigs(strang_column(A.Gx.first_col))
            lam_a = A.cbar_x * lx[None, :] + A.cbar_y * lx[:, None]
            return CirculantPrec(self.B.strang_eigs() ** 2 + self.mu * lam_a, "strang-tikhonov")
        raise ValueError(f"unknown preconditioner {kind!r}")


def rre(restored, true_image) -> float:
    t = np.asarray(true_image, dtype=float).ravel()
    return float(np.linalg.norm(np.asarray(restored).ravel() - t) / np.linalg.norm(t))


def tikhonov_solve(system: TikhonovSystem, prec: str | None = "tau", tol: float = 1e-6,
                   maxit: int = 5000, true_image=None):
    """PCG on the normal equations; returns (image, report, RRE or None)."""
    P = system.preconditioner(prec)
    tag = f"tikhonov-{prec or 'none'}"
    u, rep = cg_solve(system.operator, system.rhs(), P, KrylovConfig(tol=tol, maxit=maxit), tag=tag)
    img = u.reshape(system.n, system.n)
    err = None if true_image is None else rre(img, true_image)
    return img, rep, err


# -- images ---------------------------------------------------------------

_PGM_HEADER = re.compile(rb"\AP5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s")


def load_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM into a float array scaled to [0, 1]."""
    data = Path(path).read_bytes()
    m = _PGM_HEADER.match(data)
    if m is None:
        raise ValueError(f"{path}: not a binary (P5) PGM file")
    w, h, maxval = (int(g) for g in m.groups())
    if not 0 < maxval < 256:
        raise ValueError(f"{path}: only 8-bit PGM is supported (maxval={maxval})")
    body = data[m.end(): m.end() + w * h]
    if len(body) != w * h:
        raise ValueError(f"{path}: truncated pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w) / float(maxval)


def save_pgm(image, path) -> None:
    """Write a [0, 1] image as 8-bit P5 PGM (values are clipped)."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("expected a 2D image")
    q = np.rint(np.clip(img, 0.0, 1.0) * 255).astype(np.uint8)
    h, w = q.shape
    Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + q.tobytes())


def synthetic_satellite(n: int = 128, smoothing: float = 2.0) -> np.ndarray:
    """A satellite-like object on a black background, softened by a Gaussian."""
    y, x = np.mgrid[0:n, 0:n] / n
    img = np.zeros((n, n))
    img[(abs(x - 0.5) < 0.09) & (abs(y - 0.5) < 0.14)] = 0.85
    img[(abs(x - 0.5) < 0.05) & (abs(y - 0.5) < 0.10)] = 1.0
    for side in (-1, 1):
        cx = 0.5 + side * 0.27
        panel = (abs(y - 0.5) < 0.06) & (abs(x - cx) < 0.16)
        img[panel] = 0.55
        img[panel & (np.floor((x - cx) * 40) % 2 == 0)] = 0.4
        img[(abs(y - 0.5) < 0.012) & (abs(x - 0.5 - side * 0.1) < 0.03)] = 0.7
    img[(np.hypot(x - 0.5, y - 0.29) < 0.07) & (y < 0.33)] = 0.75
    img[(abs(x - 0.5) < 0.006) & (y > 0.64) & (y < 0.8)] = 0.9
    img[np.hypot(x - 0.5, y - 0.81) < 0.02] = 1.0
    if smoothing > 0:
        img = ndimage.gaussian_filter(img, smoothing)
    return np.clip(img, 0.0, 1.0)


def sample_image_path():
    return resources.files("rieszmg").joinpath("data").joinpath(SAMPLE_IMAGE)


def load_sample_image() -> np.ndarray:
    with resources.as_file(sample_image_path()) as p:
        return load_pgm(p)
