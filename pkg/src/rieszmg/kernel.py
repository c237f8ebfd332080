"""Grunwald coefficients and the generating functions of the Riesz operator.

Every symbol here is a plain function of ``x`` that accepts scalars or numpy
arrays.  ``symbol_f`` and ``symbol_g_s`` include the factor ``c(alpha)``;
the ``*_normalized`` variants drop it, which is the form used by the coarse
symbol recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def validate_order(alpha: float) -> float:
    """Return ``alpha`` as a float, rejecting anything outside (1, 2]."""
    alpha = float(alpha)
    if not (1.0 < alpha <= 2.0) or math.isnan(alpha):
        raise ValueError(f"fractional order must lie in (1, 2], got {alpha}")
    return alpha


def c_alpha(alpha: float) -> float:
    """Riesz normalisation constant -1 / (2 cos(alpha pi / 2))."""
    alpha = validate_order(alpha)
    return -1.0 / (2.0 * math.cos(alpha * math.pi / 2.0))


@dataclass(frozen=True)
class GrunwaldTable:
    alpha: float
    g: np.ndarray
    c_alpha: float

    def __len__(self) -> int:
        return self.g.size

    def __getitem__(self, k):
        return self.g[k]


def grunwald_coeffs(alpha: float, n: int) -> GrunwaldTable:
    """Coefficients g_0..g_n of the shifted Grunwald formula.

    Uses g_k = g_{k-1} (k - 1 - alpha) / k, which equals the signed
    binomial product but never forms a factorial.
    """
    alpha = validate_order(alpha)
    n = int(n)
    if n < 1:
        raise ValueError(f"need at least two coefficients (n >= 1), got n={n}")
    k = np.arange(1, n + 1, dtype=float)
    g = np.empty(n + 1)
    g[0] = 1.0
    g[1:] = np.cumprod((k - 1.0 - alpha) / k)
    g.setflags(write=False)
    return GrunwaldTable(alpha=alpha, g=g, c_alpha=c_alpha(alpha))


def symbol_l(x):
    """Symbol of tridiag(-1, 2, -1)."""
    return 2.0 - 2.0 * np.cos(x)


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > np.pi * (1 + 1e-14)):
        raise ValueError("symbol argument must lie in [-pi, pi]")
    return x


def symbol_f_normalized(alpha: float, x):
    """f_alpha(x) / c(alpha), even-extended to [-pi, 0)."""
    alpha = validate_order(alpha)
    ax = np.abs(np.asarray(x, dtype=float))
    out = -(2.0 ** (alpha + 1)) * np.sin(ax / 2.0) ** alpha * np.cos(
        ax * (1.0 - alpha / 2.0) + alpha * np.pi / 2.0
    )
    return out if out.ndim else float(out)


def symbol_f(alpha: float, x):
    """Generating function of h^alpha A_M (d = 1)."""
    x = _check_domain(x)
    return c_alpha(alpha) * symbol_f_normalized(alpha, x)


def symbol_g_s(alpha: float, s: int, x):
    """Symbol of the bandwidth-``s`` truncation (sign fixed so it approximates f)."""
    s = int(s)
    if s < 1:
        raise ValueError("bandwidth s must be >= 1")
    x = np.asarray(x, dtype=float)
    tab = grunwald_coeffs(alpha, s)
    k = np.arange(s + 1)
    vals = -2.0 * tab.c_alpha * np.cos(np.multiply.outer(x, k - 1)) @ tab.g
    return vals if np.ndim(vals) else float(vals)


def symbol_delta(alpha: float, s: int, x):
    """f_alpha - g_s."""
    return symbol_f(alpha, x) - symbol_g_s(alpha, s, x)


def symbol_kappa(alpha: float, s: int, x):
    """f_alpha / g_s; both vanish at the origin so x = 0 is rejected."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0.0):
        raise ZeroDivisionError("kappa_s has a removable 0/0 at x = 0")
    return symbol_f(alpha, x) / symbol_g_s(alpha, s, x)
