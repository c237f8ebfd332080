"""Benchmark problems with manufactured solutions.

All systems use interior unknowns only; the exact solutions vanish on the
boundary.  Source terms are either applied discretely (``rhs = A u``) or
sampled from the closed-form Riesz derivative of the polynomial solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernel import validate_order
from .toeplitz import Riesz2DOperator, RieszMatrix1D

RHS_MODES = ("discrete", "analytic")


def _check_mode(mode):
    if mode not in RHS_MODES:
        raise ValueError(f"rhs_mode must be one of {RHS_MODES}, got {mode!r}")
    return mode


def riesz_of_bump(alpha, x) -> np.ndarray:
    """-d^alpha/d|x|^alpha applied to x^2 (1 - x)^2 on [0, 1], in closed form.

    Uses the left Riemann-Liouville derivative of monomials,
    D^alpha x^p = Gamma(p + 1) / Gamma(p + 1 - alpha) x^(p - alpha),
    and the reflection x -> 1 - x for the right-sided part.
    """
    a = validate_order(alpha)
    x = np.asarray(x, dtype=float)
    g = math.gamma

    def left(z):
        return (2 / g(3 - a) * z ** (2 - a) - 12 / g(4 - a) * z ** (3 - a)
                + 24 / g(5 - a) * z ** (4 - a))

    return (left(x) + left(1 - x)) / (2 * math.cos(a * math.pi / 2))


def bump(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x ** 2 * (1 - x) ** 2


@dataclass(frozen=True)
class RfdeProblem:
    """A Riesz fractional diffusion problem ready to be discretised."""

    name: str
    dimension: int
    orders: tuple
    domain: tuple
    exact_solution: Callable
    rhs_mode: str = "discrete"
    diffusion: object = 1.0
    source: Callable | None = None

    def assemble(self, *sizes):
        if self.dimension == 1:
            (m,) = sizes
            A = RieszMatrix1D(self.orders[0], m, self.domain, d=self.diffusion)
            grid = (A.grid(),)
        else:
            m1, m2 = sizes if len(sizes) == 2 else (sizes[0], sizes[0])
            c, e = self.diffusion
            A = Riesz2DOperator(self.orders[0], self.orders[1], m1, m2, self.domain, c, e)
            X, Y = np.meshgrid(A.x, A.y)
            grid = (X, Y)
        u = np.asarray(self.exact_solution(*grid), dtype=float).ravel()
        if self.rhs_mode == "discrete":
            rhs = A @ u
        else:
            if self.source is None:
                raise ValueError(f"{self.name} has no closed-form source")
            rhs = np.asarray(self.source(*grid), dtype=float).ravel()
        return A, rhs, u


def example1_problem(alpha, rhs_mode="discrete") -> RfdeProblem:
    a = validate_order(alpha)
    return RfdeProblem("example1", 1, (a,), (0.0, 1.0), bump, _check_mode(rhs_mode),
                       1.0, lambda x: riesz_of_bump(a, x))


def example1(alpha, M, rhs_mode="discrete"):
    """1D constant-coefficient problem on [0, 1] with u = x^2 (1 - x)^2."""
    return example1_problem(alpha, rhs_mode).assemble(M)


def example2_source(alpha, beta, X, Y) -> np.ndarray:
    return riesz_of_bump(alpha, X) * bump(Y) + bump(X) * riesz_of_bump(beta, Y)


def example2_problem(alpha, beta, rhs_mode="analytic") -> RfdeProblem:
    a, b = validate_order(alpha), validate_order(beta)
    return RfdeProblem("example2", 2, (a, b), ((0.0, 1.0), (0.0, 1.0)),
                       lambda X, Y: bump(X) * bump(Y), _check_mode(rhs_mode),
                       (None, None), lambda X, Y: example2_source(a, b, X, Y))


def example2(alpha, beta, M1, M2=None, rhs_mode="analytic"):
    """2D problem on the unit square, c = e = 1, u = x^2(1-x)^2 y^2(1-y)^2."""
    return example2_problem(alpha, beta, rhs_mode).assemble(M1, M1 if M2 is None else M2)


def _ex3_solution(X, Y):
    return X ** 4 * (2 - X) ** 4 * Y ** 4 * (2 - Y) ** 4


def example3_problem(alpha, beta) -> RfdeProblem:
    a, b = validate_order(alpha), validate_order(beta)
    return RfdeProblem("example3", 2, (a, b), ((0.0, 2.0), (0.0, 2.0)), _ex3_solution,
                       "discrete", (lambda X, Y: np.ones_like(X), lambda X, Y: 1 + X * Y))


def example3(alpha, beta, M1, M2=None):
    """Variable coefficients c = 1, e = 1 + xy on [0, 2]^2 (nonsymmetric)."""
    return example3_problem(alpha, beta).assemble(M1, M1 if M2 is None else M2)


def relative_error(u, u_ref) -> float:
    return float(np.linalg.norm(u - u_ref) / np.linalg.norm(u_ref))
