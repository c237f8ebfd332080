"""Multigrid and structured preconditioners for Riesz fractional diffusion."""

from .kernel import c_alpha, grunwald_coeffs, symbol_f, symbol_g_s
from .krylov import KrylovConfig, cg_solve, gmres_solve
from .multigrid import SolveReport, build_hierarchy, mgm_solve
from .preconditioners import (build_banded_mg, build_chan, build_mg_prec, build_strang,
                              build_tau, build_tau_2d, build_strang_2d)
from .problems import example1, example2, example3
from .toeplitz import Riesz2DOperator, RieszMatrix1D, SymmToeplitz, assemble_riesz_1d, assemble_riesz_2d

__version__ = "0.1.0"
