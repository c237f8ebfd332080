import math

import numpy as np
import pytest
import scipy.sparse as sp

from rieszmg.multigrid import (GridTransfer, build_hierarchy, cycle, default_omega, jacobi_smooth,
                               jacobi_weight_2d, mgm_solve)
from rieszmg.problems import example1
from rieszmg.symbols import coarse_symbol_recursion, smoothing_constants
from rieszmg.toeplitz import BandedRiesz, Riesz2DOperator, RieszMatrix1D, materialize_dense

ALPHAS = (1.2, 1.5, 1.8)


def dense_transfer(n, c):
    P = np.zeros(((n - 1) // 2, n))
    for i in range(P.shape[0]):
        P[i, 2 * i: 2 * i + 3] = c * np.array([0.5, 1.0, 0.5])
    return P


def test_transfer_stencil_and_transpose(rng):
    tr = GridTransfer((15,), (1.3,))
    P = tr.matrix().toarray()
    np.testing.assert_allclose(P, dense_transfer(15, 1.3))
    # rows centred on the even 1-based fine points
    assert [int(np.argmax(r)) + 1 for r in P] == list(range(2, 15, 2))
    v, w = rng.standard_normal(15), rng.standard_normal(7)
    np.testing.assert_allclose(tr.restrict(v), P @ v)
    np.testing.assert_allclose(tr.prolong(w), P.T @ w)
    np.testing.assert_allclose(tr.restrict(np.full(15, 3.0)), 2 * 1.3 * 3.0)


def test_transfer_2d_is_kronecker(rng):
    tr = GridTransfer((7, 15), (1.1, 1.4))
    P = np.kron(dense_transfer(7, 1.1), dense_transfer(15, 1.4))
    np.testing.assert_allclose(tr.matrix().toarray(), P)
    v = rng.standard_normal(7 * 15)
    np.testing.assert_allclose(tr.restrict(v), P @ v)
    w = rng.standard_normal(3 * 7)
    np.testing.assert_allclose(tr.prolong(w), P.T @ w)


def test_laplacian_symbol_fixed_point():
    A = RieszMatrix1D(2.0, 63)
    hier = build_hierarchy(A, coarsening="galerkin")
    for lv in hier.levels[1:]:
        D = lv.A if isinstance(lv.A, np.ndarray) else lv.A.toarray()
        ref = D[0, 0] / 2 * (2 * np.eye(D.shape[0]) - np.eye(D.shape[0], k=1) - np.eye(D.shape[0], k=-1))
        np.testing.assert_allclose(D, ref, atol=1e-9 * D[0, 0])


def test_galerkin_matches_dense_triple_product():
    a = 1.5
    A = RieszMatrix1D(a, 63)
    hier = build_hierarchy(A, coarsening="galerkin", coarsest_cap=7)
    assert hier.sizes == [63, 31, 15, 7]
    C = coarse_symbol_recursion(a, 3, grid_size=2).C
    ref = A.todense()
    for k, lv in enumerate(hier.levels[1:]):
        P = dense_transfer(ref.shape[0], C[k])
        ref = P @ ref @ P.T
        got = lv.A if isinstance(lv.A, np.ndarray) else lv.A.toarray()
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())
        assert np.linalg.eigvalsh(got).min() > 0


def test_banded_galerkin_stays_banded():
    B = BandedRiesz(1.5, 255, 3)
    hier = build_hierarchy(B, coarsening="galerkin")
    for lv in hier.levels[1:]:
        M = sp.csr_matrix(lv.A)
        i, j = M.nonzero()
        assert np.abs(i - j).max() <= 5
        assert sp.issparse(lv.A)


def test_geometric_rediscretises():
    A = RieszMatrix1D(1.5, 63)
    hier = build_hierarchy(A, coarsening="geometric")
    for lv in hier.levels[1:]:
        m = lv.shape[0]
        np.testing.assert_allclose(lv.A.first_col, RieszMatrix1D(1.5, m).first_col)


def test_incompatible_size():
    with pytest.raises(ValueError):
        build_hierarchy(RieszMatrix1D(1.5, 60))
    with pytest.raises(ValueError):
        build_hierarchy(RieszMatrix1D(1.5, 63), coarsest_cap=1)


def test_jacobi_trivial_cases(rng):
    A = RieszMatrix1D(1.5, 31)
    u = rng.standard_normal(31)
    b = A @ u
    np.testing.assert_allclose(jacobi_smooth(A, A.diagonal(), 0.7, u, b, 3), u, rtol=1e-13)
    I = np.eye(5)
    out = jacobi_smooth(I, np.ones(5), 1.0, np.zeros(5), np.arange(5.0), 1)
    np.testing.assert_allclose(out, np.arange(5.0))
    with pytest.raises(ZeroDivisionError):
        jacobi_smooth(I, np.zeros(5), 1.0, np.zeros(5), np.ones(5))


def test_jacobi_reduces_energy_error(rng):
    A = RieszMatrix1D(1.5, 127)
    om = smoothing_constants(1.5)[0]
    u_true = rng.standard_normal(127)
    b = A @ u_true
    u = np.zeros(127)
    errs = []
    for _ in range(10):
        u = jacobi_smooth(A, A.diagonal(), om, u, b, 1)
        e = u - u_true
        errs.append(e @ (A @ e))
    assert all(np.diff(errs) < 0)


def test_cycle_zero_rhs():
    hier = build_hierarchy(RieszMatrix1D(1.5, 63))
    np.testing.assert_array_equal(cycle(hier, 0, np.zeros(63), np.zeros(63)), 0.0)
    with pytest.raises(IndexError):
        cycle(hier, 9, np.zeros(63), np.zeros(63))


@pytest.mark.parametrize("a", ALPHAS)
def test_tgm_contracts(a):
    A = RieszMatrix1D(a, 63)
    hier = build_hierarchy(A, cycle="tgm")
    E = np.column_stack([cycle(hier, 0, e, np.zeros(63)) for e in np.eye(63)])
    assert np.abs(np.linalg.eigvals(E)).max() < 1


def test_v_cycle_factor_level_independent():
    rates = []
    for t in range(6, 11):
        A, b, _ = example1(1.5, 2 ** t - 1, "analytic")
        _, rep = mgm_solve(build_hierarchy(A), b)
        h = np.array(rep.residual_history)
        rates.append((h[-1] / h[1]) ** (1 / (len(h) - 2)))
    assert max(rates) - min(rates) < 0.1
    assert max(rates) < 0.2


@pytest.mark.parametrize("alpha,t,kw,expected", [
    (1.5, 10, dict(coarsening="galerkin"), 9),
    (1.8, 6, dict(coarsening="geometric"), 13),
    (1.2, 8, dict(coarsening="galerkin", cycle="tgm"), 9),
])
def test_published_counts(alpha, t, kw, expected):
    A, b, _ = example1(alpha, 2 ** t - 1, "analytic")
    _, rep = mgm_solve(build_hierarchy(A, **kw), b)
    assert rep.converged
    assert abs(rep.iterations - expected) <= 2


def test_count_patterns():
    for a in ALPHAS:
        for t in range(6, 11):
            A, b, _ = example1(a, 2 ** t - 1, "analytic")
            assert mgm_solve(build_hierarchy(A), b)[1].iterations <= 20
    A, b, _ = example1(1.8, 1023, "analytic")
    assert mgm_solve(build_hierarchy(A, coarsening="geometric"), b)[1].iterations <= 16
    A, b, _ = example1(1.2, 1023, "analytic")
    assert mgm_solve(build_hierarchy(A, coarsening="geometric"), b)[1].iterations >= 30


def _w_cases():
    for co in ("galerkin", "geometric"):
        for a in ALPHAS:
            for nu in ((0, 1), (1, 0), (1, 1)):
                marks = ()
                if (co, a, nu) == ("galerkin", 1.5, (0, 1)):
                    # W matches the two-grid count (16); V happens to stop one sweep earlier
                    marks = pytest.mark.xfail(strict=True, reason="V-cycle beats the two-grid count here")
                yield pytest.param(co, a, nu, marks=marks, id=f"{co}-{a}-{nu[0]}{nu[1]}")


@pytest.mark.parametrize("co,a,nu", list(_w_cases()))
def test_w_not_worse_than_v(co, a, nu):
    A, b, _ = example1(a, 255, "analytic")
    kw = dict(coarsening=co, nu_pre=nu[0], nu_post=nu[1])
    v = mgm_solve(build_hierarchy(A, **kw), b)[1]
    w = mgm_solve(build_hierarchy(A, cycle="w", **kw), b)[1]
    assert w.iterations <= v.iterations


def test_nonconvergence_report():
    A, b, _ = example1(1.5, 63)
    u, rep = mgm_solve(build_hierarchy(A), b, tol=1e-8, maxit=2)
    assert not rep.converged and rep.iterations == 2
    with pytest.raises(ValueError):
        mgm_solve(build_hierarchy(A), b, tol=0)


def test_report_history_invariant():
    A, b, _ = example1(1.2, 127)
    _, rep = mgm_solve(build_hierarchy(A), b)
    assert rep.residual_history[-1] / rep.residual_history[0] < 1e-8
    assert rep.final_relres == rep.residual_history[-1]


def test_2d_galerkin_matches_dense():
    A = Riesz2DOperator(1.3, 1.7, 15, 7, coeff_e=lambda x, y: 1 + x * y)
    hier = build_hierarchy(A, coarsest_cap=3)
    P = hier.levels[0].transfer.matrix().toarray()
    ref = P @ materialize_dense(A) @ P.T
    got = hier.levels[1].A.toarray()
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_2d_weight():
    # published 2D Jacobi weights
    assert jacobi_weight_2d(1.1, 1.2) == pytest.approx(0.8287, abs=1e-4)
    assert jacobi_weight_2d(1.5, 1.5) == pytest.approx(0.8485, abs=1e-4)
    assert jacobi_weight_2d(1.7, 1.9) == pytest.approx(0.8251, abs=1e-4)
    assert default_omega(RieszMatrix1D(1.5, 7)) == pytest.approx(2 ** 0.5 / 2, rel=1e-12)
    assert math.isclose(jacobi_weight_2d(2.0, 2.0), 0.8 * 2 * 8 / 16)
