import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from rieszmg.kernel import grunwald_coeffs
from rieszmg.krylov import cg_solve
from rieszmg.preconditioners import (IndefinitePreconditionerError, apply, build_banded_mg, build_chan,
                                     build_mg_prec, build_strang, build_strang_2d, build_tau,
                                     build_tau_2d, chan_column, default_bandwidth, strang_column,
                                     tau_eigs, tau_hankel)
from rieszmg.problems import example1, example2
from rieszmg.toeplitz import Riesz2DOperator, RieszMatrix1D, SymmToeplitz, materialize_dense


def sine_matrix(m):
    j = np.arange(1, m + 1)
    return np.sqrt(2 / (m + 1)) * np.sin(np.outer(j, j) * np.pi / (m + 1))


def as_dense(prec, n):
    return np.column_stack([apply(prec, e) for e in np.eye(n)])


def test_strang_identity():
    e = np.zeros(16)
    e[0] = 1
    v = np.arange(16.0)
    np.testing.assert_allclose(apply(build_strang(SymmToeplitz(e)), v), v, atol=1e-13)


@pytest.mark.parametrize("m", [64, 63])
def test_strang_apply_matches_dense(rng, m):
    A = RieszMatrix1D(1.5, m)
    P = build_strang(A)
    C = sla.circulant(strang_column(A.first_col))
    r = rng.standard_normal(m)
    np.testing.assert_allclose(apply(P, r), np.linalg.solve(C, r), rtol=1e-10)
    np.testing.assert_allclose(C, C.T)


def test_strang_even_middle_coefficient():
    a = np.arange(8.0, 0.0, -1.0)
    c = strang_column(a)
    np.testing.assert_array_equal(c[:5], a[:5])
    np.testing.assert_array_equal(c[5:], a[3:0:-1])


def test_chan_fixed_point():
    c = np.array([4.0, -1.0, 0.25, 0.1, 0.25, -1.0])
    T = SymmToeplitz(sla.circulant(c)[:, 0])
    np.testing.assert_allclose(chan_column(T.first_col), c)
    np.testing.assert_allclose(build_chan(T).eigenvalues, np.real(np.fft.fft(c)))


def test_chan_frobenius_optimal(rng):
    A = RieszMatrix1D(1.5, 32)
    T = A.todense()
    best = np.linalg.norm(sla.circulant(chan_column(A.first_col)) - T)
    base = chan_column(A.first_col)
    for _ in range(100):
        other = sla.circulant(base + 0.05 * np.abs(base).max() * rng.standard_normal(32))
        assert best <= np.linalg.norm(other - T)


def test_indefinite_rejected():
    col = np.zeros(8)
    col[:2] = 1.0, 2.0
    with pytest.raises(IndefinitePreconditionerError):
        build_strang(SymmToeplitz(col))
    with pytest.raises(IndefinitePreconditionerError):
        build_tau(SymmToeplitz(col))
    with pytest.raises(ValueError):
        build_strang(SymmToeplitz([1.0, 0.0]))


def test_tau_tridiagonal_exact():
    m = 20
    col = np.zeros(m)
    col[:2] = 2, -1
    np.testing.assert_array_equal(tau_hankel(col), 0.0)
    j = np.arange(1, m + 1)
    np.testing.assert_allclose(tau_eigs(col), 2 - 2 * np.cos(j * np.pi / (m + 1)), atol=1e-13)


def test_tau_dense_hankel_oracle():
    m, a = 16, 1.5
    g = grunwald_coeffs(a, m + 2).g
    col = RieszMatrix1D(a, m).first_col / RieszMatrix1D(a, m).scale
    anti = -np.concatenate([g[3: m + 1], [0, 0, 0], g[m:2:-1]])
    i, k = np.indices((m, m))
    H = anti[i + k]
    np.testing.assert_allclose(tau_hankel(col), H, atol=1e-15)
    S = sine_matrix(m)
    np.testing.assert_allclose(S @ np.diag(tau_eigs(col)) @ S, sla.toeplitz(col) - H, atol=1e-12)


def test_tau_1d_apply_matches_dense(rng):
    A = RieszMatrix1D(1.8, 64)
    P = build_tau(A)
    dense = A.todense() - tau_hankel(A.first_col)
    r = rng.standard_normal(64)
    np.testing.assert_allclose(apply(P, r), np.linalg.solve(dense, r), rtol=1e-10)


@pytest.mark.parametrize("averaging", ["mean", "pointwise"])
def test_tau_2d_apply_matches_dense(rng, averaging):
    m = 15
    A = Riesz2DOperator(1.3, 1.7, m, m, coeff_e=lambda x, y: 1 + x * y)
    P = build_tau_2d(A, averaging)
    Tx = sla.toeplitz(A.Gx.first_col) - tau_hankel(A.Gx.first_col)
    Ty = sla.toeplitz(A.Gy.first_col) - tau_hankel(A.Gy.first_col)
    I = np.eye(m)
    if averaging == "mean":
        dense = (A.cbar_x * A.C.mean() * np.kron(I, Tx) + A.cbar_y * A.E.mean() * np.kron(Ty, I))
    else:
        dense = np.diag(0.5 * (A.C + A.E).ravel()) @ (A.cbar_x * np.kron(I, Tx) + A.cbar_y * np.kron(Ty, I))
    r = rng.standard_normal(m * m)
    np.testing.assert_allclose(apply(P, r), np.linalg.solve(dense, r), rtol=1e-10)


def test_strang_2d_apply_matches_dense(rng):
    m = 15
    A = Riesz2DOperator(1.5, 1.5, m, m)
    P = build_strang_2d(A)
    Cx = sla.circulant(strang_column(A.Gx.first_col))
    I = np.eye(m)
    dense = A.cbar_x * (np.kron(I, Cx) + np.kron(Cx, I))
    r = rng.standard_normal(m * m)
    np.testing.assert_allclose(apply(P, r), np.linalg.solve(dense, r), rtol=1e-10)


def test_zero_and_length():
    A = RieszMatrix1D(1.5, 63)
    for P in (build_strang(A), build_tau(A), build_mg_prec(A), build_banded_mg(1.5, 63)):
        np.testing.assert_array_equal(apply(P, np.zeros(63)), 0.0)
        with pytest.raises(ValueError):
            apply(P, np.zeros(62))


def _all_precs(A):
    return {
        "strang": build_strang(A), "chan": build_chan(A), "tau": build_tau(A),
        "gal": build_mg_prec(A, "galerkin"), "geo": build_mg_prec(A, "geometric"),
        "banded": build_banded_mg(A.alpha, A.M),
    }


@given(st.sampled_from([1.2, 1.5, 1.8]), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2 ** 31))
def test_linearity(alpha, a, b, seed):
    A = RieszMatrix1D(alpha, 63)
    rng = np.random.default_rng(seed)
    r1, r2 = rng.standard_normal(63), rng.standard_normal(63)
    for P in _all_precs(A).values():
        lhs = apply(P, a * r1 + b * r2)
        rhs = a * apply(P, r1) + b * apply(P, r2)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(1.0, np.linalg.norm(rhs))
        np.testing.assert_array_equal(apply(P, r1), apply(P, r1))


@pytest.mark.parametrize("alpha", [1.2, 1.8])
def test_symmetric_maps(alpha):
    A = RieszMatrix1D(alpha, 63)
    for name, P in _all_precs(A).items():
        D = as_dense(P, 63)
        assert np.abs(D - D.T).max() <= 1e-10 * np.abs(D).max(), name


def test_symmetric_maps_2d():
    A = Riesz2DOperator(1.5, 1.5, 15, 15)
    for P in (build_mg_prec(A), build_tau_2d(A), build_strang_2d(A)):
        D = as_dense(P, 225)
        assert np.abs(D - D.T).max() <= 1e-10 * np.abs(D).max()


def test_default_bandwidth():
    assert [default_bandwidth(2 ** t - 1) for t in range(6, 11)] == [7, 7, 9, 9, 11]


def test_published_pcg_counts():
    A, b, _ = example1(1.2, 63, "analytic")
    assert abs(cg_solve(A, b, build_strang(A))[1].iterations - 5) <= 2
    A, b, _ = example1(1.8, 1023, "analytic")
    assert abs(cg_solve(A, b, build_chan(A))[1].iterations - 21) <= 3
    A, b, _ = example1(1.5, 255, "analytic")
    assert abs(cg_solve(A, b, build_banded_mg(1.5, 255, 9))[1].iterations - 10) <= 2
    A, b, _ = example2(1.5, 1.5, 127)
    assert abs(cg_solve(A, b, build_tau_2d(A))[1].iterations - 7) <= 2


@pytest.mark.xfail(strict=True, reason="one V(1,1) cycle is not accurate enough: 6 PCG steps at M=63")
def test_full_bandwidth_single_cycle():
    A, b, _ = example1(1.5, 63)
    assert cg_solve(A, b, build_banded_mg(1.5, 63, 63))[1].iterations <= 5


@pytest.mark.xfail(strict=True, reason="one V(1,1) cycle on the Laplacian needs 8 PCG steps")
def test_laplacian_single_cycle():
    A = RieszMatrix1D(2.0, 63)
    assert cg_solve(A, np.ones(63), build_banded_mg(2.0, 63, 2))[1].iterations <= 2


class _ExactBanded:
    def __init__(self, P):
        self.D = materialize_dense(P.banded)

    def apply(self, r):
        return np.linalg.solve(self.D, r)


def test_full_bandwidth_exact_inner_solve():
    A, b, _ = example1(1.5, 63)
    P = build_banded_mg(1.5, 63, 63)
    assert cg_solve(A, b, _ExactBanded(P))[1].iterations <= 5
    # stronger cycles approach the exact inner solve
    assert cg_solve(A, b, build_banded_mg(1.5, 63, 63, cycle="w"))[1].iterations <= 5


def test_laplacian_exact_truncation():
    A = RieszMatrix1D(2.0, 63)
    P = build_banded_mg(2.0, 63, 2)
    assert np.abs(materialize_dense(P.banded) - A.todense()).max() <= 1e-9 * A.first_col[0]
    assert cg_solve(A, np.ones(63), _ExactBanded(P))[1].iterations <= 2
    assert cg_solve(A, np.ones(63), P)[1].iterations <= 8


def test_negative_g_s_warns(caplog, monkeypatch):
    import rieszmg.preconditioners as pc
    monkeypatch.setattr(pc, "symbol_g_s", lambda a, s, x: np.cos(x))
    with caplog.at_level("WARNING"):
        pc._warn_if_negative(1.5, 3)
    assert "dips" in caplog.text


def test_ordering_at_largest_size():
    A, b, _ = example1(1.8, 1023, "analytic")
    its = {k: cg_solve(A, b, P)[1].iterations for k, P in
           (("PV", build_mg_prec(A)), ("PS", build_strang(A)), ("PC", build_chan(A)))}
    assert its["PV"] <= its["PS"] <= its["PC"]
