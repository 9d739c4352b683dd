import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from helmacms.linalg import (EigPairs, Factorization, NotPositiveDefiniteError, SingularMatrixError,
                             dense_lu_solve, dump_matrix_market, generalized_sym_eig, nearest_eigenvalues,
                             solve)


def test_identity_solve(rng):
    b = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    assert np.allclose(Factorization(sp.identity(7)).solve(b), b)


def test_diagonal_complex_solve():
    x = Factorization(sp.diags([1.0, 2j])).solve(np.array([1.0, 2j]))
    assert np.allclose(x, [1.0, 1.0])


def test_random_sparse_against_dense_oracle(rng):
    A = sp.random(50, 50, density=0.1, random_state=3) + 10 * sp.identity(50)
    A = A + 1j * sp.random(50, 50, density=0.05, random_state=4)
    b = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    x = solve(Factorization(A), b)
    x0 = np.linalg.solve(A.toarray(), b)
    assert np.allclose(x, x0, rtol=1e-12, atol=1e-12)
    assert np.max(np.abs(A @ x - b)) <= 1e-10 * (1 + np.max(np.abs(b)))


@given(st.integers(min_value=5, max_value=500), st.integers(min_value=0, max_value=1000))
def test_factor_round_trip_property(n, seed):
    r = np.random.default_rng(seed)
    B = sp.random(n, n, density=min(1.0, 5.0 / n), random_state=seed)
    A = (B @ B.T + sp.identity(n)) - (0.3 + 0.2j) * sp.identity(n)
    A = 0.5 * (A + A.T)
    b = r.standard_normal(n) + 1j * r.standard_normal(n)
    x = Factorization(A).solve(b)
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_real_factorization_complex_rhs(rng):
    A = sp.diags([2.0, 3.0, 4.0]).tocsc()
    b = np.array([2.0 + 2j, 3j, 4.0])
    assert np.allclose(Factorization(A).solve(b), [1 + 1j, 1j, 1.0])


def test_singular_detection():
    with pytest.raises(SingularMatrixError):
        Factorization(sp.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]])))
    with pytest.raises(SingularMatrixError):
        Factorization(sp.csr_matrix((3, 3)))
    with pytest.raises(SingularMatrixError):
        dense_lu_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_eig_identity():
    pairs = generalized_sym_eig(sp.identity(5), sp.identity(5), 3)
    assert np.allclose(pairs.values, 1.0)


def test_eig_diagonal():
    pairs = generalized_sym_eig(sp.diags([9.0, 1.0, 4.0]), sp.identity(3), 2)
    assert np.allclose(pairs.values, [1.0, 4.0])
    assert len(pairs) == 2 and isinstance(pairs, EigPairs)


def _laplace_1d(n):
    h = 1.0 / (n + 1)
    K = sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) / h
    M = sp.diags([np.ones(n - 1), 4 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]) * h / 6
    return K.tocsr(), M.tocsr(), h


def test_1d_laplacian_eigenvalues():
    # closed form for P1: lam_i = 6/h^2 (1 - cos(i pi h)) / (2 + cos(i pi h))
    K, M, h = _laplace_1d(63)
    pairs = generalized_sym_eig(K, M, 8)
    i = np.arange(1, 9)
    exact = 6 / h ** 2 * (1 - np.cos(i * np.pi * h)) / (2 + np.cos(i * np.pi * h))
    assert np.allclose(pairs.values, exact, rtol=1e-10)
    assert np.all(pairs.values >= (i * np.pi) ** 2)
    assert np.allclose(pairs.vectors.T @ M @ pairs.vectors, np.eye(8), atol=1e-10)


def test_shift_invert_path_matches_dense(monkeypatch):
    import helmacms.linalg as la

    K, M, _ = _laplace_1d(300)
    dense = generalized_sym_eig(K, M, 6)
    monkeypatch.setattr(la, "DENSE_EIG_LIMIT", 10)
    sparse_ = generalized_sym_eig(K, M, 6)
    assert np.allclose(sparse_.values, dense.values, rtol=1e-10)
    V = sparse_.vectors
    assert np.allclose(V.T @ M @ V, np.eye(6), atol=1e-10)
    R = K @ V - M @ V * sparse_.values
    assert np.all(np.linalg.norm(R, axis=0) <= 1e-8 * np.linalg.norm(K @ V, axis=0))


def test_eig_errors():
    with pytest.raises(ValueError):
        generalized_sym_eig(sp.identity(3), sp.identity(3), 4)
    with pytest.raises(NotPositiveDefiniteError):
        generalized_sym_eig(sp.identity(3), sp.diags([1.0, -1.0, 1.0]), 2)


@given(st.integers(min_value=0, max_value=10_000))
def test_eig_permutation_invariance(seed):
    r = np.random.default_rng(seed)
    n = 30
    B = r.standard_normal((n, n))
    K = B @ B.T
    M = np.diag(r.uniform(0.5, 2.0, n))
    w = generalized_sym_eig(sp.csr_matrix(K), sp.csr_matrix(M), 5).values
    p = r.permutation(n)
    wp = generalized_sym_eig(sp.csr_matrix(K[np.ix_(p, p)]), sp.csr_matrix(M[np.ix_(p, p)]), 5).values
    assert np.allclose(w, wp, rtol=1e-10, atol=1e-10 * np.abs(w).max())
    pairs = generalized_sym_eig(sp.csr_matrix(K), sp.csr_matrix(M), 5)
    V = pairs.vectors
    assert np.allclose(V.T @ K @ V, np.diag(pairs.values), atol=1e-8 * np.linalg.norm(K))


def test_nearest_eigenvalues():
    K, M, _ = _laplace_1d(63)
    all_ = generalized_sym_eig(K, M, 63).values
    near = nearest_eigenvalues(K, M, 100.0, k=2)
    expect = np.sort(all_[np.argsort(np.abs(all_ - 100.0))[:2]])
    assert np.allclose(np.sort(near), expect)


def test_matrix_market_dump(tmp_path):
    import scipy.io

    A = sp.csr_matrix(np.array([[1.0, 2j], [0.0, 3.0]]))
    dump_matrix_market(tmp_path / "a.mtx", A)
    B = scipy.io.mmread(str(tmp_path / "a.mtx"))
    assert np.allclose(B.toarray(), A.toarray())
