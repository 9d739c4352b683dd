"""Sparse direct solves and symmetric-definite generalized eigensolvers."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_EIG_LIMIT = 4000
DENSE_NEAREST_LIMIT = 600
PIVOT_TOL = 1e-14


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


def as_csr(A) -> sp.csr_matrix:
    """CSR with summed duplicates and sorted column indices."""
    A = sp.csr_matrix(A)
    A.sum_duplicates()
    A.sort_indices()
    return A


class Factorization:
    """Sparse LU of a square matrix (SuperLU), safe to share between solves."""

    def __init__(self, A):
        A = sp.csc_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"matrix must be square, got {A.shape}")
        self.shape = A.shape
        self.dtype = A.dtype
        scale = abs(A).max() if A.nnz else 0.0
        if A.shape[0] == 0:
            self._lu = None
            return
        if scale == 0:
            raise SingularMatrixError("zero matrix", 0.0)
        try:
            self._lu = spla.splu(A, permc_spec="COLAMD")
        except RuntimeError as err:
            raise SingularMatrixError(f"structurally singular matrix: {err}", 0.0) from err
        piv = np.abs(self._lu.U.diagonal())
        self.min_pivot = float(piv.min()) / scale
        if self.min_pivot < PIVOT_TOL:
            raise SingularMatrixError(
                f"numerically singular matrix (relative pivot {self.min_pivot:.3e})", self.min_pivot)

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b)
        if self._lu is None:
            return np.zeros_like(b)
        if np.iscomplexobj(b) and not np.iscomplexobj(np.empty(0, self.dtype)):
            return self._lu.solve(np.ascontiguousarray(b.real)) + 1j * self._lu.solve(np.ascontiguousarray(b.imag))
        return self._lu.solve(np.ascontiguousarray(b, dtype=np.result_type(b, self.dtype)))


def factor(A) -> Factorization:
    return Factorization(A)


def solve(fact: Factorization, b: np.ndarray) -> np.ndarray:
    return fact.solve(b)


@dataclass(frozen=True, eq=False)
class EigPairs:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # (n, k), M-orthonormal columns

    def __len__(self):
        return len(self.values)

    def head(self, k: int) -> "EigPairs":
        return EigPairs(self.values[:k], self.vectors[:, :k])


def _normalize_signs(V: np.ndarray) -> np.ndarray:
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    s = np.sign(V[idx, np.arange(V.shape[1])])
    s[s == 0] = 1
    return V * s


def generalized_sym_eig(K, M, k: int) -> EigPairs:
    """The ``k`` smallest eigenpairs of ``K v = lam M v`` with ``M`` s.p.d."""
    n = K.shape[0]
    if not 0 <= k <= n:
        raise ValueError(f"requested {k} eigenpairs of a {n}-dimensional problem")
    if k == 0:
        return EigPairs(np.zeros(0), np.zeros((n, 0)))
    if n <= DENSE_EIG_LIMIT or k >= n - 1:
        Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
        Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        try:
            w, V = sla.eigh(Kd, Md, subset_by_index=[0, k - 1])
        except np.linalg.LinAlgError as err:
            raise NotPositiveDefiniteError(f"mass matrix not positive definite: {err}") from err
    else:
        w, V = _shift_invert(sp.csc_matrix(K), sp.csc_matrix(M), k)
    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    return EigPairs(w, _normalize_signs(V))


def _shift_invert(K, M, k):
    diag = M.diagonal()
    if np.any(diag <= 0):
        raise NotPositiveDefiniteError("mass matrix has nonpositive diagonal entries")
    # shift slightly below the spectrum keeps K - sigma M definite and factorable
    sigma = -1e-3 * abs(K.diagonal() / diag).min()
    v0 = np.random.default_rng(0).standard_normal(K.shape[0])
    w, V = spla.eigsh(K, k=k, M=M, sigma=sigma, which="LM", v0=v0, tol=1e-12)
    # re-orthonormalize against M (ARPACK is accurate but not exact)
    G = V.T @ (M @ V)
    L = np.linalg.cholesky(G)
    V = sla.solve_triangular(L, V.T, lower=True).T
    R = V.T @ (K @ V)
    w2, Q = np.linalg.eigh(0.5 * (R + R.T))
    return w2, V @ Q


def nearest_eigenvalues(K, M, target: float, k: int = 2) -> np.ndarray:
    """Eigenvalues of ``(K, M)`` closest to ``target``."""
    n = K.shape[0]
    k = min(k, n)
    if k == 0:
        return np.zeros(0)
    if n <= DENSE_NEAREST_LIMIT:
        w = sla.eigh(K.toarray(), M.toarray(), eigvals_only=True)
        return w[np.argsort(np.abs(w - target))[:k]]
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        w = spla.eigsh(sp.csc_matrix(K), k=k, M=sp.csc_matrix(M), sigma=target,
                       which="LM", v0=v0, return_eigenvectors=False)
    except RuntimeError:
        # exactly singular shift: target itself is an eigenvalue
        return np.full(1, float(target))
    return np.sort(w)


def dense_lu_solve(H: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """LU with partial pivoting; returns the solution and the smallest relative pivot."""
    if H.shape[0] == 0:
        return np.zeros_like(b), np.inf
    with warnings.catch_warnings():
        # singularity is reported through the pivot check below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(H, check_finite=True)
    scale = np.abs(H).max()
    min_pivot = float(np.abs(np.diag(lu)).min() / scale) if scale > 0 else 0.0
    if min_pivot < PIVOT_TOL:
        raise SingularMatrixError(f"reduced system numerically singular (relative pivot {min_pivot:.3e})",
                                  min_pivot)
    return sla.lu_solve((lu, piv), b), min_pivot


def dump_matrix_market(path, A) -> None:
    """Write ``A`` as a complex general MatrixMarket coordinate file."""
    scipy.io.mmwrite(str(path), sp.coo_matrix(A, dtype=complex), field="complex", symmetry="general")
