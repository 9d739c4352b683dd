"""P1 assembly of the Helmholtz sesquilinear forms with Dirichlet elimination.

Conventions: inner products are linear in the first and antilinear in the
second slot, so ``sesH(u, v) = conj(v)^T (A - M - iR) u`` for coefficient
vectors ``u, v``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .linalg import as_csr
from .mesh import ROBIN, Skeleton, TriMesh
from .problem import HelmholtzProblem


class AssemblyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# quadrature

# degree-4 rule with 6 points (barycentric coordinates, weights sum to 1)
_T6_A, _T6_B = 0.445948490915965, 0.091576213509771
_T6_WA, _T6_WB = 0.223381589678011, 0.109951743655322
TRI6_POINTS = np.array([
    [1 - 2 * _T6_A, _T6_A, _T6_A], [_T6_A, 1 - 2 * _T6_A, _T6_A], [_T6_A, _T6_A, 1 - 2 * _T6_A],
    [1 - 2 * _T6_B, _T6_B, _T6_B], [_T6_B, 1 - 2 * _T6_B, _T6_B], [_T6_B, _T6_B, 1 - 2 * _T6_B],
])
TRI6_WEIGHTS = np.array([_T6_WA] * 3 + [_T6_WB] * 3)


@lru_cache(maxsize=None)
def triangle_rule(order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric points and weights (summing to 1) exact up to ``order``.

    Orders above 4 use a collapsed (Duffy) Gauss-Legendre product rule.
    """
    if order <= 4:
        return TRI6_POINTS, TRI6_WEIGHTS
    n = order // 2 + 1
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = 0.5 * (x + 1), 0.5 * w
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    s = u.ravel()
    t = (v * (1 - u)).ravel()
    weights = (wu * wv * (1 - u)).ravel() * 2.0
    pts = np.column_stack([1 - s - t, s, t])
    return pts, weights


def line_rule(n: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on [0, 1], weights summing to 1."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


# ---------------------------------------------------------------------------
# element matrices

def p1_gradients(mesh: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Constant gradients of the barycentric functions ``(T, 3, 2)`` and areas."""
    p = mesh.vertices[mesh.triangles]
    area = mesh.areas()
    if np.any(area <= 0):
        raise AssemblyError(f"degenerate or inverted triangle (min area {area.min():.3e})")
    # grad lambda_k = rot90(opposite edge) / (2 area)
    e0 = p[:, 2] - p[:, 1]
    e1 = p[:, 0] - p[:, 2]
    e2 = p[:, 1] - p[:, 0]
    g = np.stack([e0, e1, e2], axis=1)
    grads = np.stack([-g[..., 1], g[..., 0]], axis=-1) / (2 * area[:, None, None])
    return grads, area


def _scatter(mesh: TriMesh, local: np.ndarray, n: int) -> sp.csr_matrix:
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    return _symmetric(sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)))


def _symmetric(X) -> sp.csr_matrix:
    # summation order differs between (i, j) and (j, i); averaging makes X^T == X bitwise
    X = as_csr(X)
    return as_csr((X + X.T) * 0.5)


def stiffness_matrix(mesh: TriMesh, weight=None) -> sp.csr_matrix:
    grads, area = p1_gradients(mesh)
    w = area if weight is None else area * weight
    local = np.einsum("t,tid,tjd->tij", w, grads, grads)
    return _scatter(mesh, local, mesh.n_vertices)


_P1_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0


def mass_matrix(mesh: TriMesh, weight=None) -> sp.csr_matrix:
    area = mesh.areas()
    w = area if weight is None else area * weight
    local = w[:, None, None] * _P1_MASS
    return _scatter(mesh, local, mesh.n_vertices)


def boundary_mass_matrix(mesh: TriMesh, edges: np.ndarray, weight: np.ndarray) -> sp.csr_matrix:
    n = mesh.n_vertices
    if len(edges) == 0:
        return sp.csr_matrix((n, n))
    d = mesh.vertices[edges[:, 1]] - mesh.vertices[edges[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    w = weight * length / 6.0
    local = w[:, None, None] * np.array([[2.0, 1.0], [1.0, 2.0]])
    rows = np.repeat(edges, 2, axis=1).ravel()
    cols = np.tile(edges, (1, 2)).ravel()
    return _symmetric(sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)))


def volume_load(mesh: TriMesh, f, order: int = 4) -> np.ndarray:
    """``F_i = int f phi_i`` by element quadrature."""
    lam, w = triangle_rule(order)
    p = mesh.vertices[mesh.triangles]
    x = np.einsum("qk,tkd->tqd", lam, p)
    fx = np.asarray(f(x), dtype=complex)
    local = mesh.areas()[:, None] * np.einsum("q,tq,qk->tk", w, fx, lam)
    out = np.zeros(mesh.n_vertices, dtype=complex)
    np.add.at(out, mesh.triangles.ravel(), local.ravel())
    return out


def boundary_load(mesh: TriMesh, edges: np.ndarray, g, npts: int = 4) -> np.ndarray:
    out = np.zeros(mesh.n_vertices, dtype=complex)
    if len(edges) == 0:
        return out
    s, w = line_rule(npts)
    a = mesh.vertices[edges[:, 0]]
    b = mesh.vertices[edges[:, 1]]
    x = a[:, None, :] + s[None, :, None] * (b - a)[:, None, :]
    gx = np.asarray(g(x), dtype=complex)
    length = np.hypot(*(b - a).T)
    phi = np.column_stack([1 - s, s])
    local = length[:, None] * np.einsum("q,eq,qk->ek", w, gx, phi)
    np.add.at(out, edges.ravel(), local.ravel())
    return out


# ---------------------------------------------------------------------------
# dof bookkeeping

@dataclass(frozen=True, eq=False)
class DofMap:
    dof_of_vertex: np.ndarray   # -1 on Dirichlet vertices
    vertex_of_dof: np.ndarray
    subdomain_ids: np.ndarray
    interior: dict              # subdomain id -> interior dofs (sorted)
    closure: dict               # subdomain id -> all dofs touching the subdomain (sorted)
    interface: np.ndarray       # dofs on the skeleton

    @property
    def n_dofs(self) -> int:
        return len(self.vertex_of_dof)

    def expand(self, u: np.ndarray) -> np.ndarray:
        """Dof vector -> vertex vector (zero on Dirichlet vertices)."""
        full = np.zeros(len(self.dof_of_vertex), dtype=np.result_type(u, float))
        full[self.vertex_of_dof] = u
        return full

    def reduce(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full)[self.vertex_of_dof]

    def dofs(self, vertices: np.ndarray) -> np.ndarray:
        return self.dof_of_vertex[np.asarray(vertices, dtype=np.int64)]


def build_dofmap(mesh: TriMesh) -> DofMap:
    nv = mesh.n_vertices
    dirichlet = mesh.dirichlet_vertices()
    free = np.ones(nv, dtype=bool)
    free[dirichlet] = False
    vertex_of_dof = np.flatnonzero(free)
    dof_of_vertex = -np.ones(nv, dtype=np.int64)
    dof_of_vertex[vertex_of_dof] = np.arange(len(vertex_of_dof))

    on_boundary = np.zeros(nv, dtype=bool)
    on_boundary[mesh.boundary_vertices()] = True
    # a vertex is interior to a subdomain iff all its triangles are in it and it is off the outer boundary
    first = np.full(nv, -1, dtype=np.int64)
    mixed = np.zeros(nv, dtype=bool)
    for k in range(3):
        v = mesh.triangles[:, k]
        s = mesh.subdomain
        unset = first[v] == -1
        first[v[unset]] = s[unset]
        mixed[v[first[v] != s]] = True
    ids = mesh.subdomain_ids
    interior, closure = {}, {}
    for j in ids:
        verts = np.unique(mesh.triangles[mesh.subdomain == j].ravel())
        closure[int(j)] = np.sort(dof_of_vertex[verts[free[verts]]])
        inner = verts[(first[verts] == j) & ~mixed[verts] & ~on_boundary[verts]]
        interior[int(j)] = np.sort(dof_of_vertex[inner])
    is_interior = np.zeros(len(vertex_of_dof), dtype=bool)
    for d in interior.values():
        is_interior[d] = True
    return DofMap(dof_of_vertex, vertex_of_dof, ids, interior, closure, np.flatnonzero(~is_interior))


# ---------------------------------------------------------------------------
# forms

@dataclass(frozen=True, eq=False)
class AssembledForms:
    A: sp.csr_matrix   # stiffness with coefficient a
    M: sp.csr_matrix   # mass with weight kappa^2
    R: sp.csr_matrix   # Robin mass with weight omega*beta
    F: np.ndarray      # load vector

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def H(self) -> sp.csr_matrix:
        return as_csr(self.A - self.M - 1j * self.R)


def assemble(mesh: TriMesh, problem: HelmholtzProblem, order: int = 4) -> tuple[DofMap, AssembledForms]:
    a, kappa_sq = problem.coefficients(mesh)
    if len(a) != mesh.n_triangles:
        raise AssemblyError("coefficient missing on some triangles")
    A = stiffness_matrix(mesh, a)
    M = mass_matrix(mesh, kappa_sq)
    robin = mesh.boundary_edges[mesh.boundary_markers == ROBIN]
    wR = problem.robin_weight(mesh.vertices[robin].mean(axis=1)) if len(robin) else np.zeros(0)
    R = boundary_mass_matrix(mesh, robin, wR)
    F = volume_load(mesh, problem.f, order) + boundary_load(mesh, robin, problem.g)
    dofmap = build_dofmap(mesh)
    keep = dofmap.vertex_of_dof

    def sub(X):
        return as_csr(X[keep][:, keep])
    return dofmap, AssembledForms(sub(A), sub(M), sub(R), F[keep])


def energy_norm(forms: AssembledForms, v: np.ndarray) -> float:
    """Discrete ``||v||_P = sqrt(v^* A v + v^* M v)``."""
    v = np.asarray(v)
    if v.shape != (forms.n,):
        raise AssemblyError(f"vector of length {len(v)} does not match {forms.n} dofs")
    val = np.vdot(v, forms.A @ v) + np.vdot(v, forms.M @ v)
    return float(np.sqrt(max(val.real, 0.0)))


def sesH_apply(forms: AssembledForms, u: np.ndarray, v: np.ndarray) -> complex:
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != (forms.n,) or v.shape != (forms.n,):
        raise AssemblyError("dimension mismatch in sesH")
    Hu = forms.A @ u - forms.M @ u - 1j * (forms.R @ u)
    return complex(np.vdot(v, Hu))


@dataclass(frozen=True, eq=False)
class SubdomainForms:
    dofs: np.ndarray
    A: sp.csr_matrix
    M: sp.csr_matrix
    F: np.ndarray


def restrict(forms: AssembledForms, dofs) -> SubdomainForms:
    """Principal submatrices and subvector on ``dofs``."""
    dofs = np.asarray(dofs, dtype=np.int64)
    if len(dofs) and (dofs.min() < 0 or dofs.max() >= forms.n):
        raise AssemblyError("dof index out of range")
    return SubdomainForms(dofs, as_csr(forms.A[dofs][:, dofs]), as_csr(forms.M[dofs][:, dofs]), forms.F[dofs])


def edge_dofs(dofmap: DofMap, skeleton: Skeleton) -> list:
    """Dofs of the interior chain nodes of every skeleton edge."""
    return [dofmap.dofs(e.interior_nodes) for e in skeleton.edges]


def assemble_subdomain(mesh: TriMesh, problem: HelmholtzProblem, j: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Stiffness and weighted mass over the triangles of subdomain ``j`` only (vertex numbering)."""
    a, kappa_sq = problem.coefficients(mesh)
    sel = mesh.subdomain == j
    w_a = np.where(sel, a, 0.0)
    w_m = np.where(sel, kappa_sq, 0.0)
    return stiffness_matrix(mesh, w_a), mass_matrix(mesh, w_m)

