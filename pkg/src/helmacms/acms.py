"""ACMS basis construction and the decoupled bubble / interface Galerkin solves.

The discrete space is spanned by

* bubble functions: eigenvectors of ``(A_j, M_j)`` on the interior dofs of each
  subdomain (``M`` carries the ``kappa^2`` weight),
* extended edge modes: 1D Laplace eigenvectors along each skeleton edge, extended
  by zero to the rest of the skeleton and then Helmholtz-harmonically into the
  adjacent subdomains,
* extended vertex functions: piecewise 1D-harmonic skeleton traces with
  ``phi_p(q) = delta_pq``, extended the same way.

The Helmholtz-harmonic extension solves ``(A - M)_II x_I = -(A - M)_IB tau_B`` per
subdomain, so every extended column is ``(A - M)``-orthogonal to every bubble and
the bubble and interface problems decouple.
"""
from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .assembly import AssembledForms, DofMap, SubdomainForms, assemble, restrict
from .linalg import (EigPairs, Factorization, dense_lu_solve, generalized_sym_eig,
                     nearest_eigenvalues)
from .mesh import InterfaceEdge, Skeleton, TriMesh
from .problem import HelmholtzProblem

log = logging.getLogger(__name__)

LAMBDA_TOL = 1e-8
MAX = "max"

Counts = Union[int, str, Sequence[int], Mapping[int, int]]


class AssumptionViolation(ValueError):
    """A local eigenvalue is too close to 1, so local Helmholtz problems are ill-posed."""

    def __init__(self, subdomain, index, value):
        where = f"subdomain {subdomain}" + (f", mode {index}" if index is not None else "")
        super().__init__(f"{where}: eigenvalue {value!r} within {LAMBDA_TOL:g} of 1")
        self.subdomain, self.index, self.value = subdomain, index, value


# ---------------------------------------------------------------------------
# cache

def _hash_arrays(*arrays) -> str:
    h = hashlib.sha1()
    for a in arrays:
        if sp.issparse(a):
            a = sp.csr_matrix(a)
            for part in (a.indptr, a.indices, a.data):
                h.update(np.ascontiguousarray(part).tobytes())
        else:
            h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


class BasisCache:
    """Eigenpairs keyed by a hash of the local matrices; optionally mirrored to disk.

    The directory defaults to ``$ACMS_CACHE_DIR`` when set.
    """

    def __init__(self, directory: Optional[Union[str, Path]] = None):
        if directory is None:
            directory = os.environ.get("ACMS_CACHE_DIR")
        self.directory = Path(directory) if directory else None
        self._mem: dict = {}

    def _path(self, kind, ident, key):
        return self.directory / f"{kind}-{ident}-{key[:20]}.npz"

    def get(self, kind: str, ident, key: str) -> Optional[EigPairs]:
        hit = self._mem.get((kind, ident, key))
        if hit is not None:
            return hit
        if self.directory is not None:
            path = self._path(kind, ident, key)
            if path.exists():
                with np.load(path) as data:
                    if str(data["key"]) == key:
                        pairs = EigPairs(data["values"], data["vectors"])
                        self._mem[(kind, ident, key)] = pairs
                        return pairs
        return None

    def put(self, kind: str, ident, key: str, pairs: EigPairs) -> None:
        self._mem[(kind, ident, key)] = pairs
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            np.savez(self._path(kind, ident, key), key=np.array(key), values=pairs.values,
                     vectors=pairs.vectors)


# ---------------------------------------------------------------------------
# bubbles

@dataclass(frozen=True, eq=False)
class BubbleModes:
    subdomain: int
    dofs: np.ndarray      # interior dofs of the subdomain
    values: np.ndarray    # ascending eigenvalues
    vectors: np.ndarray   # (len(dofs), I_j), M_j-orthonormal

    @property
    def count(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class BubbleBasis:
    modes: dict  # subdomain id -> BubbleModes

    @property
    def counts(self) -> tuple:
        return tuple(self.modes[j].count for j in sorted(self.modes))

    @property
    def size(self) -> int:
        return sum(self.counts)


def check_assumption(values: np.ndarray, subdomain=None, tol: float = LAMBDA_TOL) -> None:
    """Raise if any eigenvalue lies within ``tol`` of 1."""
    if len(values):
        dist = np.abs(np.asarray(values) - 1.0)
        i = int(np.argmin(dist))
        if dist[i] < tol:
            raise AssumptionViolation(subdomain, i + 1, float(values[i]))


def inf_sup_constant(values: np.ndarray) -> float:
    """``min |lam - 1| / (lam + 1)`` over the given local eigenvalues."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return np.inf
    return float(np.min(np.abs(values - 1) / (values + 1)))


def compute_bubble_modes(forms_j: SubdomainForms, count: int, subdomain=None,
                         cache: Optional[BasisCache] = None) -> BubbleModes:
    """The ``count`` smallest eigenpairs of ``(A_j, M_j)`` on interior dofs."""
    n = len(forms_j.dofs)
    if count == MAX:
        count = n
    if count > n:
        raise ValueError(f"subdomain {subdomain}: {count} bubbles requested, {n} interior dofs")
    key = None
    pairs = None
    if cache is not None and count:
        key = _hash_arrays(forms_j.A, forms_j.M, np.array([count]))
        pairs = cache.get("bubble", subdomain, key)
    if pairs is None:
        pairs = generalized_sym_eig(forms_j.A, forms_j.M, count)
        if key is not None:
            cache.put("bubble", subdomain, key, pairs)
    check_assumption(pairs.values, subdomain)
    return BubbleModes(subdomain, forms_j.dofs, pairs.values, pairs.vectors)


# ---------------------------------------------------------------------------
# edges

def edge_matrices(mesh: TriMesh, edge: InterfaceEdge) -> tuple[np.ndarray, np.ndarray]:
    """1D P1 stiffness and mass along the node chain (arclength), all nodes."""
    d = np.diff(mesh.vertices[edge.nodes], axis=0)
    h = np.hypot(d[:, 0], d[:, 1])
    n = len(edge.nodes)
    K = np.zeros((n, n))
    Ml = np.zeros((n, n))
    for k, hk in enumerate(h):
        K[k:k + 2, k:k + 2] += np.array([[1.0, -1.0], [-1.0, 1.0]]) / hk
        Ml[k:k + 2, k:k + 2] += np.array([[2.0, 1.0], [1.0, 2.0]]) * hk / 6.0
    return K, Ml


@dataclass(frozen=True, eq=False)
class EdgeModes:
    edge: int
    dofs: np.ndarray        # dofs of interior chain nodes
    values: np.ndarray
    vectors: np.ndarray     # (n_interior, I_e), mass-orthonormal
    stiffness: np.ndarray   # interior 1D stiffness
    mass: np.ndarray        # interior 1D mass

    @property
    def count(self) -> int:
        return len(self.values)

    def head(self, k: int) -> "EdgeModes":
        return EdgeModes(self.edge, self.dofs, self.values[:k], self.vectors[:, :k],
                         self.stiffness, self.mass)


def compute_edge_modes(mesh: TriMesh, edge: InterfaceEdge, count, dofs: Optional[np.ndarray] = None,
                       index: int = -1) -> EdgeModes:
    """Smallest eigenpairs of the 1D Dirichlet Laplacian along ``edge``."""
    K, Ml = edge_matrices(mesh, edge)
    Ki, Mi = K[1:-1, 1:-1], Ml[1:-1, 1:-1]
    n = len(Ki)
    if count == MAX:
        count = n
    if count > n:
        raise ValueError(f"edge {index}: {count} modes requested, {n} interior nodes")
    pairs = generalized_sym_eig(Ki, Mi, count)
    if dofs is None:
        dofs = edge.interior_nodes
    return EdgeModes(index, np.asarray(dofs), pairs.values, pairs.vectors, Ki, Mi)


def edge_projection(modes: EdgeModes, v: np.ndarray) -> np.ndarray:
    """L2(e)-projection of interior-node values onto the span of ``modes``."""
    V = modes.vectors
    return V @ (V.T @ (modes.mass @ v))


# ---------------------------------------------------------------------------
# vertices

@dataclass(frozen=True, eq=False)
class VertexTrace:
    node: int
    dofs: np.ndarray     # skeleton dofs where the trace is nonzero-capable
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class VertexBasis:
    traces: list

    def __len__(self):
        return len(self.traces)


def _harmonic_on_edge(mesh: TriMesh, edge: InterfaceEdge, start_value: float, end_value: float) -> np.ndarray:
    K, _ = edge_matrices(mesh, edge)
    n = len(edge.nodes)
    if n == 2:
        return np.zeros(0)
    bnd = np.array([start_value, end_value])
    rhs = -K[1:-1][:, [0, n - 1]] @ bnd
    return np.linalg.solve(K[1:-1, 1:-1], rhs)


def vertex_traces(mesh: TriMesh, skeleton: Skeleton, dofmap: DofMap) -> VertexBasis:
    out = []
    for vert in skeleton.vertices:
        p = vert.node
        dofs = [np.array([dofmap.dof_of_vertex[p]])]
        vals = [np.ones(1)]
        for k in vert.adjacent_edges:
            e = skeleton.edges[k]
            s = 1.0 if e.nodes[0] == p else 0.0
            t = 1.0 if e.nodes[-1] == p else 0.0
            dofs.append(dofmap.dofs(e.interior_nodes))
            vals.append(_harmonic_on_edge(mesh, e, s, t))
        out.append(VertexTrace(p, np.concatenate(dofs), np.concatenate(vals)))
    return VertexBasis(out)


def vertex_interpolant(fn, mesh: TriMesh, skeleton: Skeleton, dofmap: DofMap) -> np.ndarray:
    """``I_V v = sum_p v(p) phi_p`` as a dof vector supported on the skeleton."""
    basis = vertex_traces(mesh, skeleton, dofmap)
    out = np.zeros(dofmap.n_dofs, dtype=complex)
    for tr in basis.traces:
        out[tr.dofs] += fn(mesh.vertices[tr.node][None, :])[0] * tr.values
    return out


# ---------------------------------------------------------------------------
# extensions

@dataclass(frozen=True, eq=False)
class LocalExtension:
    subdomain: int
    interior: np.ndarray          # interior dofs
    boundary: np.ndarray          # remaining closure dofs
    factorization: Factorization  # of (A - M)_II
    coupling: sp.csr_matrix       # (A - M)_IB
    beta: float                   # discrete inf-sup constant (inf over the local spectrum)


@dataclass(frozen=True, eq=False)
class ExtensionOperators:
    local: dict  # subdomain id -> LocalExtension

    def __getitem__(self, j) -> LocalExtension:
        return self.local[j]


def build_local_extension(forms: AssembledForms, dofmap: DofMap, j: int,
                          check: bool = True) -> LocalExtension:
    interior = dofmap.interior[j]
    boundary = np.setdiff1d(dofmap.closure[j], interior)
    S = (forms.A - forms.M).tocsr()
    S_II = S[interior][:, interior]
    beta = np.nan
    if check and len(interior):
        near = nearest_eigenvalues(forms.A[interior][:, interior], forms.M[interior][:, interior], 1.0)
        check_assumption(near, j)
        beta = inf_sup_constant(near)
    return LocalExtension(j, interior, boundary, Factorization(S_II), S[interior][:, boundary].tocsr(), beta)


def build_extensions(forms: AssembledForms, dofmap: DofMap, threads: int = 1,
                     check: bool = True) -> ExtensionOperators:
    ids = [int(j) for j in dofmap.subdomain_ids]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        ext = list(pool.map(lambda j: build_local_extension(forms, dofmap, j, check), ids))
    return ExtensionOperators(dict(zip(ids, ext)))


def harmonic_extension(ops: ExtensionOperators, j: int, trace: np.ndarray) -> np.ndarray:
    """Interior values of the Helmholtz-harmonic extension of boundary values ``trace``.

    ``trace`` is ordered like ``ops[j].boundary`` and may have several columns.
    """
    loc = ops[j]
    rhs = -(loc.coupling @ trace)
    return loc.factorization.solve(rhs)


# ---------------------------------------------------------------------------
# space

@dataclass(frozen=True, eq=False)
class AcmsSpace:
    G: sp.csc_matrix          # (n_dofs, n_basis), real
    n_bubble: int
    n_edge: int
    n_vertex: int
    origins: list             # ("bubble", j, i) | ("edge", e, i) | ("vertex", p, 0)
    bubbles: BubbleBasis
    edge_modes: list

    @property
    def G_bubble(self) -> sp.csc_matrix:
        return self.G[:, :self.n_bubble]

    @property
    def G_interface(self) -> sp.csc_matrix:
        return self.G[:, self.n_bubble:]

    @property
    def n_basis(self) -> int:
        return self.G.shape[1]

    @property
    def S_B(self) -> tuple:
        return self.bubbles.counts

    @property
    def S_Gamma(self) -> tuple:
        return tuple(m.count for m in self.edge_modes)


def _expand_counts(counts: Counts, keys: Sequence, name: str) -> dict:
    if isinstance(counts, (int, np.integer)) or counts == MAX:
        return {k: counts for k in keys}
    if isinstance(counts, Mapping):
        missing = [k for k in keys if k not in counts]
        if missing:
            raise ValueError(f"{name}: no count for {missing}")
        return {k: counts[k] for k in keys}
    counts = list(counts)
    if len(counts) != len(keys):
        raise ValueError(f"{name}: expected {len(keys)} counts, got {len(counts)}")
    return dict(zip(keys, counts))


def _clamp(counts: dict, limits: dict) -> dict:
    return {k: limits[k] if c == MAX else min(int(c), limits[k]) for k, c in counts.items()}


class AcmsContext:
    """Basis data for one mesh and problem, reused across mode-count sweeps."""

    def __init__(self, mesh: TriMesh, skeleton: Skeleton, dofmap: DofMap, forms: AssembledForms,
                 cache: Optional[BasisCache] = None, threads: int = 1, check_assumption: bool = True):
        self.mesh, self.skeleton, self.dofmap, self.forms = mesh, skeleton, dofmap, forms
        self.cache = cache if cache is not None else BasisCache()
        self.threads = threads
        self.check = check_assumption
        self._ext: Optional[ExtensionOperators] = None
        self._edges: dict = {}
        self._bubbles: dict = {}
        self._vertices: Optional[VertexBasis] = None

    @classmethod
    def from_problem(cls, mesh, skeleton, problem: HelmholtzProblem, **kw) -> "AcmsContext":
        dofmap, forms = assemble(mesh, problem)
        return cls(mesh, skeleton, dofmap, forms, **kw)

    @property
    def subdomain_ids(self) -> list:
        return [int(j) for j in self.dofmap.subdomain_ids]

    @property
    def extensions(self) -> ExtensionOperators:
        if self._ext is None:
            self._ext = build_extensions(self.forms, self.dofmap, self.threads, self.check)
        return self._ext

    @property
    def vertices(self) -> VertexBasis:
        if self._vertices is None:
            self._vertices = vertex_traces(self.mesh, self.skeleton, self.dofmap)
        return self._vertices

    def edge_modes(self, k: int, count) -> EdgeModes:
        full = self._edges.get(k)
        if full is None:
            e = self.skeleton.edges[k]
            full = compute_edge_modes(self.mesh, e, MAX, self.dofmap.dofs(e.interior_nodes), k)
            self._edges[k] = full
        if count == MAX:
            return full
        if count > full.count:
            raise ValueError(f"edge {k}: {count} modes requested, {full.count} interior nodes")
        return full.head(count)

    def bubble_modes(self, j: int, count) -> BubbleModes:
        dofs = self.dofmap.interior[j]
        n = len(dofs)
        count = n if count == MAX else int(count)
        if count > n:
            raise ValueError(f"subdomain {j}: {count} bubbles requested, {n} interior dofs")
        have = self._bubbles.get(j)
        if have is None or have.count < count:
            have = compute_bubble_modes(restrict(self.forms, dofs), count, j, self.cache)
            self._bubbles[j] = have
        return BubbleModes(j, dofs, have.values[:count], have.vectors[:, :count])

    def prepare(self, S_B: Sequence[Counts] = (), S_Gamma: Sequence[Counts] = ()) -> None:
        """Precompute bubbles for the largest requested counts so sweeps slice one computation."""
        ids = self.subdomain_ids
        best = {j: 0 for j in ids}
        for s in S_B:
            for j, c in _expand_counts(s, ids, "S_B").items():
                n = len(self.dofmap.interior[j])
                c = n if c == MAX else c
                best[j] = max(best[j], c)

        def work(j):
            if best[j]:
                self.bubble_modes(j, best[j])
        with ThreadPoolExecutor(max_workers=max(1, self.threads)) as pool:
            list(pool.map(work, ids))

    def bubble_limits(self) -> dict:
        return {j: len(self.dofmap.interior[j]) for j in self.subdomain_ids}

    def edge_limits(self) -> dict:
        return {k: len(e.interior_nodes) for k, e in enumerate(self.skeleton.edges)}

    def bubbles(self, S_B: Counts, clamp: bool = False) -> BubbleBasis:
        counts = _expand_counts(S_B, self.subdomain_ids, "S_B")
        if clamp:
            counts = _clamp(counts, self.bubble_limits())
        return BubbleBasis({j: self.bubble_modes(j, c) for j, c in counts.items()})

    def build_space(self, S_B: Counts, S_Gamma: Counts, clamp: bool = False) -> AcmsSpace:
        """Assemble G. With ``clamp`` counts above the available dimension are reduced to it."""
        n = self.dofmap.n_dofs
        bub = self.bubbles(S_B, clamp)
        ecounts = _expand_counts(S_Gamma, list(range(self.skeleton.n_edges)), "S_Gamma")
        if clamp:
            ecounts = _clamp(ecounts, self.edge_limits())
        emodes = [self.edge_modes(k, c) for k, c in ecounts.items()]

        origins = []
        rows, cols, vals = [], [], []
        col = 0
        for j in sorted(bub.modes):
            m = bub.modes[j]
            for i in range(m.count):
                rows.append(m.dofs)
                cols.append(np.full(len(m.dofs), col))
                vals.append(m.vectors[:, i])
                origins.append(("bubble", j, i + 1))
                col += 1
        n_bubble = col

        # traces on the skeleton, one column per interface basis function
        t_rows, t_cols, t_vals = [], [], []
        for m in emodes:
            for i in range(m.count):
                t_rows.append(m.dofs)
                t_cols.append(np.full(len(m.dofs), col - n_bubble))
                t_vals.append(m.vectors[:, i])
                origins.append(("edge", m.edge, i + 1))
                col += 1
        n_edge = col - n_bubble
        for tr in self.vertices.traces:
            t_rows.append(tr.dofs)
            t_cols.append(np.full(len(tr.dofs), col - n_bubble))
            t_vals.append(tr.values)
            origins.append(("vertex", tr.node, 0))
            col += 1
        n_iface = col - n_bubble
        n_vertex = n_iface - n_edge

        if n_iface:
            T = sp.csr_matrix((np.concatenate(t_vals), (np.concatenate(t_rows), np.concatenate(t_cols))),
                              shape=(n, n_iface))
            T.eliminate_zeros()
            rows.append(T.tocoo().row)
            cols.append(T.tocoo().col + n_bubble)
            vals.append(T.tocoo().data)
            for j in self.subdomain_ids:
                loc = self.extensions[j]
                TB = T[loc.boundary]
                touched = np.flatnonzero(np.diff(TB.tocsc().indptr))
                if len(touched) == 0 or len(loc.interior) == 0:
                    continue
                X = harmonic_extension(self.extensions, j, TB[:, touched].toarray())
                r, c = np.nonzero(X)
                rows.append(loc.interior[r])
                cols.append(touched[c] + n_bubble)
                vals.append(X[r, c])

        G = sp.csc_matrix((np.concatenate(vals) if vals else np.zeros(0),
                           (np.concatenate(rows).astype(np.int64) if rows else np.zeros(0, np.int64),
                            np.concatenate(cols).astype(np.int64) if cols else np.zeros(0, np.int64))),
                          shape=(n, col))
        return AcmsSpace(G, n_bubble, n_edge, n_vertex, origins, bub, emodes)

    def solve(self, S_B: Counts, S_Gamma: Counts, clamp: bool = False) -> "AcmsSolution":
        space = self.build_space(S_B, S_Gamma, clamp)
        return solve_space(self.forms, space)


# ---------------------------------------------------------------------------
# solves

def solve_bubble_component(forms: AssembledForms, bubbles: BubbleBasis) -> dict:
    """Coefficients ``F(b_i^j) / (lam_i^j - 1)``; the bubble system is diagonal."""
    out = {}
    for j, m in bubbles.modes.items():
        Fb = m.vectors.T @ forms.F[m.dofs]
        out[j] = Fb / (m.values - 1.0)
    return out


def reduced_interface_system(forms: AssembledForms, G_iface) -> tuple[np.ndarray, np.ndarray]:
    HG = forms.H @ G_iface
    Hr = (G_iface.T @ HG)
    Hr = Hr.toarray() if sp.issparse(Hr) else np.asarray(Hr)
    rhs = G_iface.T @ forms.F
    return Hr, np.asarray(rhs).ravel()


def solve_interface_component(forms: AssembledForms, G_iface) -> tuple[np.ndarray, float]:
    """Dense Galerkin solve on the interface space; returns coefficients and smallest pivot."""
    Hr, rhs = reduced_interface_system(forms, G_iface)
    return dense_lu_solve(Hr, rhs)


@dataclass(frozen=True, eq=False)
class AcmsSolution:
    u: np.ndarray
    u_bubble: np.ndarray
    u_interface: np.ndarray
    bubble_coefficients: dict
    interface_coefficients: np.ndarray
    space: AcmsSpace
    min_pivot: float = np.inf
    extra: dict = field(default_factory=dict)

    @property
    def bubble_vector(self) -> np.ndarray:
        parts = [self.bubble_coefficients[j] for j in sorted(self.bubble_coefficients)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def solve_space(forms: AssembledForms, space: AcmsSpace) -> AcmsSolution:
    cB = solve_bubble_component(forms, space.bubbles)
    cB_vec = (np.concatenate([cB[j] for j in sorted(cB)]) if cB else np.zeros(0)).astype(complex)
    u_B = space.G_bubble @ cB_vec if space.n_bubble else np.zeros(forms.n, dtype=complex)
    if space.n_edge + space.n_vertex:
        cG, piv = solve_interface_component(forms, space.G_interface)
        u_G = space.G_interface @ cG
    else:
        cG, piv = np.zeros(0, dtype=complex), np.inf
        u_G = np.zeros(forms.n, dtype=complex)
    return AcmsSolution(u_B + u_G, u_B, u_G, cB, cG, space, piv)


def build_space(mesh: TriMesh, forms: AssembledForms, skeleton: Skeleton, S_B: Counts, S_Gamma: Counts,
                dofmap: DofMap, **kw) -> AcmsSpace:
    return AcmsContext(mesh, skeleton, dofmap, forms, **kw).build_space(S_B, S_Gamma)


def acms_solve(mesh: TriMesh, problem: HelmholtzProblem, S_B: Counts, S_Gamma: Counts,
               skeleton: Optional[Skeleton] = None, **kw) -> AcmsSolution:
    from .mesh import extract_skeleton

    if skeleton is None:
        skeleton = extract_skeleton(mesh)
    return AcmsContext.from_problem(mesh, skeleton, problem, **kw).solve(S_B, S_Gamma)


def coupled_solve(forms: AssembledForms, space: AcmsSpace) -> np.ndarray:
    """One Galerkin system over the whole space (no decoupling); used as an oracle."""
    c, _ = dense_lu_solve(*reduced_interface_system(forms, space.G))
    return space.G @ c


# ---------------------------------------------------------------------------
# diagnostics

def orthogonality_defect(forms: AssembledForms, space: AcmsSpace) -> float:
    """Largest ``|sesH(g, b)| / (||g||_P ||b||_P)`` over interface columns g and bubbles b (both orders)."""
    if space.n_bubble == 0 or space.n_edge + space.n_vertex == 0:
        return 0.0
    GB, GG = space.G_bubble, space.G_interface
    H = forms.H
    P = (forms.A + forms.M).tocsr()
    nB = np.sqrt(np.abs((GB.T @ (P @ GB)).diagonal()))
    nG = np.sqrt(np.abs((GG.T @ (P @ GG)).diagonal()))
    scale = np.outer(nB, nG)
    m1 = np.abs((GB.T @ (H @ GG)).toarray()) / scale        # sesH(g, b)
    m2 = np.abs((GG.T @ (H @ GB)).toarray()).T / scale      # sesH(b, g)
    return float(max(m1.max(), m2.max()))


def gram_min_eigenvalue(space: AcmsSpace, forms: AssembledForms) -> float:
    P = (forms.A + forms.M).tocsr()
    Gm = (space.G.T @ (P @ space.G)).toarray()
    d = 1.0 / np.sqrt(np.diag(Gm))
    return float(np.linalg.eigvalsh(d[:, None] * Gm * d[None, :]).min())
