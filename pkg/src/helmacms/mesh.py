"""Triangulations, uniform refinement and the domain-decomposition skeleton.

Two geometries are supported:

* ``unit_disc_8``: the unit disc split by an inscribed square (corners on the
  circle) and the coordinate axes into four triangles plus four circular
  segments, giving 8 subdomains.
* ``unit_square_grid``: the unit square split into ``n x n`` square cells.

The skeleton follows the usual ACMS convention: every subdomain boundary that
is not Dirichlet belongs to the interface, including Robin parts of the outer
boundary. With Robin conditions on the whole boundary this yields 12 edges and
5 vertices for the disc and 180 edges and 100 vertices for the 9x9 grid.
"""
from __future__ import annotations

import hashlib
import io
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DIRICHLET = "D"
ROBIN = "R"
EXTERIOR = 0  # pseudo subdomain id on the far side of a boundary edge


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class GeometrySpec:
    """Which domain to mesh and how.

    ``resolution`` is the number of coarse segments along each subdomain
    edge; ``dirichlet`` optionally maps boundary-edge midpoints ``(m, 2)`` to a
    boolean mask selecting Dirichlet edges (everything else is Robin).
    """

    kind: str
    n: int = 1
    resolution: int = 4
    dirichlet: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False)

    @classmethod
    def unit_disc_8(cls, resolution: int = 4, dirichlet=None) -> "GeometrySpec":
        return cls("unit_disc_8", 1, resolution, dirichlet)

    @classmethod
    def unit_square_grid(cls, n: int, resolution: int = 1, dirichlet=None) -> "GeometrySpec":
        return cls("unit_square_grid", n, resolution, dirichlet)

    def project(self, points: np.ndarray) -> np.ndarray:
        """Map new boundary points back onto the exact boundary."""
        if self.kind == "unit_disc_8":
            r = np.hypot(points[:, 0], points[:, 1])
            return points / r[:, None]
        return points


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray          # (N, 2) float
    triangles: np.ndarray         # (T, 3) int, counterclockwise
    subdomain: np.ndarray         # (T,) int, ids 1..J
    boundary_edges: np.ndarray    # (B, 2) int
    boundary_markers: np.ndarray  # (B,) str, "D" or "R"
    corners: tuple = ()           # geometric corner vertices (forced skeleton vertices)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def subdomain_ids(self) -> np.ndarray:
        return np.unique(self.subdomain)

    @property
    def n_subdomains(self) -> int:
        return len(self.subdomain_ids)

    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    def boundary_midpoints(self) -> np.ndarray:
        return self.vertices[self.boundary_edges].mean(axis=1)

    def dirichlet_vertices(self) -> np.ndarray:
        sel = self.boundary_markers == DIRICHLET
        return np.unique(self.boundary_edges[sel].ravel())

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges.ravel())

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique undirected edges ``(E, 2)`` and the triangle-to-edge map ``(T, 3)``.

        Local edge ``k`` of a triangle is opposite to its local vertex ``k``.
        """
        t = self.triangles
        e = np.concatenate([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]])
        e.sort(axis=1)
        uniq, inv = np.unique(e, axis=0, return_inverse=True)
        return uniq, inv.reshape(3, -1).T

    def fingerprint(self) -> str:
        h = hashlib.sha1()
        for arr in (self.vertices, self.triangles, self.subdomain, self.boundary_edges):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update("".join(self.boundary_markers.tolist()).encode())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class InterfaceEdge:
    nodes: np.ndarray        # ordered mesh-vertex chain, endpoints included
    subdomains: tuple        # adjacent subdomain ids; 1 entry for Robin boundary edges
    arclength: float

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def on_boundary(self) -> bool:
        return len(self.subdomains) == 1


@dataclass(frozen=True)
class InterfaceVertex:
    node: int
    adjacent_edges: tuple


@dataclass(frozen=True, eq=False)
class Skeleton:
    edges: list
    vertices: list

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)


# ---------------------------------------------------------------------------
# construction

def _merge(triangles: list, labels: list, tol: float = 1e-9):
    """Build a conforming mesh from triangles given by coordinates."""
    pts = np.asarray(triangles, dtype=float).reshape(-1, 2)
    keys = np.round(pts / tol).astype(np.int64)
    _, first, inv = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    vertices = pts[first]
    tri = inv.reshape(-1, 3)
    return vertices, tri, np.asarray(labels, dtype=np.int64)


def _grid_triangle(a, b, c, n):
    """Structured subdivision of triangle abc into n^2 similar triangles."""
    a, b, c = map(np.asarray, (a, b, c))

    def pt(i, j):
        return a + (b - a) * i / n + (c - a) * j / n

    out = []
    for j in range(n):
        for i in range(n - j):
            out.append((pt(i, j), pt(i + 1, j), pt(i, j + 1)))
            if i + j < n - 1:
                out.append((pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)))
    return out


def _segment_strip(theta0, theta1, n):
    """Triangles filling the circular segment between a chord and its arc."""
    c0 = np.array([np.cos(theta0), np.sin(theta0)])
    c1 = np.array([np.cos(theta1), np.sin(theta1)])
    chord = [c0 + (c1 - c0) * k / n for k in range(n + 1)]
    arc = [np.array([np.cos(t), np.sin(t)])
           for t in np.linspace(theta0, theta1, n + 1)]
    arc[0], arc[-1] = chord[0], chord[-1]
    out = []
    for k in range(n):
        # chord is on the inner side; keep counterclockwise orientation
        if k == 0:
            out.append((chord[0], arc[1], chord[1]))
        elif k == n - 1:
            out.append((chord[k], arc[k], chord[k + 1]))
        else:
            out.append((chord[k], arc[k], arc[k + 1]))
            out.append((chord[k], arc[k + 1], chord[k + 1]))
    return out


def _coarse_disc(resolution: int):
    n = max(int(resolution), 2)
    tris, labels = [], []
    origin = np.zeros(2)
    for q in range(4):
        t0, t1 = q * np.pi / 2, (q + 1) * np.pi / 2
        p0 = np.array([np.cos(t0), np.sin(t0)]).round(15)
        p1 = np.array([np.cos(t1), np.sin(t1)]).round(15)
        for tr in _grid_triangle(origin, p0, p1, n):
            tris.append(tr)
            labels.append(q + 1)
        for tr in _segment_strip(t0, t1, n):
            tris.append(tr)
            labels.append(q + 5)
    v, t, s = _merge(tris, labels)
    # snap arc points to the circle exactly
    r = np.hypot(v[:, 0], v[:, 1])
    on = np.abs(r - 1) < 1e-6
    v[on] /= r[on, None]
    return v, t, s, ()


def _coarse_square(n: int, resolution: int):
    m = n * max(int(resolution), 1)
    h = 1.0 / m
    tris, labels = [], []
    for i in range(m):
        for j in range(m):
            x0, y0 = i * h, j * h
            lab = (j // resolution) * n + (i // resolution) + 1
            a, b, c, d = (x0, y0), (x0 + h, y0), (x0 + h, y0 + h), (x0, y0 + h)
            tris += [(a, b, c), (a, c, d)]
            labels += [lab, lab]
    v, t, s = _merge(tris, labels)
    corners = []
    for cx, cy in [(0, 0), (1, 0), (1, 1), (0, 1)]:
        corners.append(int(np.argmin(np.hypot(v[:, 0] - cx, v[:, 1] - cy))))
    return v, t, s, tuple(sorted(corners))


def _orient(vertices, triangles):
    p = vertices[triangles]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    triangles = triangles.copy()
    triangles[neg] = triangles[neg][:, [0, 2, 1]]
    return triangles


def _boundary_edges(triangles):
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    key = np.sort(e, axis=1)
    _, inv, cnt = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    return e[cnt[inv.ravel()] == 1]


def _make_mesh(vertices, triangles, subdomain, corners, geometry) -> TriMesh:
    triangles = _orient(vertices, triangles)
    bedges = _boundary_edges(triangles)
    markers = np.full(len(bedges), ROBIN)
    if geometry.dirichlet is not None and len(bedges):
        mid = vertices[bedges].mean(axis=1)
        markers[np.asarray(geometry.dirichlet(mid), dtype=bool)] = DIRICHLET
    return TriMesh(vertices, triangles, subdomain, bedges, markers, tuple(corners))


def coarse_mesh(geometry: GeometrySpec) -> TriMesh:
    if geometry.kind == "unit_disc_8":
        v, t, s, corners = _coarse_disc(geometry.resolution)
    elif geometry.kind == "unit_square_grid":
        if geometry.n < 1:
            raise MeshError("unit_square_grid needs n >= 1")
        v, t, s, corners = _coarse_square(geometry.n, geometry.resolution)
    else:
        raise MeshError(f"unsupported geometry kind {geometry.kind!r}")
    return _make_mesh(v, t, s, corners, geometry)


def generate(geometry: GeometrySpec, refinements: int = 0) -> tuple[TriMesh, Skeleton]:
    if refinements < 0:
        raise MeshError("refinements must be nonnegative")
    mesh = coarse_mesh(geometry)
    for _ in range(refinements):
        mesh = refine_uniform(mesh, geometry)
    return mesh, extract_skeleton(mesh)


def refine_uniform(mesh: TriMesh, geometry: GeometrySpec) -> TriMesh:
    """Red refinement: every triangle is split into four via its edge midpoints."""
    edges, t2e = mesh.edges()
    nv = mesh.n_vertices
    mid = mesh.vertices[edges].mean(axis=1)

    # boundary edges -> index into the unique edge list
    lookup = {tuple(e): k for k, e in enumerate(edges.tolist())}
    bidx = np.array([lookup[tuple(sorted(e))] for e in mesh.boundary_edges.tolist()], dtype=np.int64)
    if len(bidx):
        mid[bidx] = geometry.project(mid[bidx])

    vertices = np.vstack([mesh.vertices, mid])
    t = mesh.triangles
    m = t2e + nv  # m[:, k] is the midpoint opposite local vertex k
    new_t = np.concatenate([
        np.column_stack([t[:, 0], m[:, 2], m[:, 1]]),
        np.column_stack([m[:, 2], t[:, 1], m[:, 0]]),
        np.column_stack([m[:, 1], m[:, 0], t[:, 2]]),
        np.column_stack([m[:, 0], m[:, 1], m[:, 2]]),
    ])
    new_s = np.tile(mesh.subdomain, 4)

    bm = bidx + nv
    be = mesh.boundary_edges
    new_be = np.concatenate([np.column_stack([be[:, 0], bm]), np.column_stack([bm, be[:, 1]])])
    new_mk = np.concatenate([mesh.boundary_markers, mesh.boundary_markers])
    return TriMesh(vertices, new_t, new_s, new_be, new_mk, mesh.corners)


def mesh_size(mesh: TriMesh) -> float:
    """Largest edge length of the triangulation."""
    if mesh.n_triangles == 0:
        raise MeshError("empty mesh")
    edges, _ = mesh.edges()
    d = mesh.vertices[edges[:, 1]] - mesh.vertices[edges[:, 0]]
    return float(np.hypot(d[:, 0], d[:, 1]).max())


def subdomains_connected(mesh: TriMesh) -> bool:
    edges, t2e = mesh.edges()
    tri = np.repeat(np.arange(mesh.n_triangles), 3)
    e = t2e.ravel()
    g = coo_matrix((np.ones_like(e), (tri, e)), shape=(mesh.n_triangles, len(edges))).tocsr()
    adj = (g @ g.T).tocoo()
    for j in mesh.subdomain_ids:
        sel = mesh.subdomain == j
        keep = sel[adj.row] & sel[adj.col]
        idx = np.flatnonzero(sel)
        remap = -np.ones(mesh.n_triangles, dtype=np.int64)
        remap[idx] = np.arange(len(idx))
        sub = coo_matrix((np.ones(keep.sum()), (remap[adj.row[keep]], remap[adj.col[keep]])),
                         shape=(len(idx), len(idx)))
        if connected_components(sub, directed=False)[0] != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# skeleton

def extract_skeleton(mesh: TriMesh) -> Skeleton:
    """Split the interface into maximal node chains between interface vertices."""
    t = mesh.triangles
    incident = defaultdict(list)
    for k, tri in enumerate(t.tolist()):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            incident[(min(a, b), max(a, b))].append(k)

    bmark = {(min(a, b), max(a, b)): m
             for (a, b), m in zip(mesh.boundary_edges.tolist(), mesh.boundary_markers.tolist())}
    dirichlet = set(mesh.dirichlet_vertices().tolist())

    segments = {}  # (a, b) -> label (sorted tuple of adjacent subdomain ids, 0 = exterior)
    for key, tris in incident.items():
        if len(tris) > 2:
            raise MeshError(f"non-manifold mesh edge {key} shared by {len(tris)} triangles")
        if len(tris) == 2:
            s0, s1 = int(mesh.subdomain[tris[0]]), int(mesh.subdomain[tris[1]])
            if s0 != s1:
                segments[key] = (min(s0, s1), max(s0, s1))
        elif bmark.get(key, ROBIN) == ROBIN:
            segments[key] = (EXTERIOR, int(mesh.subdomain[tris[0]]))

    node_segs = defaultdict(list)
    for key in segments:
        node_segs[key[0]].append(key)
        node_segs[key[1]].append(key)

    corners = set(mesh.corners)
    vertex_nodes = set()
    for node, segs in node_segs.items():
        if node in dirichlet:
            continue
        labels = {segments[s] for s in segs}
        if len(segs) != 2 or len(labels) > 1 or node in corners:
            vertex_nodes.add(node)

    stops = vertex_nodes | dirichlet
    visited = set()
    chains = []

    def walk(start, seg):
        chain = [start]
        node = start
        while True:
            visited.add(seg)
            node = seg[1] if seg[0] == node else seg[0]
            chain.append(node)
            if node in stops:
                return chain
            nxt = [s for s in node_segs[node] if s not in visited]
            if not nxt:
                return chain
            seg = nxt[0]

    for start in sorted(stops):
        for seg in sorted(node_segs.get(start, [])):
            if seg not in visited:
                chains.append((segments[seg], walk(start, seg)))

    # closed loops without any vertex: promote their smallest node
    while len(visited) < len(segments):
        seg = min(s for s in segments if s not in visited)
        start = min(seg)
        vertex_nodes.add(start)
        stops.add(start)
        chains.append((segments[seg], walk(start, seg)))
        for other in sorted(node_segs[start]):
            if other not in visited:
                chains.append((segments[other], walk(start, other)))

    chains.sort(key=lambda c: (c[0], c[1][0], c[1][-1], c[1][1]))
    edges = []
    for label, chain in chains:
        nodes = np.asarray(chain, dtype=np.int64)
        d = np.diff(mesh.vertices[nodes], axis=0)
        subs = tuple(s for s in label if s != EXTERIOR)
        edges.append(InterfaceEdge(nodes, subs, float(np.hypot(d[:, 0], d[:, 1]).sum())))

    adj = defaultdict(list)
    for k, e in enumerate(edges):
        for end in {int(e.nodes[0]), int(e.nodes[-1])}:
            if end in vertex_nodes:
                adj[end].append(k)
    vertices = [InterfaceVertex(p, tuple(adj[p])) for p in sorted(vertex_nodes)]
    return Skeleton(edges, vertices)


# ---------------------------------------------------------------------------
# text format

def write_mesh(mesh: TriMesh, target, values: Optional[np.ndarray] = None) -> None:
    """Write ``acmsmesh 1``; an optional ``values`` block stores a nodal field."""
    out = io.StringIO()
    out.write("acmsmesh 1\n")
    out.write(f"vertices {mesh.n_vertices}\n")
    for x, y in mesh.vertices:
        out.write(f"{x:.17g} {y:.17g}\n")
    out.write(f"triangles {mesh.n_triangles}\n")
    for (i, j, k), s in zip(mesh.triangles.tolist(), mesh.subdomain.tolist()):
        out.write(f"{i} {j} {k} {s}\n")
    out.write(f"bedges {len(mesh.boundary_edges)}\n")
    for (i, j), m in zip(mesh.boundary_edges.tolist(), mesh.boundary_markers.tolist()):
        out.write(f"{i} {j} {m}\n")
    if mesh.corners:
        out.write(f"corners {len(mesh.corners)}\n")
        out.write(" ".join(str(c) for c in mesh.corners) + "\n")
    if values is not None:
        values = np.asarray(values)
        if len(values) != mesh.n_vertices:
            raise MeshError("values block must have one entry per vertex")
        out.write(f"values {len(values)}\n")
        for v in values.astype(complex):
            out.write(f"{v.real:.17g} {v.imag:.17g}\n")
    text = out.getvalue()
    if isinstance(target, (str, Path)):
        Path(target).write_text(text)
    else:
        target.write(text)


def read_mesh(source) -> tuple[TriMesh, Optional[np.ndarray]]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    lines = iter(text.splitlines())

    def header(name):
        parts = next(lines).split()
        if parts[0] != name:
            raise MeshError(f"expected {name!r} block, got {parts[0]!r}")
        return int(parts[1])

    if next(lines).strip() != "acmsmesh 1":
        raise MeshError("not an acmsmesh 1 file")
    nv = header("vertices")
    vertices = np.array([[float(x) for x in next(lines).split()] for _ in range(nv)]).reshape(-1, 2)
    nt = header("triangles")
    rows = np.array([[int(x) for x in next(lines).split()] for _ in range(nt)], dtype=np.int64).reshape(-1, 4)
    nb = header("bedges")
    be, mk = [], []
    for _ in range(nb):
        i, j, m = next(lines).split()
        be.append((int(i), int(j)))
        mk.append(m)
    corners, values = (), None
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "corners":
            corners = tuple(int(c) for c in next(lines).split())
        elif parts[0] == "values":
            n = int(parts[1])
            vals = np.array([[float(x) for x in next(lines).split()] for _ in range(n)])
            values = vals[:, 0] + 1j * vals[:, 1]
    mesh = TriMesh(vertices, rows[:, :3], rows[:, 3],
                   np.asarray(be, dtype=np.int64).reshape(-1, 2), np.asarray(mk, dtype="<U1"), corners)
    return mesh, values


def skeleton_summary(skeleton: Skeleton) -> dict:
    return {
        "n_edges": skeleton.n_edges,
        "n_vertices": skeleton.n_vertices,
        "edges": [{"nodes": len(e.nodes), "subdomains": list(e.subdomains),
                   "arclength": e.arclength} for e in skeleton.edges],
    }

