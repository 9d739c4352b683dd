"""FEM reference solution, nodal interpolation and the error taxonomy.

Error names follow the usual table symbols: ``e0``/``e1`` against the exact
solution, ``e0h``/``e1h`` against the same-mesh FEM solution, ``*hr`` relative
versions, ``*_int`` for the nodal interpolant and ``*_fem`` for the FEM
solution itself. The ``1`` family is the full (unweighted) H1 norm.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .assembly import (AssembledForms, DofMap, energy_norm, mass_matrix, p1_gradients,
                       stiffness_matrix, triangle_rule)
from .linalg import Factorization
from .mesh import TriMesh
from .problem import ExactSolution

RESIDUAL_TOL = 1e-10
ERROR_FIELDS = ("e0", "e1", "e0h", "e1h", "e0hr", "e1hr", "e0_int", "e1_int", "e0_fem", "e1_fem")


class ReferenceError(ValueError):
    pass


def fem_solve(forms: AssembledForms, check: bool = True) -> np.ndarray:
    """Solve ``(A - M - iR) u = F`` by sparse LU."""
    H = forms.H
    u = Factorization(H).solve(forms.F.astype(complex))
    if check:
        nF = np.linalg.norm(forms.F)
        res = np.linalg.norm(H @ u - forms.F)
        if nF > 0 and res > RESIDUAL_TOL * nF:
            raise ReferenceError(f"FEM residual {res / nF:.3e} exceeds {RESIDUAL_TOL:g}")
    return u


def nodal_interpolant(exact: Optional[ExactSolution], mesh: TriMesh, dofmap: Optional[DofMap] = None) -> np.ndarray:
    """Vertex values of the exact solution, restricted to dofs when a dof map is given."""
    if exact is None or not exact.available:
        raise ReferenceError("no exact solution available")
    values = np.asarray(exact.value(mesh.vertices), dtype=complex)
    return values if dofmap is None else dofmap.reduce(values)


class ErrorEvaluator:
    """Unweighted L2 / H1 norms on one mesh; matrices built once and reused."""

    def __init__(self, mesh: TriMesh, dofmap: DofMap, order: int = 4):
        self.mesh, self.dofmap, self.order = mesh, dofmap, order
        keep = dofmap.vertex_of_dof
        self.M0 = sp.csr_matrix(mass_matrix(mesh)[keep][:, keep])
        self.K0 = sp.csr_matrix(stiffness_matrix(mesh)[keep][:, keep])
        self._grads, self._areas = p1_gradients(mesh)
        bary, w = triangle_rule(order)
        self._bary, self._w = bary, w
        self._qpts = np.einsum("qk,tkd->tqd", bary, mesh.vertices[mesh.triangles])

    def nodal_norms(self, v: np.ndarray) -> tuple[float, float]:
        """``(||v||_L2, ||v||_H1)`` of a P1 dof vector, integrated exactly."""
        l2 = max(np.vdot(v, self.M0 @ v).real, 0.0)
        semi = max(np.vdot(v, self.K0 @ v).real, 0.0)
        return math.sqrt(l2), math.sqrt(l2 + semi)

    def exact_errors(self, v: np.ndarray, exact: ExactSolution) -> tuple[float, float]:
        """``(||u - v||_L2, ||u - v||_H1)`` with ``u`` exact, by element quadrature."""
        full = self.dofmap.expand(v)[self.mesh.triangles]                    # (T, 3)
        vh = np.einsum("qk,tk->tq", self._bary, full)
        gh = np.einsum("tk,tkd->td", full, self._grads)                      # (T, 2)
        u = exact.value(self._qpts)
        gu = exact.gradient(self._qpts)
        w = self._w[None, :] * self._areas[:, None]
        l2 = float(np.sum(w * np.abs(u - vh) ** 2))
        semi = float(np.sum(w * np.sum(np.abs(gu - gh[:, None, :]) ** 2, axis=-1)))
        return math.sqrt(l2), math.sqrt(l2 + semi)

    def exact_norms(self, exact: ExactSolution) -> tuple[float, float]:
        return self.exact_errors(np.zeros(self.dofmap.n_dofs, dtype=complex), exact)


@dataclass
class ErrorReport:
    e0: float = math.nan
    e1: float = math.nan
    e0h: float = math.nan
    e1h: float = math.nan
    e0hr: float = math.nan
    e1hr: float = math.nan
    e0_int: float = math.nan
    e1_int: float = math.nan
    e0_fem: float = math.nan
    e1_fem: float = math.nan
    h: float = math.nan
    kappa: float = math.nan
    S_B: int = 0
    S_Gamma: int = 0
    energy_h: float = math.nan      # ||u_S - u_FEM||_P
    bubble_norm: float = math.nan   # ||u_B||_L2
    extra: dict = field(default_factory=dict)

    def errors(self) -> dict:
        return {k: getattr(self, k) for k in ERROR_FIELDS}

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(d.pop("extra"))
        return d


def compute_errors(u: np.ndarray, mesh: TriMesh, dofmap: DofMap, *, u_fem: Optional[np.ndarray] = None,
                   exact: Optional[ExactSolution] = None, forms: Optional[AssembledForms] = None,
                   evaluator: Optional[ErrorEvaluator] = None, **meta) -> ErrorReport:
    """Fill every error entry for which a reference is available."""
    if u_fem is None and exact is None:
        raise ReferenceError("compute_errors needs u_fem or an exact solution")
    ev = evaluator or ErrorEvaluator(mesh, dofmap)
    rep = ErrorReport(**{k: v for k, v in meta.items() if k in ErrorReport.__dataclass_fields__})
    rep.extra.update({k: v for k, v in meta.items() if k not in ErrorReport.__dataclass_fields__})
    if u_fem is not None:
        rep.e0h, rep.e1h = ev.nodal_norms(u - u_fem)
        n0, n1 = ev.nodal_norms(u_fem)
        if n0 <= 0 or n1 <= 0:
            raise ReferenceError("reference FEM solution has zero norm")
        rep.e0hr, rep.e1hr = rep.e0h / n0, rep.e1h / n1
        if forms is not None:
            rep.energy_h = energy_norm(forms, u - u_fem)
    if exact is not None and exact.available:
        rep.e0, rep.e1 = ev.exact_errors(u, exact)
        rep.e0_int, rep.e1_int = ev.exact_errors(nodal_interpolant(exact, mesh, dofmap), exact)
        if u_fem is not None:
            rep.e0_fem, rep.e1_fem = ev.exact_errors(u_fem, exact)
    return rep


# ---------------------------------------------------------------------------
# sweeps

def observed_orders(errors: Sequence[float], params: Sequence[float]) -> list:
    """``log(e_prev/e_next) / log(p_next/p_prev)`` per row; ``None`` for the first row or saturation."""
    if len(errors) != len(params):
        raise ValueError("errors and params differ in length")
    out: list = [None]
    for k in range(1, len(errors)):
        e0, e1 = float(errors[k - 1]), float(errors[k])
        p0, p1 = float(params[k - 1]), float(params[k])
        ok = e0 > 0 and e1 > 0 and math.isfinite(e0) and math.isfinite(e1) and p0 > 0 and p1 > 0 and p0 != p1
        out.append(math.log(e0 / e1) / math.log(p1 / p0) if ok else None)
    return out


@dataclass
class SweepTable:
    key: str                       # name of the sweep parameter
    params: list = field(default_factory=list)
    rows: list = field(default_factory=list)   # ErrorReport per param

    def add(self, param, report: ErrorReport) -> None:
        if self.params and not param > self.params[-1]:
            raise ValueError(f"sweep parameter {self.key} must increase strictly")
        self.params.append(param)
        self.rows.append(report)

    def column(self, name: str) -> list:
        return [getattr(r, name) if hasattr(r, name) else r.extra.get(name, math.nan) for r in self.rows]

    def orders(self, name: str) -> list:
        return observed_orders(self.column(name), self.params)

    def ratios(self, name: str) -> list:
        col = self.column(name)
        return [None] + [col[k - 1] / col[k] if col[k] > 0 else None for k in range(1, len(col))]
