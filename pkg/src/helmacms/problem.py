"""Coefficient fields, sources and the four experiment scenarios."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .mesh import GeometrySpec, TriMesh

Field = Union[float, Callable[[np.ndarray], np.ndarray]]
Source = Callable[[np.ndarray], np.ndarray]


class ProblemError(ValueError):
    pass


def _zero(x: np.ndarray) -> np.ndarray:
    return np.zeros(x.shape[:-1], dtype=complex)


def sample(value: Field, points: np.ndarray) -> np.ndarray:
    """Evaluate a scalar-or-callable field at ``points`` of shape ``(..., 2)``."""
    if callable(value):
        return np.asarray(value(points), dtype=float)
    return np.full(points.shape[:-1], float(value))


@dataclass(frozen=True)
class HelmholtzProblem:
    """``-div(a grad u) - kappa^2 u = f`` with ``a du/dn - i omega beta u = g`` on the Robin part.

    ``a``, ``c`` and ``beta`` are constants or callables; callables are sampled
    at triangle centroids (Robin edge midpoints for ``beta``). Sources are
    evaluated at quadrature points.
    """

    geometry: GeometrySpec
    omega: float
    a: Field = 1.0
    c: Field = 1.0
    beta: Field = 1.0
    f: Source = _zero
    g: Source = _zero
    name: str = "custom"
    f_is_zero: bool = False

    def __post_init__(self):
        if not self.omega > 0:
            raise ProblemError("omega must be positive")

    def coefficients(self, mesh: TriMesh) -> tuple[np.ndarray, np.ndarray]:
        """Per-triangle ``a`` and ``kappa^2 = (omega/c)^2``."""
        xc = mesh.centroids()
        a = sample(self.a, xc)
        c = sample(self.c, xc)
        if not (np.all(np.isfinite(a)) and a.min() > 0):
            raise ProblemError(f"diffusion coefficient must be uniformly positive (min {a.min():g})")
        if not (np.all(np.isfinite(c)) and c.min() > 0):
            raise ProblemError(f"wave speed must be uniformly positive (min {c.min():g})")
        return a, (self.omega / c) ** 2

    def robin_weight(self, midpoints: np.ndarray) -> np.ndarray:
        """``omega * beta`` on Robin edges; beta must be of one sign and not vanish."""
        beta = sample(self.beta, midpoints)
        if len(beta):
            if np.all(beta == 0):
                raise ProblemError("beta vanishes on the whole Robin boundary")
            if beta.min() < 0 < beta.max():
                raise ProblemError("beta must not change sign")
        return self.omega * beta


@dataclass(frozen=True)
class ExactSolution:
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    available: bool = True


def gaussian(center: Sequence[float], width: float) -> Source:
    """``exp(-width |x - center|^2)``."""
    xc = np.asarray(center, dtype=float)

    def f(x):
        d = x - xc
        return np.exp(-width * np.einsum("...i,...i->...", d, d)).astype(complex)
    return f


def plane_wave_gaussian(center: Sequence[float], width: float, k: Sequence[float]) -> Source:
    """``exp(-i k.x) exp(-width |x - center|^2)``."""
    kv = np.asarray(k, dtype=float)
    env = gaussian(center, width)

    def g(x):
        return np.exp(-1j * (x @ kv)) * env(x)
    return g


def plane_wave(k: Sequence[float]) -> ExactSolution:
    kv = np.asarray(k, dtype=float)

    def value(x):
        return np.exp(-1j * (x @ kv))

    def gradient(x):
        return (-1j * value(x))[..., None] * kv
    return ExactSolution(value, gradient)


# ---------------------------------------------------------------------------
# scenarios

def scenario_plane_wave(kappa: float, resolution: int = 4) -> tuple[HelmholtzProblem, ExactSolution]:
    """Plane wave ``exp(-i k.x)``, ``k = kappa (0.6, 0.8)``, on the unit disc."""
    if not kappa > 0:
        raise ProblemError("kappa must be positive")
    k = kappa * np.array([0.6, 0.8])
    exact = plane_wave(k)

    def g(x):
        n = x / np.linalg.norm(x, axis=-1, keepdims=True)
        return (-1j * (n @ k) - 1j * kappa) * exact.value(x)

    problem = HelmholtzProblem(GeometrySpec.unit_disc_8(resolution), omega=kappa, g=g,
                               name="plane_wave", f_is_zero=True)
    return problem, exact


def scenario_interior_source(kappa: float = 1.0, resolution: int = 4) -> HelmholtzProblem:
    return HelmholtzProblem(GeometrySpec.unit_disc_8(resolution), omega=kappa,
                            f=gaussian((1 / 3, 1 / 3), 200.0), name="interior_source")


def scenario_boundary_source(kappa: float = 16.0, resolution: int = 4) -> HelmholtzProblem:
    xc = (-1 / np.sqrt(2), 1 / np.sqrt(2))
    return HelmholtzProblem(GeometrySpec.unit_disc_8(resolution), omega=kappa,
                            g=gaussian(xc, 200.0), name="boundary_source", f_is_zero=True)


CRYSTAL_CELLS = 9
CRYSTAL_INCLUSION = 2 / 27


def crystal_coefficient(defects: Sequence[tuple[int, int]] = (), a_inclusion: float = 12.0,
                        n: int = CRYSTAL_CELLS, side: float = CRYSTAL_INCLUSION):
    """Square inclusion of side ``side`` centred in each cell, cells ``(i, j)`` in ``defects`` left empty."""
    defects = {tuple(d) for d in defects}
    h = 1.0 / n

    def a(x):
        i = np.clip(np.floor(x[..., 0] / h).astype(int), 0, n - 1)
        j = np.clip(np.floor(x[..., 1] / h).astype(int), 0, n - 1)
        cx, cy = (i + 0.5) * h, (j + 0.5) * h
        inside = (np.abs(x[..., 0] - cx) < side / 2) & (np.abs(x[..., 1] - cy) < side / 2)
        if defects:
            hole = np.array([(ii, jj) in defects for ii, jj in zip(i.ravel(), j.ravel())]).reshape(i.shape)
            inside &= ~hole
        return np.where(inside, a_inclusion, 1.0)
    return a


def scenario_crystal(kappa: float = 100.0, defects: Sequence[tuple[int, int]] = (),
                     resolution: int = 6) -> HelmholtzProblem:
    """Periodic structure on the 9x9-cell unit square.

    ``resolution`` must be a multiple of 6 so that inclusion boundaries are mesh lines.
    """
    if resolution % 6:
        raise ProblemError("crystal resolution must be a multiple of 6")
    g = plane_wave_gaussian((0.0, 0.5), 100.0, (kappa, 0.0))
    return HelmholtzProblem(GeometrySpec.unit_square_grid(CRYSTAL_CELLS, resolution), omega=kappa,
                            a=crystal_coefficient(defects), g=g, name="crystal", f_is_zero=True)


# ---------------------------------------------------------------------------
# config-driven problems

def named_source(spec: Optional[Mapping]) -> tuple[Source, bool]:
    """Build a source from ``{"name": ..., ...}``; returns (callable, is_zero)."""
    if spec is None or spec.get("name", "zero") == "zero":
        return _zero, True
    name = spec["name"]
    if name == "gaussian":
        return gaussian(spec["center"], spec["width"]), False
    if name == "plane_wave_gaussian":
        return plane_wave_gaussian(spec["center"], spec["width"], spec["k"]), False
    raise ProblemError(f"unknown source {name!r}")


def piecewise_by_subdomain(values: Mapping[int, float], default: float, geometry: GeometrySpec):
    """Per-subdomain constant field, located by a coarse-mesh lookup."""
    from .mesh import coarse_mesh

    if not values:
        return default
    coarse = coarse_mesh(geometry)
    tri = coarse.vertices[coarse.triangles]
    table = {int(k): float(v) for k, v in values.items()}

    def field_(x):
        flat = x.reshape(-1, 2)
        out = np.full(len(flat), float(default))
        for t, s in zip(tri, coarse.subdomain):
            if int(s) not in table:
                continue
            out[_in_triangle(flat, t)] = table[int(s)]
        return out.reshape(x.shape[:-1])
    return field_


def _in_triangle(p, t, eps=1e-12):
    a, b, c = t
    m = np.array([b - a, c - a]).T
    lam = np.linalg.solve(m, (p - a).T).T
    return (lam[:, 0] >= -eps) & (lam[:, 1] >= -eps) & (lam.sum(axis=1) <= 1 + eps)


@dataclass(frozen=True)
class ScenarioSetup:
    problem: HelmholtzProblem
    exact: Optional[ExactSolution] = None
    extra: dict = field(default_factory=dict)


def build_scenario(name: str, params: Mapping, resolution: Optional[int] = None) -> ScenarioSetup:
    params = dict(params)
    kw = {} if resolution is None else {"resolution": resolution}
    if name == "plane_wave":
        problem, exact = scenario_plane_wave(params.get("kappa", 1.0), **kw)
        return ScenarioSetup(problem, exact)
    if name == "interior_source":
        return ScenarioSetup(scenario_interior_source(params.get("kappa", 1.0), **kw))
    if name == "boundary_source":
        return ScenarioSetup(scenario_boundary_source(params.get("kappa", 16.0), **kw))
    if name == "crystal":
        defects = [tuple(d) for d in params.get("defects", [])]
        return ScenarioSetup(scenario_crystal(params.get("kappa", 100.0), defects, **kw))
    if name == "custom":
        geo = params.get("geometry", "unit_disc_8")
        if geo == "unit_disc_8":
            geometry = GeometrySpec.unit_disc_8(resolution or 4)
        elif geo == "unit_square_grid":
            geometry = GeometrySpec.unit_square_grid(int(params.get("n", 1)), resolution or 1)
        else:
            raise ProblemError(f"unsupported geometry {geo!r}")
        f, fz = named_source(params.get("f"))
        g, _ = named_source(params.get("g"))
        a = piecewise_by_subdomain(params.get("a", {}), params.get("a_default", 1.0), geometry)
        c = piecewise_by_subdomain(params.get("c", {}), params.get("c_default", 1.0), geometry)
        problem = HelmholtzProblem(geometry, omega=float(params.get("omega", params.get("kappa", 1.0))),
                                   a=a, c=c, beta=float(params.get("beta", 1.0)), f=f, g=g,
                                   name="custom", f_is_zero=fz)
        return ScenarioSetup(problem)
    raise ProblemError(f"unknown scenario {name!r}")
