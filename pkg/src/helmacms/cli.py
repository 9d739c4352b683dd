"""Experiment driver: ``solve``, ``sweep``, ``verify`` and ``mesh-dump`` subcommands.

Configs are JSON. Minimal example::

    {"scenario": {"name": "plane_wave", "kappa": 1.0},
     "mesh": {"refinements": 3},
     "acms": {"S_B": 0, "S_Gamma": 8},
     "sweep": {"axis": "S_Gamma", "values": [2, 4, 8, 16], "per": "edge"}}

See ``docs/config.md`` for every field.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from . import __version__
from .acms import (LAMBDA_TOL, MAX, AcmsContext, AssumptionViolation, BasisCache, compute_edge_modes,
                   coupled_solve, orthogonality_defect, solve_space)
from .assembly import assemble
from .linalg import nearest_eigenvalues
from .mesh import (InterfaceEdge, TriMesh, generate, mesh_size, skeleton_summary,
                   subdomains_connected, write_mesh)
from .problem import ProblemError, build_scenario
from .reference import (ERROR_FIELDS, ErrorEvaluator, ErrorReport, SweepTable, compute_errors, fem_solve,
                        observed_orders)

log = logging.getLogger("helmacms")

SCENARIOS = ("plane_wave", "interior_source", "boundary_source", "crystal", "custom")
SWEEP_AXES = ("S_Gamma", "S_B", "kappa", "refinements")
DEFAULT_RESOLUTION = {"crystal": 6}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field = field_name


# ---------------------------------------------------------------------------
# configs

Count = Union[int, str, list, dict]


@dataclass
class ScenarioConfig:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class MeshConfig:
    resolution: Optional[int] = None
    refinements: int = 2


@dataclass
class AcmsConfig:
    S_B: Count = 0
    S_Gamma: Count = 8
    clamp: bool = False


@dataclass
class SweepConfig:
    axis: str = "S_Gamma"
    values: list = field(default_factory=list)
    per: str = "edge"          # "edge"/"subdomain" counts or "total" over all edges/subdomains


@dataclass
class VerifyConfig:
    skeleton: bool = True
    assumption: bool = True
    orthogonality: bool = True
    completeness: bool = True
    coupled: bool = True
    edge_eigs: bool = True
    zero_bubbles: bool = True
    completeness_max_dofs: int = 20000
    inject_fault: Optional[str] = None   # "extension" perturbs one extended column


@dataclass
class ExperimentConfig:
    scenario: ScenarioConfig
    mesh: MeshConfig = field(default_factory=MeshConfig)
    acms: AcmsConfig = field(default_factory=AcmsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    out: str = "out"
    seed: int = 0
    threads: int = 1
    dump_solution: bool = False
    cache_dir: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _check_count(value, name: str) -> Count:
    if value == MAX:
        return value
    if isinstance(value, bool):
        raise ConfigError(name, "expected a count, got a boolean")
    if isinstance(value, int):
        if value < 0:
            raise ConfigError(name, "counts must be nonnegative")
        return value
    if isinstance(value, list):
        return [_check_count(v, f"{name}[{i}]") for i, v in enumerate(value)]
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            try:
                key = int(k)
            except ValueError:
                raise ConfigError(name, f"key {k!r} is not an integer id") from None
            out[key] = _check_count(v, f"{name}.{k}")
        return out
    raise ConfigError(name, f"expected an integer, 'max', a list or a mapping, got {value!r}")


def _section(raw: dict, key: str, cls):
    data = raw.get(key, {})
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(key, "expected an object")
    known = {f.name for f in fields(cls)}
    for k in data:
        if k not in known:
            raise ConfigError(f"{key}.{k}", "unknown field")
    return data


def parse_config(raw: Any) -> ExperimentConfig:
    """Validate a decoded JSON object; errors name the offending field."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected an object")
    top = {f.name for f in fields(ExperimentConfig)}
    for k in raw:
        if k not in top:
            raise ConfigError(k, "unknown field")
    if "scenario" not in raw:
        raise ConfigError("scenario", "missing")
    sc = raw["scenario"]
    if isinstance(sc, str):
        sc = {"name": sc}
    if not isinstance(sc, dict):
        raise ConfigError("scenario", "expected an object")
    if "name" not in sc:
        raise ConfigError("scenario.name", "missing")
    if sc["name"] not in SCENARIOS:
        raise ConfigError("scenario.name", f"unknown scenario {sc['name']!r}; choose from {SCENARIOS}")
    params = {k: v for k, v in sc.items() if k != "name"}
    for key in ("kappa", "omega"):
        if key in params:
            v = params[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError(f"scenario.{key}", "must be a positive number")
    scenario = ScenarioConfig(sc["name"], params)

    m = _section(raw, "mesh", MeshConfig)
    mesh = MeshConfig(**m)
    if mesh.resolution is not None and (not isinstance(mesh.resolution, int) or mesh.resolution < 1):
        raise ConfigError("mesh.resolution", "must be a positive integer")
    if not isinstance(mesh.refinements, int) or mesh.refinements < 0:
        raise ConfigError("mesh.refinements", "must be a nonnegative integer")

    a = _section(raw, "acms", AcmsConfig)
    acms = AcmsConfig(**a)
    acms.S_B = _check_count(acms.S_B, "acms.S_B")
    acms.S_Gamma = _check_count(acms.S_Gamma, "acms.S_Gamma")

    s = _section(raw, "sweep", SweepConfig)
    sweep = SweepConfig(**s)
    if sweep.axis not in SWEEP_AXES:
        raise ConfigError("sweep.axis", f"must be one of {SWEEP_AXES}")
    if sweep.per not in ("edge", "subdomain", "total"):
        raise ConfigError("sweep.per", "must be 'edge', 'subdomain' or 'total'")
    if not isinstance(sweep.values, list):
        raise ConfigError("sweep.values", "expected a list")
    for i, v in enumerate(sweep.values):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"sweep.values[{i}]", "expected a number")
        if sweep.axis in ("S_Gamma", "S_B", "refinements") and (not isinstance(v, int) or v < 0):
            raise ConfigError(f"sweep.values[{i}]", "expected a nonnegative integer")
        if sweep.axis == "kappa" and not v > 0:
            raise ConfigError(f"sweep.values[{i}]", "kappa must be positive")
    if any(b <= a_ for a_, b in zip(sweep.values, sweep.values[1:])):
        raise ConfigError("sweep.values", "must be strictly increasing")

    verify = VerifyConfig(**_section(raw, "verify", VerifyConfig))
    if verify.inject_fault not in (None, "extension"):
        raise ConfigError("verify.inject_fault", "only 'extension' is supported")

    rest = {k: raw[k] for k in ("out", "seed", "threads", "dump_solution", "cache_dir") if k in raw}
    cfg = ExperimentConfig(scenario, mesh, acms, sweep, verify, **rest)
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool):
        raise ConfigError("seed", "must be an integer")
    if not isinstance(cfg.threads, int) or cfg.threads < 1:
        raise ConfigError("threads", "must be a positive integer")
    return cfg


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("<json>", f"{err.msg} at line {err.lineno}, column {err.colno}") from None
    return parse_config(raw)


# ---------------------------------------------------------------------------
# experiment state

@dataclass
class Experiment:
    config: ExperimentConfig
    setup: Any
    mesh: TriMesh
    skeleton: Any
    dofmap: Any
    forms: Any
    context: AcmsContext
    evaluator: ErrorEvaluator
    u_fem: np.ndarray
    timings: dict = field(default_factory=dict)

    @property
    def kappa(self) -> float:
        return float(self.setup.problem.omega)


def prepare(config: ExperimentConfig, kappa: Optional[float] = None, refinements: Optional[int] = None,
            cache: Optional[BasisCache] = None) -> Experiment:
    timings = {}
    t0 = time.perf_counter()
    params = dict(config.scenario.params)
    if kappa is not None:
        params["kappa" if config.scenario.name != "custom" else "omega"] = kappa
    resolution = config.mesh.resolution or DEFAULT_RESOLUTION.get(config.scenario.name)
    try:
        setup = build_scenario(config.scenario.name, params, resolution)
    except ProblemError as err:
        raise ConfigError("scenario", str(err)) from None
    mesh, skeleton = generate(setup.problem.geometry, config.mesh.refinements if refinements is None else refinements)
    timings["mesh"] = time.perf_counter() - t0
    dofmap, forms = assemble(mesh, setup.problem)
    timings["assemble"] = time.perf_counter() - t0 - timings["mesh"]
    t1 = time.perf_counter()
    u_fem = fem_solve(forms)
    timings["fem"] = time.perf_counter() - t1
    if cache is None:
        cache = BasisCache(config.cache_dir)
    ctx = AcmsContext(mesh, skeleton, dofmap, forms, cache=cache, threads=config.threads)
    return Experiment(config, setup, mesh, skeleton, dofmap, forms, ctx, ErrorEvaluator(mesh, dofmap), u_fem, timings)


def _total(counts: Any, n: int) -> int:
    if isinstance(counts, (list, tuple)):
        return int(sum(counts))
    return int(counts) * n


def solve_point(exp: Experiment, S_B: Count, S_Gamma: Count, clamp: bool = False) -> tuple[ErrorReport, Any]:
    t = time.perf_counter()
    sol = exp.context.solve(S_B, S_Gamma, clamp=clamp)
    elapsed = time.perf_counter() - t
    rep = compute_errors(sol.u, exp.mesh, exp.dofmap, u_fem=exp.u_fem, exact=exp.setup.exact,
                         forms=exp.forms, evaluator=exp.evaluator,
                         h=mesh_size(exp.mesh), kappa=exp.kappa,
                         S_B=_total(sol.space.S_B, 1), S_Gamma=_total(sol.space.S_Gamma, 1))
    rep.bubble_norm = exp.evaluator.nodal_norms(sol.u_bubble)[0]
    rep.extra["n_dofs"] = exp.forms.n
    rep.extra["n_basis"] = sol.space.n_basis
    rep.extra["solve_seconds"] = elapsed
    return rep, sol


# ---------------------------------------------------------------------------
# output

CSV_META = ("h", "kappa", "n_dofs", "S_B", "S_Gamma", "n_basis")
CSV_TAIL = ("energy_h", "bubble_norm")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else format(x, ".15g")


def write_report(path: Path, rows: list, key: Optional[str] = None, params: Optional[list] = None,
                 orders: Optional[dict] = None) -> None:
    header = ([f"sweep_{key}"] if key else []) + list(CSV_META) + list(ERROR_FIELDS) + list(CSV_TAIL)
    order_cols = sorted(orders) if orders else []
    header += [f"order_{c}" for c in order_cols]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, r in enumerate(rows):
            d = r.as_dict()
            line = ([fmt(params[k])] if key else []) + [fmt(d.get(c)) for c in CSV_META]
            line += [fmt(d[c]) for c in ERROR_FIELDS] + [fmt(d[c]) for c in CSV_TAIL]
            line += [fmt(orders[c][k]) for c in order_cols]
            w.writerow(line)


def write_series(out: Path, table: SweepTable) -> list:
    """One gnuplot two-column file per error series that has finite values."""
    written = []
    for name in ERROR_FIELDS + CSV_TAIL:
        col = table.column(name)
        if all(isinstance(v, float) and math.isnan(v) for v in col):
            continue
        path = out / f"{name}.dat"
        with open(path, "w") as fh:
            fh.write(f"# {table.key} {name}\n")
            for p, v in zip(table.params, col):
                fh.write(f"{fmt(p)} {fmt(v)}\n")
        written.append(path.name)
    return written


def write_meta(out: Path, config: ExperimentConfig, extra: dict) -> None:
    meta = {"config": config.to_dict(), "version": __version__, "python": platform.python_version(),
            "numpy": np.__version__}
    meta.update(extra)
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")


def _mesh_meta(exp: Experiment) -> dict:
    return {"mesh_fingerprint": exp.mesh.fingerprint(), "n_vertices": exp.mesh.n_vertices,
            "n_dofs": exp.forms.n, "h": mesh_size(exp.mesh), "skeleton": skeleton_summary(exp.skeleton)}


# ---------------------------------------------------------------------------
# commands

def run_solve(config: ExperimentConfig, out: Optional[Path] = None) -> ErrorReport:
    np.random.seed(config.seed)
    exp = prepare(config)
    rep, sol = solve_point(exp, config.acms.S_B, config.acms.S_Gamma, config.acms.clamp)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_report(out / "report.csv", [rep])
        if config.dump_solution:
            write_mesh(exp.mesh, out / "solution.mesh", exp.dofmap.expand(sol.u))
        timings = dict(exp.timings, acms=rep.extra["solve_seconds"])
        write_meta(out, config, {"timings": timings, **_mesh_meta(exp), "min_pivot": sol.min_pivot})
    return rep


def _sweep_counts(config: ExperimentConfig, exp: Experiment, value: int) -> tuple[Count, Count]:
    S_B, S_G = config.acms.S_B, config.acms.S_Gamma
    per = config.sweep.per
    if config.sweep.axis == "S_Gamma":
        S_G = value
        if per == "total":
            ne = exp.skeleton.n_edges
            if value % ne:
                raise ConfigError("sweep.values", f"|S_Gamma| = {value} is not a multiple of {ne} edges")
            S_G = value // ne
    elif config.sweep.axis == "S_B":
        S_B = value
        if per == "total":
            nj = len(exp.context.subdomain_ids)
            if value % nj:
                raise ConfigError("sweep.values", f"|S_B| = {value} is not a multiple of {nj} subdomains")
            S_B = value // nj
    return S_B, S_G


def run_sweep(config: ExperimentConfig, out: Optional[Path] = None) -> SweepTable:
    np.random.seed(config.seed)
    axis = config.sweep.axis
    values = list(config.sweep.values) or [config.acms.S_Gamma if axis == "S_Gamma" else config.acms.S_B]
    table = SweepTable(axis)
    timings: dict = {"points": []}
    cache = BasisCache(config.cache_dir)
    exp = None
    if axis in ("S_Gamma", "S_B"):
        exp = prepare(config, cache=cache)
        timings.update(exp.timings)
        if axis == "S_B":
            exp.context.prepare([_sweep_counts(config, exp, v)[0] for v in values])
    for v in values:
        if axis == "kappa":
            exp = prepare(config, kappa=float(v), cache=cache)
            rep, _ = solve_point(exp, config.acms.S_B, config.acms.S_Gamma, config.acms.clamp)
        elif axis == "refinements":
            exp = prepare(config, refinements=int(v), cache=cache)
            rep, _ = solve_point(exp, config.acms.S_B, config.acms.S_Gamma, config.acms.clamp)
        else:
            S_B, S_G = _sweep_counts(config, exp, int(v))
            rep, _ = solve_point(exp, S_B, S_G, config.acms.clamp)
        timings["points"].append(rep.extra["solve_seconds"])
        table.add(v, rep)
        log.info("%s=%s e0h=%.3e e1h=%.3e", axis, v, rep.e0h, rep.e1h)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        # refinement sweeps order against h, everything else against the parameter itself
        order_params = table.column("h") if axis == "refinements" else table.params
        if axis == "refinements":
            order_params = [1.0 / h for h in order_params]
        orders = {c: observed_orders(table.column(c), order_params) for c in ERROR_FIELDS}
        write_report(out / "report.csv", table.rows, key=axis, params=table.params, orders=orders)
        series = write_series(out, table)
        meta = {"timings": timings, "series": series}
        if exp is not None and axis in ("S_Gamma", "S_B"):
            meta.update(_mesh_meta(exp))
        write_meta(out, config, meta)
    return table


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: measured {fmt(self.value)} bound {fmt(self.bound)} {self.detail}".rstrip()


def straight_edge_check(segments: int = 64, length: float = 1.0, count: int = 8) -> float:
    """Worst relative deviation of 1D edge eigenvalues from ``(i pi / L)^2``."""
    x = np.linspace(0.0, length, segments + 1)
    pts = np.column_stack([x, np.zeros_like(x)])
    mesh = TriMesh(pts, np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64),
                   np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype="<U1"))
    modes = compute_edge_modes(mesh, InterfaceEdge(np.arange(segments + 1), (0, 1), length), count)
    exact = (np.arange(1, count + 1) * np.pi / length) ** 2
    return float(np.max(np.abs(modes.values - exact) / exact))


def run_verify(config: ExperimentConfig) -> list:
    np.random.seed(config.seed)
    vc = config.verify
    results: list = []
    exp = prepare(config)
    ctx = exp.context
    if vc.skeleton:
        ok = exp.skeleton.n_edges > 0 and subdomains_connected(exp.mesh)
        results.append(CheckResult("skeleton", ok, exp.skeleton.n_edges, 1,
                                   f"edges={exp.skeleton.n_edges} vertices={exp.skeleton.n_vertices}"))
    if vc.assumption:
        worst, where = math.inf, ""
        try:
            ctx.bubbles(config.acms.S_B, clamp=True)
            for j in ctx.subdomain_ids:
                I = ctx.dofmap.interior[j]
                near = nearest_eigenvalues(exp.forms.A[I][:, I], exp.forms.M[I][:, I], 1.0)
                d = float(np.min(np.abs(near - 1))) if len(near) else math.inf
                if d < worst:
                    worst, where = d, f"subdomain {j} lambda={fmt(near[np.argmin(np.abs(near - 1))])}"
            results.append(CheckResult("assumption", worst > LAMBDA_TOL, worst, LAMBDA_TOL, where))
        except AssumptionViolation as err:
            results.append(CheckResult("assumption", False, abs(err.value - 1), LAMBDA_TOL,
                                       f"subdomain {err.subdomain} mode {err.index} lambda={fmt(err.value)}"))
            for r in results:
                print(r.line())
            return results
    space = ctx.build_space(config.acms.S_B, config.acms.S_Gamma, clamp=True)
    if vc.inject_fault == "extension" and space.n_bubble and space.n_edge + space.n_vertex:
        G = space.G.tolil()
        col = space.n_bubble
        rows = np.flatnonzero(G[:, col].toarray().ravel() == 0)
        interior = np.intersect1d(rows, ctx.dofmap.interior[space.bubbles.modes[min(space.bubbles.modes)].subdomain])
        G[interior[:1], col] = 1.0
        space = replace(space, G=G.tocsc())
    if vc.orthogonality:
        d = orthogonality_defect(exp.forms, space)
        results.append(CheckResult("orthogonality", d <= 1e-10, d, 1e-10,
                                   f"S_B={space.bubbles.size} S_Gamma={sum(space.S_Gamma)}"))
    if vc.coupled:
        sol = solve_space(exp.forms, space)
        uc = coupled_solve(exp.forms, space)
        rel = exp.evaluator.nodal_norms(sol.u - uc)[0] / max(exp.evaluator.nodal_norms(uc)[0], 1e-300)
        results.append(CheckResult("coupled_oracle", rel <= 1e-9, rel, 1e-9))
        if vc.zero_bubbles and exp.setup.problem.f_is_zero:
            nb = float(np.max(np.abs(sol.bubble_vector))) if len(sol.bubble_vector) else 0.0
            results.append(CheckResult("zero_bubbles", nb == 0.0, nb, 0.0))
    if vc.completeness:
        if exp.forms.n <= vc.completeness_max_dofs:
            sol = ctx.solve(MAX, MAX)
            rel = exp.evaluator.nodal_norms(sol.u - exp.u_fem)[0] / exp.evaluator.nodal_norms(exp.u_fem)[0]
            results.append(CheckResult("completeness", rel <= 1e-8, rel, 1e-8, f"n_dofs={exp.forms.n}"))
        else:
            results.append(CheckResult("completeness", True, math.nan, 1e-8,
                                       f"skipped: {exp.forms.n} dofs > {vc.completeness_max_dofs}"))
    if vc.edge_eigs:
        dev = straight_edge_check()
        results.append(CheckResult("edge_eigs", dev <= 0.05, dev, 0.05, "straight edge, 64 segments, i<=8"))
    betas = [e.beta for e in ctx.extensions.local.values()]
    results.append(CheckResult("inf_sup", min(betas) > 0, min(betas), 0.0, "min beta_j"))
    for r in results:
        print(r.line())
    return results


def run_mesh_dump(config: ExperimentConfig, out: Path) -> dict:
    resolution = config.mesh.resolution or DEFAULT_RESOLUTION.get(config.scenario.name)
    setup = build_scenario(config.scenario.name, config.scenario.params, resolution)
    mesh, skeleton = generate(setup.problem.geometry, config.mesh.refinements)
    out.mkdir(parents=True, exist_ok=True)
    write_mesh(mesh, out / "mesh.txt")
    summary = {"n_vertices": mesh.n_vertices, "n_triangles": mesh.n_triangles, "h": mesh_size(mesh),
               "fingerprint": mesh.fingerprint(), "skeleton": skeleton_summary(skeleton)}
    (out / "skeleton.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="helmacms", description="ACMS experiments for the Helmholtz equation")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "sweep", "verify", "mesh-dump"):
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON experiment config")
        s.add_argument("--out", default=None, help="output directory (overrides config 'out')")
        s.add_argument("--threads", type=int, default=None, help="worker cap for local basis construction")
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return 2
        config.threads = args.threads
    if args.seed is not None:
        config.seed = args.seed
    out = Path(args.out or config.out)
    try:
        if args.command == "solve":
            rep = run_solve(config, out)
            print(f"e0h={fmt(rep.e0h)} e1h={fmt(rep.e1h)} -> {out / 'report.csv'}")
        elif args.command == "sweep":
            table = run_sweep(config, out)
            for p, r in zip(table.params, table.rows):
                print(f"{table.key}={fmt(p)} e0h={fmt(r.e0h)} e1h={fmt(r.e1h)}")
        elif args.command == "verify":
            results = run_verify(config)
            out.mkdir(parents=True, exist_ok=True)
            (out / "verify.json").write_text(json.dumps([asdict(r) for r in results], indent=2,
                                                        default=str) + "\n")
            return 0 if all(r.passed for r in results) else 1
        else:
            summary = run_mesh_dump(config, out)
            sk = summary["skeleton"]
            print(f"vertices={summary['n_vertices']} triangles={summary['n_triangles']} "
                  f"edges={sk['n_edges']} interface_vertices={sk['n_vertices']} -> {out}")
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (AssumptionViolation, ProblemError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
