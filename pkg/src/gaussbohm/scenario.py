"""Declarative scenarios: configs, named presets, runs, lambda sweeps and output files.

A scenario is a TOML document::

    name = "fig7a"
    lambda = [0.0]

    [constants]
    hbar = 1.0
    mass = 1.0

    [potential]
    kind = "harmonic"
    omega = 1.0

    [[packets]]
    x0 = 5.0
    p0 = 0.0
    sigma0 = 0.7071067811865476

    [integration]
    t_final = 6.283185307179586
    dt = 0.002
    store_every = 5

Sections ``ensemble``, ``outputs`` and ``grid`` are optional.  A packet gives
either ``sigma0`` or ``alpha0 = [re, im]``.
"""
from __future__ import annotations

import json
import logging
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib
import tomli_w

from . import __version__, heller
from .core import NATURAL, Constants, DomainError, GaussianState, packet_state
from .heller import IntegrationControls, IntegrationError
from .potentials import Potential
from .potentials import from_config as potential_from_config
from .trajectories import (SuperpositionState, TrajectoryEnsemble, classical_ensemble,
                           classical_initials, closest_approach, default_initials, detect_nodes,
                           integrate_ensemble, non_crossing_audit, quantile_initials)

log = logging.getLogger("gaussbohm")

OUT_ENV = "GAUSSBOHM_OUT"
DEFAULT_OUT = "gaussbohm-out"
MAX_GRID_CELLS = 10_000_000


class ConfigError(DomainError):
    """Invalid scenario; the message starts with the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


# -- config types ----------------------------------------------------------------

@dataclass(frozen=True)
class PacketSpec:
    x0: float
    p0: float = 0.0
    sigma0: float | None = None
    alpha0: complex | None = None

    def state(self, constants: Constants = NATURAL) -> GaussianState:
        if self.alpha0 is not None:
            return packet_state(self.x0, self.p0, self.alpha0, constants)
        return packet_state(self.x0, self.p0, 1j * constants.hbar / (4.0 * self.sigma0**2),
                            constants)

    def to_dict(self):
        d = {"x0": self.x0, "p0": self.p0}
        if self.sigma0 is not None:
            d["sigma0"] = self.sigma0
        else:
            d["alpha0"] = [self.alpha0.real, self.alpha0.imag]
        return d


@dataclass(frozen=True)
class IntegrationSpec:
    t_final: float
    dt: float = 1e-3
    store_every: int = 1

    def controls(self, lam: float) -> IntegrationControls:
        return IntegrationControls(self.t_final, self.dt, lam, self.store_every)

    def to_dict(self):
        return {"t_final": self.t_final, "dt": self.dt, "store_every": self.store_every}


@dataclass(frozen=True)
class EnsembleSpec:
    count: int = 15
    span: float = 2.5
    placement: str = "uniform"  # or "quantile"

    def to_dict(self):
        return {"count": self.count, "span": self.span, "placement": self.placement}


@dataclass(frozen=True)
class OutputSpec:
    trajectories: bool = True
    classical: bool = True
    parameters: bool = True
    nodes: bool = False
    density_grid: bool = False
    audits: bool = True

    def to_dict(self):
        return {k: getattr(self, k) for k in OUTPUT_KEYS}


OUTPUT_KEYS = ("trajectories", "classical", "parameters", "nodes", "density_grid", "audits")


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    nx: int = 401
    t_stride: int = 1  # every n-th stored time

    def to_dict(self):
        return {"x_min": self.x_min, "x_max": self.x_max, "nx": self.nx,
                "t_stride": self.t_stride}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    potential: Potential
    packets: tuple
    lambdas: tuple
    integration: IntegrationSpec
    constants: Constants = NATURAL
    ensemble: EnsembleSpec = EnsembleSpec()
    outputs: OutputSpec = OutputSpec()
    grid: GridSpec | None = None
    description: str = ""

    def states(self) -> list[GaussianState]:
        return [p.state(self.constants) for p in self.packets]

    def with_overrides(self, *, dt=None, lambdas=None) -> "ScenarioConfig":
        cfg = self
        if dt is not None:
            cfg = replace(cfg, integration=replace(cfg.integration, dt=float(dt)))
        if lambdas is not None:
            cfg = replace(cfg, lambdas=tuple(float(v) for v in lambdas))
        return from_dict(cfg.to_dict())  # revalidate

    def to_dict(self) -> dict:
        d = {"name": self.name}
        if self.description:
            d["description"] = self.description
        d["lambda"] = list(self.lambdas)
        d["constants"] = {"hbar": self.constants.hbar, "mass": self.constants.mass}
        d["potential"] = self.potential.to_config()
        d["packets"] = [p.to_dict() for p in self.packets]
        d["integration"] = self.integration.to_dict()
        d["ensemble"] = self.ensemble.to_dict()
        d["outputs"] = self.outputs.to_dict()
        if self.grid is not None:
            d["grid"] = self.grid.to_dict()
        return d


# -- parsing ---------------------------------------------------------------------

def _check_keys(section: dict, allowed, where: str):
    if not isinstance(section, dict):
        raise ConfigError(where, "expected a table")
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}" if where else key, "unknown field")


def _number(section, key, where, default=None, *, positive=False, integer=False):
    name = f"{where}.{key}" if where else key
    if key not in section:
        if default is None:
            raise ConfigError(name, "required")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(name, f"expected a number, got {v!r}")
    if integer:
        if float(v) != int(v):
            raise ConfigError(name, f"expected an integer, got {v!r}")
        v = int(v)
    else:
        v = float(v)
    if not math.isfinite(v):
        raise ConfigError(name, "must be finite")
    if positive and not v > 0:
        raise ConfigError(name, f"must be positive, got {v!r}")
    return v


def _packet(d, i) -> PacketSpec:
    where = f"packets[{i}]"
    _check_keys(d, ("x0", "p0", "sigma0", "alpha0"), where)
    x0 = _number(d, "x0", where)
    p0 = _number(d, "p0", where, 0.0)
    has_s, has_a = "sigma0" in d, "alpha0" in d
    if has_s == has_a:
        raise ConfigError(where, "give exactly one of sigma0 or alpha0")
    if has_s:
        return PacketSpec(x0, p0, sigma0=_number(d, "sigma0", where, positive=True))
    a = d["alpha0"]
    if not (isinstance(a, list) and len(a) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in a)):
        raise ConfigError(f"{where}.alpha0", "expected [real, imag]")
    if not a[1] > 0:
        raise ConfigError(f"{where}.alpha0", "imaginary part must be positive (normalizable)")
    return PacketSpec(x0, p0, alpha0=complex(float(a[0]), float(a[1])))


def from_dict(d: dict) -> ScenarioConfig:
    """Validate a parsed document; errors name the offending field."""
    _check_keys(d, ("name", "description", "lambda", "constants", "potential", "packets",
                    "integration", "ensemble", "outputs", "grid"), "")
    name = d.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "expected a non-empty string")
    description = d.get("description", "")

    c = d.get("constants", {})
    _check_keys(c, ("hbar", "mass"), "constants")
    constants = Constants(_number(c, "hbar", "constants", 1.0, positive=True),
                          _number(c, "mass", "constants", 1.0, positive=True))

    if "potential" not in d:
        raise ConfigError("potential", "required")
    pot = d["potential"]
    _check_keys(pot, ("kind", "omega", "c"), "potential")
    if "omega" in pot:
        _number(pot, "omega", "potential", positive=True)
    try:
        potential = potential_from_config(pot)
    except DomainError as exc:
        msg = str(exc)
        where = msg.split()[0].rstrip(":") if msg.startswith("potential") else "potential"
        raise ConfigError(where, msg.split(": ", 1)[-1]) from None

    packets = d.get("packets")
    if not isinstance(packets, list) or not 1 <= len(packets) <= 2:
        raise ConfigError("packets", "expected one or two packet tables")
    packets = tuple(_packet(p, i) for i, p in enumerate(packets))

    lam = d.get("lambda", [0.0])
    lam = lam if isinstance(lam, list) else [lam]
    if not lam:
        raise ConfigError("lambda", "expected at least one value")
    lambdas = []
    for i, v in enumerate(lam):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
            raise ConfigError(f"lambda[{i}]", f"must be a number in [0, 1], got {v!r}")
        lambdas.append(float(v))

    if "integration" not in d:
        raise ConfigError("integration", "required")
    it = d["integration"]
    _check_keys(it, ("t_final", "dt", "store_every"), "integration")
    integration = IntegrationSpec(
        _number(it, "t_final", "integration", positive=True),
        _number(it, "dt", "integration", 1e-3, positive=True),
        _number(it, "store_every", "integration", 1, positive=True, integer=True))

    en = d.get("ensemble", {})
    _check_keys(en, ("count", "span", "placement"), "ensemble")
    placement = en.get("placement", "uniform")
    if placement not in ("uniform", "quantile"):
        raise ConfigError("ensemble.placement", f"expected 'uniform' or 'quantile', got {placement!r}")
    ensemble = EnsembleSpec(_number(en, "count", "ensemble", 15, positive=True, integer=True),
                            _number(en, "span", "ensemble", 2.5, positive=True), placement)

    out = d.get("outputs", {})
    _check_keys(out, OUTPUT_KEYS, "outputs")
    for k, v in out.items():
        if not isinstance(v, bool):
            raise ConfigError(f"outputs.{k}", f"expected true or false, got {v!r}")
    outputs = OutputSpec(**out)

    grid = None
    if "grid" in d:
        g = d["grid"]
        _check_keys(g, ("x_min", "x_max", "nx", "t_stride"), "grid")
        grid = GridSpec(_number(g, "x_min", "grid"), _number(g, "x_max", "grid"),
                        _number(g, "nx", "grid", 401, positive=True, integer=True),
                        _number(g, "t_stride", "grid", 1, positive=True, integer=True))
        if not grid.x_max > grid.x_min:
            raise ConfigError("grid.x_max", "must exceed grid.x_min")
        if grid.nx < 2:
            raise ConfigError("grid.nx", "need at least two points")
    if outputs.density_grid and grid is None:
        raise ConfigError("grid", "required when outputs.density_grid is true")

    return ScenarioConfig(name=name, potential=potential, packets=packets,
                          lambdas=tuple(lambdas), integration=integration, constants=constants,
                          ensemble=ensemble, outputs=outputs, grid=grid,
                          description=description)


def loads(text: str) -> ScenarioConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("document", f"not valid TOML ({exc})") from None
    return from_dict(doc)


def dumps(config: ScenarioConfig) -> str:
    return tomli_w.dumps(config.to_dict())


def load(path) -> ScenarioConfig:
    return loads(Path(path).read_text())


def resolve(name_or_path) -> ScenarioConfig:
    """A preset name or the path of a TOML scenario file."""
    from .presets import PRESETS, preset

    if str(name_or_path) in PRESETS:
        return preset(str(name_or_path))
    p = Path(name_or_path)
    if not p.exists():
        raise ConfigError("scenario", f"{name_or_path!r} is neither a preset nor a file")
    return load(p)


# -- running ---------------------------------------------------------------------

@dataclass
class LambdaResult:
    lam: float
    propagation: str = "ode"
    ensemble: TrajectoryEnsemble | None = None
    classical: TrajectoryEnsemble | None = None
    bohmian_audit: dict | None = None
    classical_audit: dict | None = None
    nodes: list = field(default_factory=list)  # NodeReport
    density: np.ndarray | None = None  # rows (t, x, rho)
    failure: dict | None = None
    partial: object = None  # HellerSeries up to an integration failure
    notice: str | None = None
    seconds: float = 0.0

    @property
    def ok(self):
        return self.failure is None

    def summary_row(self, config: ScenarioConfig) -> dict:
        row = {"lambda": self.lam, "propagation": self.propagation,
               "status": "ok" if self.ok else "failed"}
        sigma0 = [p.width(config.constants) for p in config.states()]
        if self.ensemble is not None and self.ensemble.parameters:
            widths = np.array([s.widths() for s in self.ensemble.parameters])
            row["final_sigma"] = float(widths[0, -1])
            row["min_sigma"] = float(widths[0].min())
            row["focus_depth"] = float(widths[0].min() / sigma0[0])
        else:
            row.update(final_sigma=None, min_sigma=None, focus_depth=None)
        node = self.nodes[0] if self.nodes else None
        row["node_time"] = node.t if node else None
        row["node_count"] = len(node.node_positions) if node else 0
        row["node_spacing"] = node.spacing if node else None
        row["expected_spacing"] = node.expected_spacing if node else None
        row["bohmian_violations"] = self.bohmian_audit["violations"] if self.bohmian_audit else None
        row["classical_violations"] = (self.classical_audit["violations"]
                                       if self.classical_audit else None)
        row["deflected"] = len(self.ensemble.deflected) if self.ensemble is not None else None
        row["substeps"] = self.ensemble.substeps if self.ensemble is not None else None
        row["v_max"] = self.ensemble.v_max if self.ensemble is not None else None
        return row


SUMMARY_COLUMNS = ("lambda", "propagation", "status", "final_sigma", "min_sigma", "focus_depth",
                   "node_time", "node_count", "node_spacing", "expected_spacing",
                   "bohmian_violations", "classical_violations", "deflected", "substeps", "v_max")


@dataclass
class RunArtifact:
    out_dir: Path | None
    config: ScenarioConfig
    results: list
    manifest: dict
    files: dict = field(default_factory=dict)

    @property
    def audits_passed(self) -> bool:
        return all(r.bohmian_audit is None or r.bohmian_audit["passed"] for r in self.results)

    @property
    def failed(self) -> bool:
        return any(not r.ok for r in self.results)

    def summary(self) -> list[dict]:
        return [r.summary_row(self.config) for r in self.results]

    def result(self, lam: float) -> LambdaResult:
        for r in self.results:
            if r.lam == lam:
                return r
        raise KeyError(lam)


def initial_positions(config: ScenarioConfig, states=None):
    states = states or config.states()
    if config.ensemble.placement == "quantile":
        return quantile_initials(states, config.ensemble.count * len(states), config.constants)
    return default_initials(states, config.ensemble.count, config.ensemble.span, config.constants)


def _node_reports(config, states, lam, controls):
    """Nodes at the closest approach of the centroids, or at the last time if they never approach."""
    if len(states) != 2:
        return []
    t, sup, interior = closest_approach(states, lam, config.potential, controls, config.constants)
    if not interior:
        t = states[0].t + controls.n_steps * controls.dt
        sup = _superposition_at(config, states, lam, controls, t)
    c = sum(p.x_t for p in sup.packets) / 2.0
    half = 6.0 * max(p.width(config.constants) for p in sup.packets) \
        + 0.5 * abs(sup.packets[0].x_t - sup.packets[1].x_t)
    return [detect_nodes(sup, (c - half, c + half), config.constants)]


def _superposition_at(config, states, lam, controls, t):
    from .trajectories import make_track

    tracks = [make_track(s, lam, controls, config.potential, config.constants) for s in states]
    return SuperpositionState(tuple(GaussianState.from_tuple(t, tr.at(t)) for tr in tracks),
                              config.constants)


def density_grid(config: ScenarioConfig, lam: float | None = None,
                 ensemble: TrajectoryEnsemble | None = None) -> np.ndarray:
    """Rows (t, x, rho) on the configured grid, from exact packet evaluation.

    Each slice is renormalized with the overlap of that instant, since under
    lambda > 0 the independently evolved packets change their mutual overlap.
    """
    if config.grid is None:
        raise ConfigError("grid", "a density grid needs a [grid] section")
    lam = config.lambdas[0] if lam is None else lam
    g = config.grid
    controls = config.integration.controls(lam)
    n_times = len(range(0, controls.n_steps + 1, controls.store_every))
    n_times = len(range(0, n_times, g.t_stride))
    cells = n_times * g.nx
    if cells > MAX_GRID_CELLS:
        raise ConfigError("grid", f"{cells} cells exceeds the limit of {MAX_GRID_CELLS}; "
                          "lower grid.nx, raise grid.t_stride or integration.store_every")
    if ensemble is None:
        series = [heller.integrate(s, controls, config.potential, config.constants)
                  if not heller.refuses(lam, config.potential)
                  else _focus_series(s, lam, controls, config) for s in config.states()]
    else:
        series = ensemble.parameters
    x = np.linspace(g.x_min, g.x_max, g.nx)
    rows = []
    for i in range(0, len(series[0]), g.t_stride):
        sup = SuperpositionState(tuple(s[i] for s in series), config.constants)
        rho = sup.density(x)
        rows.append(np.column_stack([np.full_like(x, series[0].times[i]), x, rho]))
    return np.vstack(rows)


def _focus_series(state, lam, controls, config):
    from .trajectories import FocusingTrack

    tr = FocusingTrack(state, controls.dt, controls.n_steps, config.potential, config.constants)
    return tr.series(controls.store_every, lam, config.constants)


def run_lambda(config: ScenarioConfig, lam: float) -> LambdaResult:
    """Everything for one coupling value; nothing is written here."""
    start = time.perf_counter()
    res = LambdaResult(lam)
    states = config.states()
    controls = config.integration.controls(lam)
    if heller.refuses(lam, config.potential):
        res.propagation = "analytic"
        res.notice = (f"lambda = {lam}: the parameter ODE is singular at the foci of a confining "
                      "well; switched to the lambda = 1 closed-form propagation")
        log.debug(res.notice)
    positions, labels = initial_positions(config, states)
    try:
        ens = integrate_ensemble(positions, states, lam, config.potential, controls,
                                 config.constants, labels=labels)
    except IntegrationError as exc:
        res.failure = {"lambda": lam, "error": type(exc).__name__, "message": str(exc),
                       "t": exc.t}
        res.ensemble = None
        res.partial = exc.partial
        res.seconds = time.perf_counter() - start
        return res
    res.ensemble = ens
    res.bohmian_audit = non_crossing_audit(ens).to_dict()
    if config.outputs.classical:
        init = classical_initials(states, positions, config.constants, labels)
        res.classical = classical_ensemble(init, config.potential, controls, config.constants,
                                           labels)
        res.classical_audit = non_crossing_audit(res.classical).to_dict()
    if config.outputs.nodes:
        res.nodes = _node_reports(config, states, lam, controls)
    if config.outputs.density_grid:
        res.density = density_grid(config, lam, ens)
    res.seconds = time.perf_counter() - start
    return res


def _tag(lam: float) -> str:
    return f"lam{float(lam)!r}"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows, extra_header=None):
    lines = [",".join(header)]
    if extra_header is not None:
        lines.append(",".join(extra_header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _matrix_rows(times, paths):
    return [[float(t)] + [float(v) for v in row] for t, row in zip(times, paths)]


def _trajectory_doc(ens: TrajectoryEnsemble):
    return {"kind": ens.kind, "lambda": ens.lam, "times": ens.times.tolist(),
            "packet": [lab[0] for lab in ens.labels],
            "offset_sigma": [lab[1] for lab in ens.labels],
            "paths": ens.paths.T.tolist(), "deflected": [list(d) for d in ens.deflected]}


def _write_trajectories(out: Path, stem: str, ens: TrajectoryEnsemble, fmt: str) -> Path:
    if fmt == "json":
        path = out / f"{stem}.json"
        path.write_text(json.dumps(_trajectory_doc(ens), indent=1) + "\n")
        return path
    path = out / f"{stem}.csv"
    header = ["t"] + [f"path_{i}" for i in range(ens.n_paths)]
    offsets = ["offset_sigma"] + [repr(float(lab[1])) for lab in ens.labels]
    _write_csv(path, header, _matrix_rows(ens.times, ens.paths), offsets)
    return path


def _write_result(out: Path, config: ScenarioConfig, res: LambdaResult, fmt: str) -> dict:
    files = {}
    tag = _tag(res.lam)
    if res.failure is not None:
        path = out / f"failure_{tag}.json"
        partial = res.partial
        record = dict(res.failure)
        if partial is not None:
            record["partial_times"] = partial.times.tolist()
            record["partial_parameters"] = partial.values.tolist()
        path.write_text(json.dumps(record, indent=1) + "\n")
        files[f"failure/{res.lam!r}"] = path.name
        return files
    ens = res.ensemble
    if config.outputs.trajectories:
        p = _write_trajectories(out, f"trajectories_{tag}", ens, fmt)
        files[f"trajectories/{res.lam!r}"] = p.name
    if config.outputs.classical and res.classical is not None:
        p = _write_trajectories(out, f"classical_{tag}", res.classical, fmt)
        files[f"classical/{res.lam!r}"] = p.name
    if config.outputs.parameters:
        rows = []
        for k, s in enumerate(ens.parameters):
            widths = s.widths()
            for i in range(len(s)):
                rows.append([float(s.times[i]), k] + [float(v) for v in s.values[i]]
                            + [float(widths[i])])
        header = ["t", "packet", "x_t", "p_t", "alpha_r", "alpha_i", "gamma_r", "gamma_i",
                  "sigma"]
        if fmt == "json":
            p = out / f"parameters_{tag}.json"
            p.write_text(json.dumps({"columns": header, "rows": rows}) + "\n")
        else:
            p = out / f"parameters_{tag}.csv"
            _write_csv(p, header, rows)
        files[f"parameters/{res.lam!r}"] = p.name
    if config.outputs.nodes:
        rows = [[r.t, i, x] for r in res.nodes for i, x in enumerate(r.node_positions)]
        if fmt == "json":
            p = out / f"nodes_{tag}.json"
            p.write_text(json.dumps([{"t": r.t, "nodes": list(r.node_positions),
                                      "spacing": r.spacing,
                                      "expected_spacing": r.expected_spacing}
                                     for r in res.nodes], indent=1) + "\n")
        else:
            p = out / f"nodes_{tag}.csv"
            _write_csv(p, ["t", "node_index", "x"], rows)
        files[f"nodes/{res.lam!r}"] = p.name
    if config.outputs.density_grid and res.density is not None:
        p = out / f"density_{tag}.csv"
        np.savetxt(p, res.density, fmt="%.17g", delimiter=",", header="t,x,rho", comments="")
        files[f"density/{res.lam!r}"] = p.name
    if config.outputs.audits:
        p = out / f"audit_{tag}.json"
        doc = {"lambda": res.lam, "bohmian": res.bohmian_audit, "classical": res.classical_audit,
               "deflected": [list(d) for d in ens.deflected], "v_max": ens.v_max,
               "substeps": ens.substeps}
        p.write_text(json.dumps(doc, indent=1) + "\n")
        files[f"audit/{res.lam!r}"] = p.name
    return files


def versions() -> dict:
    import scipy

    return {"gaussbohm": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, DEFAULT_OUT))


def run(config: ScenarioConfig, out_dir=None, *, fmt: str = "csv", workers: int | None = None,
        write: bool = True) -> RunArtifact:
    """Run every lambda of ``config``; entries run concurrently, files are written in order."""
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"expected 'csv' or 'json', got {fmt!r}")
    workers = workers or min(len(config.lambdas), os.cpu_count() or 1)
    start = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda lam: run_lambda(config, lam), config.lambdas))
    else:
        results = [run_lambda(config, lam) for lam in config.lambdas]
    total = time.perf_counter() - start

    manifest = {
        "scenario": config.name,
        "config": config.to_dict(),
        "versions": versions(),
        "timings": {"total_seconds": total,
                    "per_lambda": {repr(r.lam): r.seconds for r in results}},
        "notices": [r.notice for r in results if r.notice],
        "failures": [r.failure for r in results if r.failure],
        "audits": {repr(r.lam): r.bohmian_audit for r in results},
        "status": "failed" if any(r.failure for r in results) else "ok",
        "files": {},
    }
    art = RunArtifact(None, config, results, manifest)
    if not write:
        return art
    out = Path(out_dir) if out_dir is not None else default_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for r in results:
        files.update(_write_result(out, config, r, fmt))
    summary = out / "summary.csv"
    _write_csv(summary, SUMMARY_COLUMNS,
               [[row[c] for c in SUMMARY_COLUMNS] for row in art.summary()])
    files["summary"] = summary.name
    (out / "scenario.toml").write_text(dumps(config))
    files["config"] = "scenario.toml"
    manifest["files"] = files
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, default=_json_default)
                                       + "\n")
    art.out_dir, art.files = out, files
    return art


def sweep_lambda(config: ScenarioConfig, out_dir=None, **kwargs) -> RunArtifact:
    """``run`` over the sweep list; the summary table compares the lambda values."""
    if len(config.lambdas) < 2:
        log.info("single lambda in the sweep list; this is a plain run")
    return run(config, out_dir, **kwargs)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


__all__ = [
    "ConfigError", "EnsembleSpec", "GridSpec", "IntegrationSpec", "LambdaResult", "OUT_ENV",
    "OutputSpec", "PacketSpec", "RunArtifact", "ScenarioConfig", "density_grid", "dumps",
    "from_dict", "load", "loads", "resolve", "run", "run_lambda", "sweep_lambda", "versions",
]
