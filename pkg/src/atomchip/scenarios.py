"""Scenario engine behind the command line: operations, sweeps, result tables and design reports."""

from __future__ import annotations

import copy
import hashlib
import itertools
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

import numpy as np

from . import __version__
from .casimir_polder import CpModel
from .corrugation import corrugation_rms, delta_b_spectrum, synth_roughness
from .domain import (
    CONSTANTS,
    RB87,
    RHO_AU_300K,
    ConductivityTensor,
    Layer,
    LayerStack,
    PhysicsDomainError,
    TrapContext,
    WireGeometry,
)
from .magnetostatics import barrier_profile
from .nanowire import WireElectrical, fs_resistivity, max_safe_current
from .noise import (
    RateReport,
    gate_ops_figure_of_merit,
    geometry_factors,
    spin_decoherence_rate,
    spin_flip_rate,
    suppression_ratio,
)
from .traps import MAJORANA_REFERENCE_LIFETIME, SideGuideTrap
from .tunneling import crossing_probability, current_sensitivity, resolution_height

__all__ = [
    "ConfigError",
    "Operation",
    "OPERATIONS",
    "SCENARIOS",
    "ResultTable",
    "DesignReport",
    "load_schema",
    "validate_config",
    "config_hash",
    "run_scenario",
    "design_report",
    "CONCLUSION_DESIGN",
    "WIDE_WIRE_DESIGN",
]

UK = CONSTANTS.kB * 1e-6


class ConfigError(ValueError):
    """A scenario does not validate; ``problems`` lists ``(path, message)`` pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {m}" for p, m in problems))


# ---------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class Operation:
    """A named evaluation with SI defaults and a fixed menu of output channels."""

    name: str
    func: Callable[[dict, Any], dict]
    defaults: dict
    outputs: dict  # output name -> unit


def _ctx_barrier(p):
    return TrapContext(d=p["d"], I=p["I"], B0=p["B0"], mu=p["energy_uK"] * UK)


def _op_barrier(p, seed):
    ctx = _ctx_barrier(p)
    E = ctx.mu
    out = {}
    prof = barrier_profile(np.array([0.0]), ctx, RB87)
    out["height_uK"] = prof.height / UK
    out["half_width"] = p["d"]
    out["probability"] = crossing_probability(p["I"], p["d"], E, RB87)
    out["delta_I_over_I"] = current_sensitivity(p["d"], p["P_from"], p["P_to"], ctx, RB87)
    return out


def _op_resolution(p, seed):
    return {"d_max": resolution_height(p["wavelength"], p["I"], p["eta"], RB87)}


def _op_corrugation(p, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rough = synth_roughness(p["rms"], p["alpha"], p["L"], p["lambda_min"], seed=seed)
        formula = corrugation_rms(rough, p["z"])
    spec = delta_b_spectrum(rough, p["I"], p["z"])
    return {"rms_formula": formula, "rms_realization": spec.spatial_rms / spec.B0}


def _wire(p) -> WireGeometry:
    w = p["side"] if p.get("side", 0) > 0 else p["w"]
    h = p["side"] if p.get("side", 0) > 0 else p["h"]
    return WireGeometry(w, h, max(p["L"], 10 * max(w, h)))


def _conductivity(p) -> ConductivityTensor:
    s0 = 1.0 / p["rho"]
    r = p["r"]
    if r < 1:
        raise PhysicsDomainError("anisotropy ratio r must be >= 1")
    if p["layered"]:
        return ConductivityTensor(s0, s0, s0 / r, p["T"])
    return ConductivityTensor(s0, s0 / r, s0 / r, p["T"])


def _op_noise(p, seed):
    geom = _wire(p)
    sigma = _conductivity(p)
    ctx = TrapContext(d=p["d"], B0=p["B0"])
    p0 = geom.point_above(p["d"])
    X = geometry_factors(p0, p0, geom)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sf = spin_flip_rate(ctx, RB87, sigma, geom)
        sd = spin_decoherence_rate(ctx, RB87, sigma, geom)
    return {
        "spin_flip_rate": sf,
        "spin_flip_lifetime": math.inf if sf == 0 else 1 / sf,
        "spin_decoherence_rate": sd,
        "spin_decoherence_lifetime": math.inf if sd == 0 else 1 / sd,
        "Xxx": X.Xxx,
        "Xyy": X.Xyy,
        "Xzz": X.Xzz,
        "suppression_ratio": suppression_ratio(sigma, X),
    }


def _stack(p) -> LayerStack:
    return LayerStack((Layer(p["eps1"], p["t1"]), Layer(p["eps2"], None)))


def _op_cp(p, seed):
    geom = WireGeometry(p["w"], p["h"], 10 * max(p["w"], p["h"]))
    stack = _stack(p)
    y, z = p["y"], p["z"]
    if z <= 0 or (abs(y) <= geom.w / 2 and z <= geom.h):
        raise PhysicsDomainError("position lies inside the chip or the wire")
    surf = CpModel(geom, stack, RB87.alpha0, surface=True, wire=False)
    wire = CpModel(geom, stack, RB87.alpha0, surface=False, wire=True)
    both = CpModel(geom, stack, RB87.alpha0)
    return {
        "U_surface_uK": float(surf(y, z)) / UK,
        "U_wire_uK": float(wire(y, z)) / UK,
        "U_total_uK": float(both(y, z)) / UK,
        "calF": float(both.calF(z, y)),
    }


def _trap(p, mode: str) -> SideGuideTrap:
    geom = WireGeometry(p["w"], p["h"], max(p["L"], 10 * max(p["w"], p["h"])))
    return SideGuideTrap(p["d"], p["I"], geom, p["B0"], p["omega_axial"], cp_mode=mode,
                         cp_scale=p["cp_scale"], stack=_stack(p))


def _op_lifetime(p, seed, outputs=None):
    out = {}
    wanted = outputs if outputs is not None else ("lifetime_combined", "lifetime_wire", "lifetime_surface", "lifetime_none")
    for name in wanted:
        mode = name.removeprefix("lifetime_")
        if mode not in ("combined", "wire", "surface", "none"):
            continue
        out[name] = _trap(p, mode).tunneling(int(p["N"])).lifetime
    out["majorana_reference"] = MAJORANA_REFERENCE_LIFETIME
    return out


def _op_nanowire(p, seed):
    el = WireElectrical(mean_free_path=p["mfp"], specularity=p["p"])
    w = p["side"] if p.get("side", 0) > 0 else p["w"]
    h = p["side"] if p.get("side", 0) > 0 else p["h"]
    rho = fs_resistivity(w, h, el)
    return {
        "rho": rho,
        "rho_ratio": rho / el.bulk_rho,
        "I_max": max_safe_current(w, h, el),
        "I_max_current_density": max_safe_current(w, h, el, model="current_density"),
    }


def _op_report(p, seed):
    rep = design_report(p, p["gate_time"])
    return {
        "gate_ops": rep.gate_ops,
        "spin_flip_lifetime": rep.lifetimes.get("spin_flip", math.nan),
        "spin_decoherence_lifetime": rep.lifetimes.get("spin_decoherence", math.nan),
        "tunneling_lifetime": rep.lifetimes.get("tunneling", math.nan),
        "delta_b_rel": rep.delta_b_rel,
        "verdict": rep.verdict,
    }


_STACK_DEFAULTS = {"eps1": 4.0, "t1": 100e-9, "eps2": 12.0}
_WIRE_NOISE_DEFAULTS = {"w": 50e-9, "h": 50e-9, "side": 0.0, "L": 1e-2, "T": 300.0, "rho": RHO_AU_300K,
                        "r": 1.0, "layered": 0.0}

#: Frozen trap parameters of the tunneling-lifetime scenario.
LIFETIME_TRAP = {"I": 40e-6, "w": 50e-9, "h": 50e-9, "L": 1e-3, "B0": 2e-6, "omega_axial": 2 * math.pi * 50,
              "N": 1000.0, "cp_scale": 1.0}

#: Reference nanowire design: 50 nm gold wire, trap 0.9 um above its top, 40 uA.
CONCLUSION_DESIGN = {
    **_WIRE_NOISE_DEFAULTS, **_STACK_DEFAULTS, **LIFETIME_TRAP,
    "d": 0.9e-6, "rms": 2e-9, "alpha": 0.0, "lambda_min": 100e-9, "rough_L": 800e-9,
    "gate_time": 1e-3,
}

#: Comparator: the same operating point above a 10 um gold wire.
WIDE_WIRE_DESIGN = {**CONCLUSION_DESIGN, "w": 10e-6, "h": 10e-6, "d": 1e-6}

OPERATIONS: dict[str, Operation] = {
    "barrier": Operation(
        "barrier", _op_barrier,
        {"d": 1e-6, "I": 1e-3, "B0": 1e-4, "energy_uK": 1.0, "P_from": 1e-3, "P_to": 0.1},
        {"height_uK": "uK", "half_width": "m", "probability": "1", "delta_I_over_I": "1"},
    ),
    "resolution": Operation(
        "resolution", _op_resolution,
        {"wavelength": 1e-6, "I": 5e-3, "eta": 2.0},
        {"d_max": "m"},
    ),
    "corrugation": Operation(
        "corrugation", _op_corrugation,
        {"rms": 2e-9, "alpha": 0.0, "L": 800e-9, "lambda_min": 100e-9, "z": 0.6e-6, "I": 1e-3},
        {"rms_formula": "1", "rms_realization": "1"},
    ),
    "noise": Operation(
        "noise", _op_noise,
        {**_WIRE_NOISE_DEFAULTS, "d": 1e-6, "B0": 2e-6},
        {"spin_flip_rate": "1/s", "spin_flip_lifetime": "s", "spin_decoherence_rate": "1/s",
         "spin_decoherence_lifetime": "s", "Xxx": "1/m", "Xyy": "1/m", "Xzz": "1/m", "suppression_ratio": "1"},
    ),
    "cp": Operation(
        "cp", _op_cp,
        {"z": 0.5e-6, "y": 0.0, "w": 50e-9, "h": 50e-9, **_STACK_DEFAULTS},
        {"U_surface_uK": "uK", "U_wire_uK": "uK", "U_total_uK": "uK", "calF": "1"},
    ),
    "lifetime": Operation(
        "lifetime", _op_lifetime,
        {**LIFETIME_TRAP, **_STACK_DEFAULTS, "d": 0.5e-6},
        {"lifetime_combined": "s", "lifetime_wire": "s", "lifetime_surface": "s", "lifetime_none": "s",
         "majorana_reference": "s"},
    ),
    "nanowire": Operation(
        "nanowire", _op_nanowire,
        {"w": 50e-9, "h": 50e-9, "side": 0.0, "mfp": 40e-9, "p": 0.0},
        {"rho": "Ohm m", "rho_ratio": "1", "I_max": "A", "I_max_current_density": "A"},
    ),
    "report": Operation(
        "report", _op_report,
        dict(CONCLUSION_DESIGN),
        {"gate_ops": "1", "spin_flip_lifetime": "s", "spin_decoherence_lifetime": "s",
         "tunneling_lifetime": "s", "delta_b_rel": "1", "verdict": ""},
    ),
}

#: Extra columns in the units used for plotting (name -> (unit, factor from SI)).
CONVENIENCE = {
    "d": ("um", 1e6), "z": ("um", 1e6), "y": ("um", 1e6), "wavelength": ("um", 1e6), "d_max": ("um", 1e6),
    "half_width": ("um", 1e6), "w": ("nm", 1e9), "h": ("nm", 1e9), "side": ("nm", 1e9),
    "rms": ("nm", 1e9), "lambda_min": ("nm", 1e9), "I": ("mA", 1e3), "I_max": ("mA", 1e3),
    "I_max_current_density": ("mA", 1e3), "rho": ("uOhm cm", 1e8),
}

# ---------------------------------------------------------------------------
# built-in scenarios


def _logspace(a, b, n):
    return [float(v) for v in np.logspace(math.log10(a), math.log10(b), n)]


SCENARIOS: dict[str, dict] = {
    "fig3": {
        "name": "fig3", "operation": "barrier",
        "sweep": [{"param": "d", "grid": [0.5e-6, 1e-6, 2e-6, 5e-6, 10e-6]},
                  {"param": "P_to", "grid": [1e-3, 3e-3, 1e-2, 3e-2, 1e-1]}],
        "outputs": ["delta_I_over_I"],
    },
    "fig4": {
        "name": "fig4", "operation": "resolution",
        "sweep": [{"param": "wavelength", "grid": [0.5e-6, 1e-6, 2e-6]},
                  {"param": "I", "grid": _logspace(0.05e-3, 50e-3, 7)}],
        "outputs": ["d_max"],
    },
    "fig5": {
        "name": "fig5", "operation": "corrugation",
        "sweep": [{"param": "alpha", "grid": [0.0, 1.0]},
                  {"param": "z", "grid": [0.2e-6, 0.4e-6, 0.6e-6, 1e-6, 2e-6]}],
        "outputs": ["rms_formula", "rms_realization"],
    },
    "fig7": {
        "name": "fig7", "operation": "noise",
        "params": {"d": 5e-6, "w": 10e-6, "h": 2.15e-6, "L": 1e-2},
        "sweep": [{"param": "layered", "grid": [0.0, 1.0]},
                  {"param": "r", "grid": _logspace(1.0, 1e4, 9)}],
        "outputs": ["spin_decoherence_rate", "suppression_ratio"],
    },
    "fig12": {
        "name": "fig12", "operation": "lifetime",
        "sweep": [{"param": "d", "grid": [0.2e-6, 0.3e-6, 0.4e-6, 0.5e-6, 0.7e-6, 1.0e-6]}],
        "outputs": ["lifetime_combined", "lifetime_wire", "lifetime_surface", "majorana_reference"],
    },
    "fig13": {
        "name": "fig13", "operation": "noise",
        "params": {"L": 1e-3},
        "sweep": [{"param": "side", "grid": [25e-9, 50e-9, 100e-9, 200e-9]},
                  {"param": "d", "grid": [0.2e-6, 0.3e-6, 0.5e-6, 0.7e-6, 1e-6]}],
        "outputs": ["spin_flip_lifetime"],
    },
    "conclusion": {
        "name": "conclusion", "operation": "report",
        "sweep": [],
        "outputs": ["gate_ops", "spin_flip_lifetime", "spin_decoherence_lifetime", "tunneling_lifetime",
                    "delta_b_rel", "verdict"],
    },
}

# ---------------------------------------------------------------------------
# validation


def load_schema() -> dict:
    text = resources.files("atomchip").joinpath("schema/scenario.schema.json").read_text()
    return json.loads(text)


def validate_config(config: dict) -> dict:
    """Check ``config`` against the schema and the operation tables.

    Returns a normalized copy with ``params``, ``sweep``, ``outputs`` and
    ``seed`` filled in.  Raises :class:`ConfigError` listing every problem.
    """
    import jsonschema

    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.path))
    if errors:
        raise ConfigError([("/" + "/".join(str(p) for p in e.path), e.message) for e in errors])
    cfg = copy.deepcopy(config)
    op = OPERATIONS[cfg["operation"]]
    cfg.setdefault("name", cfg["operation"])
    cfg.setdefault("params", {})
    cfg.setdefault("sweep", [])
    cfg.setdefault("outputs", list(op.outputs))
    cfg.setdefault("seed", 0)
    problems = []
    for key, value in cfg["params"].items():
        if key not in op.defaults:
            problems.append((f"/params/{key}", f"unknown parameter for operation '{op.name}'"))
        elif isinstance(value, str):
            problems.append((f"/params/{key}", "parameters are numbers in SI units"))
    seen = set()
    for i, axis in enumerate(cfg["sweep"]):
        name, grid = axis["param"], axis["grid"]
        if name not in op.defaults:
            problems.append((f"/sweep/{i}/param", f"unknown parameter '{name}' for operation '{op.name}'"))
        if name in seen:
            problems.append((f"/sweep/{i}/param", f"parameter '{name}' swept twice"))
        seen.add(name)
        diffs = np.diff(np.asarray(grid, dtype=float))
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            problems.append((f"/sweep/{i}/grid", "grid must be strictly monotone"))
        if not np.all(np.isfinite(grid)):
            problems.append((f"/sweep/{i}/grid", "grid values must be finite"))
    for i, name in enumerate(cfg["outputs"]):
        if name not in op.outputs:
            problems.append((f"/outputs/{i}", f"unknown output '{name}' for operation '{op.name}'"))
    if problems:
        raise ConfigError(problems)
    return cfg


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON form of a normalized config."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# result table


@dataclass
class ResultTable:
    """Rows of a sweep, in grid order, with SI and convenience columns.

    Failed points keep their parameter cells and carry ``"error: ..."`` in
    each output cell; ``errors`` counts them.
    """

    columns: list[tuple[str, str]]
    rows: list[list]
    provenance: dict
    errors: int = 0

    @property
    def headers(self) -> list[str]:
        return [f"{n} [{u}]" if u else n for n, u in self.columns]

    def column(self, name: str) -> list:
        idx = [n for n, _ in self.columns].index(name)
        return [r[idx] for r in self.rows]

    def to_json(self) -> str:
        doc = {
            "columns": [{"name": n, "unit": u} for n, u in self.columns],
            "rows": [[_json_cell(v) for v in r] for r in self.rows],
            "provenance": self.provenance,
        }
        return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False)

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for key in sorted(self.provenance):
            buf.write(f"# {key}: {self.provenance[key]}\n")
        writer.writerow(self.headers)
        for r in self.rows:
            writer.writerow([_csv_cell(v) for v in r])
        return buf.getvalue()


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "error: nan")
    return v


def _csv_cell(v):
    return repr(v) if isinstance(v, float) else str(v)


def _point_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(index,))


def _evaluate(args) -> dict | str:
    op_name, params, outputs, seed, index = args
    op = OPERATIONS[op_name]
    try:
        if op_name == "lifetime":
            values = _op_lifetime(params, None, outputs)
        else:
            values = op.func(params, _point_seed(seed, index))
    except PhysicsDomainError as exc:
        return f"error: {exc}"
    out = {}
    for name in outputs:
        v = values[name]
        if isinstance(v, float) and math.isnan(v):
            return f"error: {name} evaluated to NaN"
        out[name] = v
    return out


def run_scenario(config: dict, seed: int | None = None, jobs: int = 1) -> ResultTable:
    """Evaluate a scenario over its sweep grid.

    Parameters
    ----------
    config : dict
        Scenario document (validated here).
    seed : int, optional
        Overrides ``config["seed"]``.  Each grid point draws from its own
        stream derived from ``(seed, grid index)``.
    jobs : int
        Worker processes; the table does not depend on this.
    """
    cfg = validate_config(config)
    if seed is not None:
        cfg["seed"] = int(seed)
    op = OPERATIONS[cfg["operation"]]
    base = {**op.defaults, **cfg["params"]}
    axes = [a["param"] for a in cfg["sweep"]]
    grids = [a["grid"] for a in cfg["sweep"]]
    outputs = cfg["outputs"]

    columns: list[tuple[str, str]] = []
    for a in axes:
        columns.append((a, _param_unit(a)))
        if a in CONVENIENCE:
            columns.append((f"{a}_{CONVENIENCE[a][0].replace(' ', '_')}", CONVENIENCE[a][0]))
    for o in outputs:
        columns.append((o, op.outputs[o]))
        if o in CONVENIENCE:
            columns.append((f"{o}_{CONVENIENCE[o][0].replace(' ', '_')}", CONVENIENCE[o][0]))

    points = list(itertools.product(*grids)) if outputs else []
    tasks = []
    for index, values in enumerate(points):
        params = dict(base)
        params.update({a: float(v) for a, v in zip(axes, values)})
        tasks.append((op.name, params, outputs, cfg["seed"], index))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate, tasks))
    else:
        results = [_evaluate(t) for t in tasks]

    rows = []
    errors = 0
    for values, res in zip(points, results):
        row: list = []
        for a, v in zip(axes, values):
            row.append(float(v))
            if a in CONVENIENCE:
                row.append(float(v) * CONVENIENCE[a][1])
        if isinstance(res, str):
            errors += 1
        for o in outputs:
            if isinstance(res, str):
                row.append(res)
                if o in CONVENIENCE:
                    row.append(res)
                continue
            v = res[o]
            row.append(float(v) if isinstance(v, (int, float, np.floating)) else v)
            if o in CONVENIENCE:
                row.append(float(v) * CONVENIENCE[o][1])
        rows.append(row)
    provenance = {"config_sha256": config_hash(cfg), "seed": cfg["seed"], "version": __version__,
                  "scenario": cfg["name"], "operation": op.name}
    return ResultTable(columns, rows, provenance, errors)


def _param_unit(name: str) -> str:
    units = {"d": "m", "z": "m", "y": "m", "w": "m", "h": "m", "side": "m", "L": "m", "wavelength": "m",
             "rms": "m", "lambda_min": "m", "t1": "m", "mfp": "m", "I": "A", "B0": "T", "T": "K",
             "rho": "Ohm m", "omega_axial": "rad/s", "energy_uK": "uK", "gate_time": "s", "rough_L": "m"}
    return units.get(name, "1")


# ---------------------------------------------------------------------------
# design report


@dataclass(frozen=True)
class DesignReport:
    """Rates and verdict for one chip design.

    ``verdict`` is ``"PASS"`` when ``gate_ops >= 1e4`` and ``delta_b_rel <= 1e-2``,
    ``"FAIL"`` otherwise, and ``"INDETERMINATE"`` when a channel could not be
    evaluated (``cause`` then names it).  ``failing_channels`` lists every
    channel whose own lifetime holds fewer than ``1e4`` gates.
    """

    rates: RateReport | None
    gate_ops: float
    delta_b_rel: float
    verdict: str
    cause: str
    limiting_channel: str
    lifetimes: dict = field(default_factory=dict)
    failing_channels: tuple = ()

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "cause": self.cause,
            "limiting_channel": self.limiting_channel,
            "failing_channels": list(self.failing_channels),
            "gate_ops": float(self.gate_ops),
            "delta_b_rel": float(self.delta_b_rel),
            "lifetimes": {k: (float(v) if math.isfinite(v) else "inf") for k, v in self.lifetimes.items()},
        }


GATE_OPS_THRESHOLD = 1e4
CORRUGATION_THRESHOLD = 1e-2


def design_report(design: dict | None = None, gate_time: float = 1e-3) -> DesignReport:
    """Evaluate corrugation, spin flips, spin decoherence and tunneling for a design.

    ``design`` keys follow :data:`CONCLUSION_DESIGN`; ``d`` is measured from
    the top of the wire.  Missing keys take the conclusion-design values.
    """
    if not gate_time > 0:
        raise ValueError("gate time must be positive")
    p = {**CONCLUSION_DESIGN, **(design or {})}
    lifetimes: dict[str, float] = {}
    try:
        channel = "corrugation"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rough = synth_roughness(p["rms"], p["alpha"], p["rough_L"], p["lambda_min"], seed=0)
            dbb = corrugation_rms(rough, p["d"] + p["h"] / 2)
        geom = _wire(p)
        sigma = _conductivity(p)
        ctx = TrapContext(d=p["d"], B0=p["B0"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            channel = "spin_flip"
            sf = spin_flip_rate(ctx, RB87, sigma, geom)
            channel = "spin_decoherence"
            sd = spin_decoherence_rate(ctx, RB87, sigma, geom)
            channel = "tunneling"
            tp = dict(p)
            tp["d"] = p["d"] + geom.h
            tp["w"], tp["h"] = geom.w, geom.h
            tun = _trap(tp, "combined").tunneling(int(p["N"])).rate
    except (PhysicsDomainError, ValueError, ArithmeticError) as exc:
        return DesignReport(None, math.nan, math.nan, "INDETERMINATE", f"{channel}: {exc}", channel, lifetimes,
                            (channel,))
    rates = RateReport(sf, sd, 0.0, 0.0, 0.0, tun)
    for name in ("spin_flip", "spin_decoherence", "tunneling"):
        lifetimes[name] = rates.lifetimes[name]
    ops = gate_ops_figure_of_merit(rates, gate_time)
    limiting = min(lifetimes, key=lifetimes.get)
    failing = tuple(k for k, v in lifetimes.items() if not v / gate_time >= GATE_OPS_THRESHOLD)
    causes = []
    if not ops >= GATE_OPS_THRESHOLD:
        causes.append(f"gate operations {ops:.3g} below {GATE_OPS_THRESHOLD:.0e}; "
                      f"short channels: {', '.join(failing)}")
    if not dbb <= CORRUGATION_THRESHOLD:
        causes.append(f"corrugation {dbb:.3g} above {CORRUGATION_THRESHOLD:.0e}")
    verdict = "FAIL" if causes else "PASS"
    return DesignReport(rates, ops, dbb, verdict, "; ".join(causes), limiting, lifetimes, failing)
