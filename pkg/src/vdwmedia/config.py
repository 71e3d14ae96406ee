"""Scenario configuration: YAML loading, model construction and validation.

A config names its materials and atoms once and then refers to them by
name from the scenario geometry::

    materials:
      water:
        eps: [{strength: 3.0, resonance: 1.0}]
      glass:
        eps_static: 2.25
    atoms:
      Rb: {alpha_static: 1.0, resonance: 1.0}
    scenario: vdw-curve
    geometry:
      medium1: water
      medium2: glass
      atom_a: Rb
      atom_b: Rb
      separations: {start: 1.0e-3, stop: 1.0e3, num: 13, spacing: log}
    quadrature: {rel_tol: 1.0e-6}
    output: {path: curve.csv, format: csv}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .materials import EXPANSION_THRESHOLD, AtomModel, MaterialModel, OscillatorTerm
from .quadrature import QuadratureSpec

SCENARIOS = (
    "vdw-curve",
    "vdw-asymptotes",
    "ratio-scan",
    "cp-potential",
    "slab-force",
    "consistency-report",
)
FORMATS = ("csv", "json-records")


class ConfigError(ValueError):
    """Config could not be read or parsed."""


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" or "warning"
    field: str
    message: str

    def __str__(self):
        return f"{self.level}: {self.field}: {self.message}"


@dataclass
class ScenarioConfig:
    materials: dict[str, MaterialModel]
    atoms: dict[str, AtomModel]
    scenario: str
    geometry: dict[str, Any]
    quadrature: dict[str, Any] = field(default_factory=dict)
    output: dict[str, Any] = field(default_factory=dict)
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    def quad_spec(self, **overrides) -> QuadratureSpec:
        opts = dict(self.quadrature)
        opts.update({k: v for k, v in overrides.items() if v is not None})
        return QuadratureSpec(**opts)


def load_yaml(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"YAML parse error at {where}: {exc.problem}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return data


def _terms(spec, where: str, diags: list[Diagnostic]) -> tuple[OscillatorTerm, ...]:
    if spec is None:
        return ()
    if not isinstance(spec, list):
        diags.append(Diagnostic("error", where, "expected a list of oscillator terms"))
        return ()
    out = []
    for i, t in enumerate(spec):
        loc = f"{where}[{i}]"
        try:
            if isinstance(t, dict):
                unknown = set(t) - {"strength", "resonance", "damping"}
                if unknown:
                    diags.append(Diagnostic("error", loc, f"unknown keys {sorted(unknown)}"))
                    continue
                out.append(OscillatorTerm(float(t["strength"]), float(t["resonance"]), float(t.get("damping", 0.0))))
            else:
                out.append(OscillatorTerm(*map(float, t)))
        except KeyError as exc:
            diags.append(Diagnostic("error", loc, f"missing key {exc.args[0]!r}"))
        except (TypeError, ValueError) as exc:
            diags.append(Diagnostic("error", loc, str(exc)))
    return tuple(out)


def _material(name: str, spec, diags: list[Diagnostic]) -> MaterialModel | None:
    where = f"materials.{name}"
    if spec is None:
        spec = {}
    if not isinstance(spec, dict):
        diags.append(Diagnostic("error", where, "expected a mapping"))
        return None
    unknown = set(spec) - {"eps", "mu", "eps_static", "mu_static"}
    if unknown:
        diags.append(Diagnostic("error", where, f"unknown keys {sorted(unknown)}"))
    if "eps_static" in spec or "mu_static" in spec:
        if "eps" in spec or "mu" in spec:
            diags.append(Diagnostic("error", where, "give either *_static constants or oscillator lists, not both"))
            return None
        try:
            return MaterialModel.constant(float(spec.get("eps_static", 1.0)), float(spec.get("mu_static", 1.0)), name)
        except (TypeError, ValueError) as exc:
            diags.append(Diagnostic("error", where, str(exc)))
            return None
    n_before = len(diags)
    eps = _terms(spec.get("eps"), f"{where}.eps", diags)
    mu = _terms(spec.get("mu"), f"{where}.mu", diags)
    if len(diags) > n_before:
        return None
    return MaterialModel(eps, mu, name)


def _atom(name: str, spec, diags: list[Diagnostic]) -> AtomModel | None:
    where = f"atoms.{name}"
    if not isinstance(spec, dict):
        diags.append(Diagnostic("error", where, "expected a mapping"))
        return None
    try:
        return AtomModel(float(spec["alpha_static"]), float(spec.get("resonance", 1.0)), name)
    except KeyError as exc:
        diags.append(Diagnostic("error", f"{where}.{exc.args[0]}", "missing"))
    except (TypeError, ValueError) as exc:
        diags.append(Diagnostic("error", where, str(exc)))
    return None


def grid(spec, where: str, diags: list[Diagnostic]) -> np.ndarray | None:
    """A list of numbers, or ``{start, stop, num, spacing: log|linear}``."""
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    if isinstance(spec, list):
        try:
            return np.array([float(x) for x in spec])
        except (TypeError, ValueError):
            diags.append(Diagnostic("error", where, "list must contain numbers"))
            return None
    if isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except KeyError as exc:
            diags.append(Diagnostic("error", f"{where}.{exc.args[0]}", "missing"))
            return None
        except (TypeError, ValueError) as exc:
            diags.append(Diagnostic("error", where, str(exc)))
            return None
        spacing = spec.get("spacing", "linear")
        if num < 1:
            diags.append(Diagnostic("error", f"{where}.num", "must be >= 1"))
            return None
        if spacing == "log":
            if start <= 0 or stop <= 0:
                diags.append(Diagnostic("error", where, "log spacing needs positive start and stop"))
                return None
            return np.geomspace(start, stop, num)
        if spacing == "linear":
            return np.linspace(start, stop, num)
        diags.append(Diagnostic("error", f"{where}.spacing", f"unknown spacing {spacing!r}"))
        return None
    diags.append(Diagnostic("error", where, "expected a number, a list or a range mapping"))
    return None


def parse_config(data: dict) -> tuple[ScenarioConfig | None, list[Diagnostic]]:
    """Build a :class:`ScenarioConfig` and collect diagnostics for everything wrong with it."""
    diags: list[Diagnostic] = []
    unknown = set(data) - {"materials", "atoms", "scenario", "geometry", "quadrature", "output"}
    for key in sorted(unknown):
        diags.append(Diagnostic("error", key, "unknown top-level key"))
    materials = {}
    for name, spec in (data.get("materials") or {}).items():
        m = _material(str(name), spec, diags)
        if m is not None:
            materials[str(name)] = m
    atoms = {}
    for name, spec in (data.get("atoms") or {}).items():
        a = _atom(str(name), spec, diags)
        if a is not None:
            atoms[str(name)] = a
    scenario = data.get("scenario")
    if scenario not in SCENARIOS:
        diags.append(Diagnostic("error", "scenario", f"must be one of {', '.join(SCENARIOS)}; got {scenario!r}"))
    geometry = data.get("geometry") or {}
    if not isinstance(geometry, dict):
        diags.append(Diagnostic("error", "geometry", "expected a mapping"))
        geometry = {}
    quadrature = data.get("quadrature") or {}
    try:
        QuadratureSpec(**quadrature)
    except (TypeError, ValueError) as exc:
        diags.append(Diagnostic("error", "quadrature", str(exc)))
    output = data.get("output") or {}
    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        diags.append(Diagnostic("error", "output.format", f"must be one of {FORMATS}; got {fmt!r}"))
    cfg = ScenarioConfig(materials, atoms, str(scenario), geometry, quadrature, output, data)
    return cfg, diags


def _ref(cfg: ScenarioConfig, key: str, table: str, diags, where: str | None = None, required: bool = True):
    where = where or f"geometry.{key}"
    name = cfg.geometry.get(key) if where == f"geometry.{key}" else None
    return _resolve(cfg, name, table, diags, where, required)


def _resolve(cfg: ScenarioConfig, name, table: str, diags, where: str, required: bool = True):
    lib = cfg.materials if table == "materials" else cfg.atoms
    if name is None:
        if required:
            diags.append(Diagnostic("error", where, "missing"))
        return None
    if name not in lib:
        if name == "vacuum" and table == "materials":
            return MaterialModel(name="vacuum")
        diags.append(Diagnostic("error", where, f"unknown {table[:-1]} {name!r}"))
        return None
    return lib[name]


def _check_density(atom: AtomModel | None, density, where: str, diags):
    try:
        density = float(density)
    except (TypeError, ValueError):
        diags.append(Diagnostic("error", where, "must be a number"))
        return
    if density < 0:
        diags.append(Diagnostic("error", where, "must be >= 0"))
    elif atom is not None and density * atom.alpha_static > EXPANSION_THRESHOLD:
        diags.append(
            Diagnostic(
                "warning",
                where,
                f"N*alpha = {density * atom.alpha_static:.3g} exceeds {EXPANSION_THRESHOLD:g}; "
                "first-order expansions lose accuracy",
            )
        )


def validate_config(cfg: ScenarioConfig) -> list[Diagnostic]:
    """Scenario-level checks: names resolve, signs and ranges make sense."""
    diags: list[Diagnostic] = []
    g = cfg.geometry
    sc = cfg.scenario
    if sc in ("vdw-curve", "vdw-asymptotes"):
        _ref(cfg, "medium1", "materials", diags)
        _ref(cfg, "medium2", "materials", diags)
        _ref(cfg, "atom_a", "atoms", diags)
        _ref(cfg, "atom_b", "atoms", diags)
        if "z_a" in g or "z_b" in g:
            za, zb = g.get("z_a"), g.get("z_b")
            if za is None or zb is None:
                diags.append(Diagnostic("error", "geometry", "give both z_a and z_b"))
            else:
                zas = grid(za, "geometry.z_a", diags)
                zbs = grid(zb, "geometry.z_b", diags)
                if zas is not None and np.any(zas >= 0):
                    diags.append(Diagnostic("error", "geometry.z_a", "atom A must sit in medium 1: z_a < 0"))
                if zbs is not None and np.any(zbs <= 0):
                    diags.append(Diagnostic("error", "geometry.z_b", "atom B must sit in medium 2: z_b > 0"))
                if zas is not None and zbs is not None and zas.size != zbs.size and 1 not in (zas.size, zbs.size):
                    diags.append(Diagnostic("error", "geometry", "z_a and z_b grids differ in length"))
        else:
            seps = grid(g.get("separations"), "geometry.separations", diags)
            if seps is not None and np.any(seps <= 0):
                diags.append(Diagnostic("error", "geometry.separations", "separations must be > 0"))
            frac = g.get("z_b_fraction", 0.5)
            if not isinstance(frac, (int, float)) or not 0 < frac < 1:
                diags.append(Diagnostic("error", "geometry.z_b_fraction", "must lie in (0, 1)"))
    elif sc == "ratio-scan":
        _ref(cfg, "medium1", "materials", diags)
        m2 = g.get("medium2")
        names = m2 if isinstance(m2, list) else [m2]
        for i, name in enumerate(names):
            _resolve(cfg, name, "materials", diags, f"geometry.medium2[{i}]" if isinstance(m2, list) else "geometry.medium2")
        for key in ("atom_a", "atom_b"):
            if key in g:
                _ref(cfg, key, "atoms", diags)
        fr = grid(g.get("fractions"), "geometry.fractions", diags)
        if fr is not None and np.any((fr <= 0) | (fr >= 1)):
            diags.append(Diagnostic("error", "geometry.fractions", "z_B/Z values must lie in (0, 1)"))
        if "separation" in g and not (isinstance(g["separation"], (int, float)) and g["separation"] > 0):
            diags.append(Diagnostic("error", "geometry.separation", "must be > 0"))
        if g.get("regime", "retarded") not in ("retarded", "nonretarded", "both"):
            diags.append(Diagnostic("error", "geometry.regime", "must be retarded, nonretarded or both"))
    elif sc == "cp-potential":
        _ref(cfg, "medium1", "materials", diags)
        _ref(cfg, "medium2", "materials", diags)
        _ref(cfg, "atom_a", "atoms", diags)
        b = _ref(cfg, "atom_b", "atoms", diags)
        _check_density(b, g.get("density_b", 0.0), "geometry.density_b", diags)
        zas = grid(g.get("z_a"), "geometry.z_a", diags)
        if zas is not None and np.any(zas >= 0):
            diags.append(Diagnostic("error", "geometry.z_a", "atom A must sit in medium 1: z_a < 0"))
    elif sc == "slab-force":
        _ref(cfg, "host", "materials", diags)
        dop = _ref(cfg, "dopant", "atoms", diags)
        _check_density(dop, g.get("density", 0.0), "geometry.density", diags)
        t = g.get("thickness")
        if not (isinstance(t, (int, float)) and t > 0):
            diags.append(Diagnostic("error", "geometry.thickness", "must be > 0"))
        seps = grid(g.get("separations"), "geometry.separations", diags)
        if seps is not None and np.any(seps <= 0):
            diags.append(Diagnostic("error", "geometry.separations", "separations must be > 0"))
        mirror = g.get("mirror") or {"kind": "perfect"}
        kind = mirror.get("kind", "perfect") if isinstance(mirror, dict) else None
        if kind not in ("perfect", "interface", "composite"):
            diags.append(Diagnostic("error", "geometry.mirror.kind", "must be perfect, interface or composite"))
        elif kind in ("interface", "composite"):
            _resolve(cfg, mirror.get("medium2"), "materials", diags, "geometry.mirror.medium2")
            if kind == "composite":
                mdop = _resolve(cfg, mirror.get("dopant"), "atoms", diags, "geometry.mirror.dopant")
                _check_density(mdop, mirror.get("density", 0.0), "geometry.mirror.density", diags)
    elif sc == "consistency-report":
        cases = g.get("cases")
        if not isinstance(cases, list) or not cases:
            diags.append(Diagnostic("error", "geometry.cases", "expected a non-empty list"))
        else:
            for i, case in enumerate(cases):
                where = f"geometry.cases[{i}]"
                if not isinstance(case, dict):
                    diags.append(Diagnostic("error", where, "expected a mapping"))
                    continue
                _resolve(cfg, case.get("medium1"), "materials", diags, f"{where}.medium1")
                _resolve(cfg, case.get("medium2"), "materials", diags, f"{where}.medium2")
                _resolve(cfg, case.get("atom_a"), "atoms", diags, f"{where}.atom_a")
                b = _resolve(cfg, case.get("atom_b"), "atoms", diags, f"{where}.atom_b")
                _check_density(b, case.get("density_b", 1e-3), f"{where}.density_b", diags)
                za = case.get("z_a")
                if not (isinstance(za, (int, float)) and za < 0):
                    diags.append(Diagnostic("error", f"{where}.z_a", "atom A must sit in medium 1: z_a < 0"))
        thr = g.get("threshold", 1e-4)
        if not (isinstance(thr, (int, float)) and thr > 0):
            diags.append(Diagnostic("error", "geometry.threshold", "must be > 0"))
    return diags
