"""Batch front-end: run a named scenario from a YAML config and write result rows.

Every row echoes its inputs and carries ``value``, ``err_est`` and
``converged``. Column order is fixed per scenario (see ``COLUMNS``).

Exit status: 0 success, 1 config error, 2 a row did not converge (unless
``--allow-unconverged``), 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import traceback
import warnings
from dataclasses import replace
from datetime import datetime, timezone
from typing import Any

import numpy as np

from . import __version__
from .casimir_polder import (
    DistributionSystem,
    ResonantDenominator,
    SlabSystem,
    cp_atom_force,
    cp_distribution_potential,
    cp_pairwise_oracle,
    local_field_consistency,
    slab_force,
)
from .config import (
    FORMATS,
    ConfigError,
    Diagnostic,
    ScenarioConfig,
    grid,
    load_yaml,
    parse_config,
)
from .config import validate_config as _validate_scenario
from .greens import AtomPositions
from .materials import (
    AtomModel,
    ClausiusMossottiDivergence,
    ExpansionWarning,
    MaterialModel,
    MixtureSpec,
    characteristic_frequencies,
)
from .planar_optics import CompositeMirror, HalfSpacePair, InterfaceMirror, PerfectMirror
from .quadrature import NonConvergenceError, QuadratureError, QuadratureSpec
from .vdw import InterfaceSystem, vdw_full, vdw_nonretarded, vdw_retarded, vdw_single_medium

__all__ = ["COLUMNS", "validate_config", "run_scenario", "write_rows", "read_records", "main"]

EXIT_OK, EXIT_CONFIG, EXIT_UNCONVERGED, EXIT_INTERNAL = 0, 1, 2, 3

COLUMNS = {
    "vdw-curve": ["Z", "z_a", "z_b", "regime", "value", "err_est", "converged"],
    "vdw-asymptotes": [
        "Z", "z_a", "z_b", "regime", "value", "err_est", "nonretarded", "retarded", "converged",
    ],
    "ratio-scan": ["case", "medium1", "medium2", "eps_ratio", "regime", "Z", "z_b_over_Z", "value", "err_est", "converged"],
    "cp-potential": ["z_a", "density_b", "value", "err_est", "converged", "oracle", "oracle_err"],
    "slab-force": [
        "d", "thickness", "density", "mirror", "value", "err_est", "converged", "atom_force", "ratio_to_linear",
    ],
    "consistency-report": [
        "case", "medium1", "medium2", "density_b", "z_a", "force_distribution", "gradient_fd",
        "gradient_integrand", "value", "err_est", "converged", "passed",
    ],
}

# Regime tags: Z * w_max below this is short range, Z * w_min above its inverse is long range.
REGIME_FACTOR = 0.1


def validate_config(cfg) -> list[Diagnostic]:
    """Diagnostics for a raw config mapping or a parsed :class:`ScenarioConfig`.

    Errors make the config unrunnable; warnings (e.g. a dopant density past
    the first-order threshold) do not.
    """
    if isinstance(cfg, ScenarioConfig):
        return _validate_scenario(cfg)
    parsed, diags = parse_config(cfg)
    if not any(d.level == "error" for d in diags if d.field in ("scenario",)):
        diags += _validate_scenario(parsed)
    return diags


def _regime(z: float, w_min: float, w_max: float) -> str:
    if z * w_max < REGIME_FACTOR:
        return "nonretarded"
    if z * w_min > 1.0 / REGIME_FACTOR:
        return "retarded"
    return "intermediate"


def _geometry_positions(g: dict) -> list[AtomPositions]:
    if "z_a" in g:
        za = grid(g["z_a"], "", [])
        zb = grid(g["z_b"], "", [])
        za, zb = np.broadcast_arrays(za, zb)
        return [AtomPositions(float(a), float(b)) for a, b in zip(za, zb)]
    frac = float(g.get("z_b_fraction", 0.5))
    return [AtomPositions(-(1.0 - frac) * z, frac * z) for z in grid(g["separations"], "", [])]


def _resolve_material(cfg: ScenarioConfig, name: str) -> MaterialModel:
    if name == "vacuum" and name not in cfg.materials:
        return MaterialModel(name="vacuum")
    return cfg.materials[name]


def _vdw_rows(cfg: ScenarioConfig, quad: QuadratureSpec, asymptotes: bool):
    g = cfg.geometry
    pair = HalfSpacePair(_resolve_material(cfg, g["medium1"]), _resolve_material(cfg, g["medium2"]))
    a, b = cfg.atoms[g["atom_a"]], cfg.atoms[g["atom_b"]]
    rows = []
    for pos in _geometry_positions(g):
        sys_ = InterfaceSystem(pair, a, b, pos)
        w_min, w_max = sys_.frequency_window()
        res = vdw_full(sys_, quad)
        row = {
            "Z": pos.separation,
            "z_a": pos.z_a,
            "z_b": pos.z_b,
            "regime": _regime(pos.separation, w_min, w_max),
            "value": res.value,
            "err_est": res.abs_err,
            "converged": res.converged,
        }
        if asymptotes:
            nr = vdw_nonretarded(sys_, quad)
            rt = vdw_retarded(sys_, quad)
            row["nonretarded"] = nr.value
            row["retarded"] = rt.value
            row["converged"] = res.converged and nr.converged and rt.converged
        rows.append(row)
    return rows


def _ratio_rows(cfg: ScenarioConfig, quad: QuadratureSpec):
    g = cfg.geometry
    m1 = _resolve_material(cfg, g["medium1"])
    names = g["medium2"] if isinstance(g["medium2"], list) else [g["medium2"]]
    a = cfg.atoms[g["atom_a"]] if "atom_a" in g else AtomModel(1.0, 1.0, "unit")
    b = cfg.atoms[g["atom_b"]] if "atom_b" in g else a
    fractions = grid(g["fractions"], "", [])
    regime = g.get("regime", "retarded")
    regimes = ["retarded", "nonretarded"] if regime == "both" else [regime]
    rows = []
    for case, name in enumerate(names):
        pair = HalfSpacePair(m1, _resolve_material(cfg, name))
        w_min, w_max = characteristic_frequencies([pair.medium1, pair.medium2], [a, b])
        for reg in regimes:
            if reg == "retarded":
                z = float(g.get("separation", 1e3 / w_min))
                ref = vdw_single_medium(m1.n_static, m1.eps_static, a, b, z).value
            else:
                z = float(g.get("separation_short", 1e-3 / w_max))
            for fr in fractions:
                pos = AtomPositions(-(1.0 - fr) * z, fr * z)
                sys_ = InterfaceSystem(pair, a, b, pos)
                if reg == "retarded":
                    res = vdw_retarded(sys_, quad)
                    value, err, ok = res.value / ref, res.abs_err / abs(ref), res.converged
                else:
                    full, nr = vdw_full(sys_, quad), vdw_nonretarded(sys_, quad)
                    value = full.value / nr.value
                    err = abs(value) * (full.abs_err / abs(full.value) + nr.abs_err / abs(nr.value))
                    ok = full.converged and nr.converged
                rows.append({
                    "case": case,
                    "medium1": m1.name,
                    "medium2": name,
                    "eps_ratio": pair.medium2.eps_static / m1.eps_static,
                    "regime": reg,
                    "Z": z,
                    "z_b_over_Z": float(fr),
                    "value": value,
                    "err_est": err,
                    "converged": ok,
                })
    return rows


def _cp_rows(cfg: ScenarioConfig, quad: QuadratureSpec):
    g = cfg.geometry
    pair = HalfSpacePair(_resolve_material(cfg, g["medium1"]), _resolve_material(cfg, g["medium2"]))
    a, b = cfg.atoms[g["atom_a"]], cfg.atoms[g["atom_b"]]
    density = float(g.get("density_b", 0.0))
    oracle = bool(g.get("oracle", False))
    rows = []
    for za in grid(g["z_a"], "", []):
        sys_ = DistributionSystem(pair, a, b, float(za), density)
        res = cp_distribution_potential(sys_, quad, local_field=bool(g.get("local_field", False)))
        row = {
            "z_a": float(za),
            "density_b": density,
            "value": res.value,
            "err_est": res.abs_err,
            "converged": res.converged,
            "oracle": None,
            "oracle_err": None,
        }
        if oracle:
            orc = cp_pairwise_oracle(sys_, quad)
            row.update(oracle=orc.value, oracle_err=orc.abs_err, converged=res.converged and orc.converged)
        rows.append(row)
    return rows


def _mirror(cfg: ScenarioConfig, spec: dict | None):
    spec = spec or {"kind": "perfect"}
    kind = spec.get("kind", "perfect")
    if kind == "perfect":
        return PerfectMirror(), "perfect"
    pair = HalfSpacePair(_resolve_material(cfg, cfg.geometry["host"]), _resolve_material(cfg, spec["medium2"]))
    if kind == "interface":
        return InterfaceMirror(pair), f"interface:{spec['medium2']}"
    dopant = cfg.atoms[spec["dopant"]]
    density = float(spec.get("density", 0.0))
    return CompositeMirror(pair, dopant, density), f"composite:{spec['medium2']}+{spec['dopant']}@{density:g}"


def _slab_rows(cfg: ScenarioConfig, quad: QuadratureSpec):
    g = cfg.geometry
    host = _resolve_material(cfg, g["host"])
    dopant = cfg.atoms[g["dopant"]]
    density = float(g.get("density", 0.0))
    thickness = float(g["thickness"])
    mirror, label = _mirror(cfg, g.get("mirror"))
    mix = MixtureSpec(host, dopant, density)
    rows = []
    for d in grid(g["separations"], "", []):
        d = float(d)
        fs = slab_force(SlabSystem(host, mix, mirror, d, thickness, g.get("cm_order", "exact")), quad)
        fa = cp_atom_force(host, dopant, mirror, d, quad, local_field=True)
        linear = density * thickness * fa.value
        rows.append({
            "d": d,
            "thickness": thickness,
            "density": density,
            "mirror": label,
            "value": fs.value,
            "err_est": fs.abs_err,
            "converged": fs.converged and fa.converged,
            "atom_force": fa.value,
            "ratio_to_linear": fs.value / linear if linear != 0 else math.nan,
        })
    return rows


def _consistency_rows(cfg: ScenarioConfig, quad: QuadratureSpec):
    threshold = float(cfg.geometry.get("threshold", 1e-4))
    strict = replace(quad, strict=True)
    rows = []
    for i, case in enumerate(cfg.geometry["cases"]):
        pair = HalfSpacePair(_resolve_material(cfg, case["medium1"]), _resolve_material(cfg, case["medium2"]))
        density = float(case.get("density_b", 1e-3))
        sys_ = DistributionSystem(
            pair, cfg.atoms[case["atom_a"]], cfg.atoms[case["atom_b"]], float(case["z_a"]), density
        )
        row = {
            "case": i,
            "medium1": case["medium1"],
            "medium2": case["medium2"],
            "density_b": density,
            "z_a": float(case["z_a"]),
        }
        try:
            rep = local_field_consistency(sys_, strict, threshold=threshold)
        except NonConvergenceError:
            row.update(
                force_distribution=math.nan, gradient_fd=math.nan, gradient_integrand=math.nan,
                value=math.nan, err_est=math.nan, converged=False, passed=False,
            )
        else:
            row.update(
                force_distribution=rep.force_distribution,
                gradient_fd=rep.gradient_fd,
                gradient_integrand=rep.gradient_integrand,
                value=rep.max_discrepancy,
                # spread of the two independent derivative routes
                err_est=abs(rep.rel_discrepancy_fd - rep.rel_discrepancy_integrand),
                converged=True,
                passed=rep.passed,
            )
        rows.append(row)
    return rows


_RUNNERS = {
    "vdw-curve": lambda cfg, q: _vdw_rows(cfg, q, False),
    "vdw-asymptotes": lambda cfg, q: _vdw_rows(cfg, q, True),
    "ratio-scan": _ratio_rows,
    "cp-potential": _cp_rows,
    "slab-force": _slab_rows,
    "consistency-report": _consistency_rows,
}


def run_scenario(cfg: ScenarioConfig, rel_tol: float | None = None) -> list[dict[str, Any]]:
    """Compute the rows of ``cfg.scenario`` in input-grid order.

    Quadrature never raises on nonconvergence here; affected rows carry
    ``converged = False``. The consistency report defaults to a tighter
    tolerance because it differentiates numerically.
    """
    defaults = {"strict": False}
    if cfg.scenario == "consistency-report":
        defaults["rel_tol"] = 1e-10
    opts = {**defaults, **cfg.quadrature}
    if rel_tol is not None:
        opts["rel_tol"] = rel_tol
    quad = QuadratureSpec(**opts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExpansionWarning)
        return _RUNNERS[cfg.scenario](cfg, quad)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def write_rows(rows, columns, fmt: str = "csv", header: str | None = None) -> str:
    """Serialize rows; ``header`` becomes a leading ``#`` comment line."""
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])
    elif fmt == "json-records":
        for row in rows:
            buf.write(json.dumps({c: _json_value(row.get(c)) for c in columns}) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return buf.getvalue()


def read_records(text: str, fmt: str = "json-records") -> list[dict]:
    """Parse output written by :func:`write_rows`, skipping comment lines."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if fmt == "json-records":
        return [json.loads(ln) for ln in lines]
    return list(csv.DictReader(lines))


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vdwmedia", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, metavar="PATH", help="YAML scenario config")
    p.add_argument("--output", metavar="PATH", help="output file (default: config output.path, else stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format (default: config output.format, else csv)")
    p.add_argument("--rel-tol", type=float, metavar="X", help="override the quadrature relative tolerance")
    p.add_argument("--allow-unconverged", action="store_true", help="exit 0 even if some rows did not converge")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generated-at header line")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        data = load_yaml(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    diags = validate_config(data)
    for d in diags:
        print(d, file=sys.stderr)
    if any(d.level == "error" for d in diags):
        return EXIT_CONFIG
    cfg, _ = parse_config(data)
    if args.rel_tol is not None and not args.rel_tol > 0:
        print("error: --rel-tol must be positive", file=sys.stderr)
        return EXIT_CONFIG

    try:
        rows = run_scenario(cfg, args.rel_tol)
    except (ValueError, ClausiusMossottiDivergence, ResonantDenominator) as exc:
        print(f"error: invalid physical parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL

    fmt = args.format or cfg.output.get("format", "csv")
    header = None
    if not args.no_timestamp:
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        header = f"generated {stamp} by vdwmedia {__version__}"
    text = write_rows(rows, COLUMNS[cfg.scenario], fmt, header)
    path = args.output or cfg.output.get("path")
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if cfg.scenario == "consistency-report":
        vals = [r["value"] for r in rows]
        worst = max(vals) if all(v == v for v in vals) else math.nan
        thr = float(cfg.geometry.get("threshold", 1e-4))
        verdict = "PASS" if worst < thr else "FAIL"
        print(f"max relative discrepancy {worst:.3e} over {len(rows)} configurations: {verdict} (threshold {thr:g})",
              file=sys.stderr)

    bad = sum(not r["converged"] for r in rows)
    if bad and not args.allow_unconverged:
        print(f"error: {bad} of {len(rows)} rows did not converge", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK
