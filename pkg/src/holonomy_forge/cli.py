"""JSON-configured runs of the library workflows.

One subcommand: ``holonomy-forge run config.json``.  The config picks a
mode (abelian, holonomy, geometry, measure, sweep) and its parameters;
results go to stdout or --output as JSON or CSV.  Identical config and
seed produce byte-identical output; timing never enters the payload, it is
printed to stderr.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np
from jsonschema import Draft202012Validator

from .abelian_slice import AbelianPulse, abelian_orange_slice, dynamical_phase
from .chain_model import CouplingSet, coupling_matrix, excitation_leakage, subspace_projector
from .errors import ConfigError, NumericalConditionError
from .evolution_engine import (
    PulseSpec,
    closed_form_evolution,
    compose_schedule,
    sliced_evolution,
)
from .holonomy import (
    CONDITION_TOL,
    build_slice,
    fixed_pole_frames,
    holonomy_pair,
    mutual_unbiasedness,
    rotating_plane_projector,
    validate_slice_conditions,
)
from .matrix_core import dagger, svd2
from .measurement import (
    MeasurementConfig,
    invert_holonomy,
    optimize_measurement,
    survival_probability,
    tomographic_probes,
    w_gates,
)

SCHEMA_VERSION = 1

_TABLE_MODES = ("geometry", "sweep")
_SCHEMA_CACHE: dict = {}


def _schema(name: str) -> dict:
    if name not in _SCHEMA_CACHE:
        text = resources.files(__package__).joinpath("schemas").joinpath(name).read_text("utf-8")
        _SCHEMA_CACHE[name] = json.loads(text)
    return _SCHEMA_CACHE[name]


def _complex_to_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _matrix_to_json(m: np.ndarray) -> list:
    return [[_complex_to_json(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _decomposition_to_json(dec) -> dict:
    return {
        "chi": float(dec.chi),
        "phi": float(dec.phi),
        "axis": [float(x) for x in dec.axis],
    }


def _fmt_cell(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _render_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt_cell(x) for x in row))
    return "\n".join(lines) + "\n"


def _pulse_from_json(obj: dict) -> PulseSpec:
    couplings = CouplingSet(j=tuple(obj["j"]), dz=tuple(obj["dz"]))
    return PulseSpec(couplings=couplings, area=float(obj["area"]), label=obj.get("label", ""))


def _slice_from_json(p1_obj: dict, p2_obj: dict, tol: float):
    pulse1 = _pulse_from_json(p1_obj)
    pulse2 = _pulse_from_json(p2_obj)
    spec = build_slice(pulse1, pulse2, tol)
    for declared, derived, name in ((p1_obj.get("p"), spec.p1, "pulse1"), (p2_obj.get("p"), spec.p2, "pulse2")):
        if declared is not None and declared != derived:
            raise ConfigError(f"{name} declares p={declared} but the couplings give p={derived}")
    return spec


# ---------------------------------------------------------------------------
# mode runners


def _run_abelian(params: dict, tol: float):
    phi1 = float(params["phi1"])
    phi2 = float(params["phi2"])
    slices = int(params.get("slices", 10_000))
    gate = abelian_orange_slice(phi1, phi2)
    pulses = (AbelianPulse(phi1, math.pi), AbelianPulse(phi2, -math.pi))
    results = {
        "gate": _matrix_to_json(gate),
        "omega": 2.0 * (phi2 - phi1),
        "phase_pole0": float(np.angle(gate[0, 0])),
        "phase_pole1": float(np.angle(gate[1, 1])),
        "dynamical_phase": {
            "pole0": dynamical_phase(pulses, 0, slices),
            "pole1": dynamical_phase(pulses, 1, slices),
        },
    }
    diagnostics = {
        "off_diagonal_max": float(max(abs(gate[0, 1]), abs(gate[1, 0]))),
        "unitarity_deviation": float(np.max(np.abs(dagger(gate) @ gate - np.eye(2)))),
    }
    return results, diagnostics


def _run_holonomy(params: dict, tol: float):
    spec = _slice_from_json(params["pulse1"], params["pulse2"], tol)
    pair = holonomy_pair(spec)
    full = compose_schedule((spec.pulse1, spec.pulse2), "full16")
    cond1 = validate_slice_conditions(coupling_matrix(spec.pulse1.couplings), spec.pulse1.area, tol)
    cond2 = validate_slice_conditions(coupling_matrix(spec.pulse2.couplings), spec.pulse2.area, tol)
    results = {
        "uc0": _matrix_to_json(pair.uc0),
        "uc1": _matrix_to_json(pair.uc1),
        "dec0": _decomposition_to_json(pair.dec0),
        "dec1": _decomposition_to_json(pair.dec1),
        "delta_chi": float(pair.delta_chi),
        "branches": {"p1": spec.p1, "p2": spec.p2, "sign1": spec.sign1, "sign2": spec.sign2},
    }
    diagnostics = {
        "condition_residual_pulse1": float(cond1.residual),
        "condition_residual_pulse2": float(cond2.residual),
        "excitation_leakage": excitation_leakage(full),
        "unitarity_deviation_uc0": float(np.max(np.abs(dagger(pair.uc0) @ pair.uc0 - np.eye(2)))),
        "unitarity_deviation_uc1": float(np.max(np.abs(dagger(pair.uc1) @ pair.uc1 - np.eye(2)))),
    }
    return results, diagnostics


def _geometry_rows(pulse: PulseSpec, samples: int):
    traces = mutual_unbiasedness(pulse, samples)
    t_block = coupling_matrix(pulse.couplings)
    p0 = subspace_projector(0)
    rows = []
    fractions = np.linspace(0.0, 1.0, samples)
    for i, f in enumerate(fractions):
        p_frames = rotating_plane_projector(pulse, float(f))
        u_partial = closed_form_evolution(t_block, float(f) * pulse.area)
        p_evolved = u_partial @ p0 @ dagger(u_partial)
        deviation = float(np.max(np.abs(p_frames - p_evolved)))
        rows.append([float(f), float(traces[i, 0]), float(traces[i, 1]), deviation])
    return ["t_fraction", "trace_plus", "trace_minus", "projector_deviation"], rows


def _run_geometry(params: dict, tol: float):
    pulse = _pulse_from_json(params["pulse"])
    samples = int(params.get("samples", 50))
    return _geometry_rows(pulse, samples)


def _run_measure(params: dict, seed: int, tol: float):
    spec = _slice_from_json(params["pulse1"], params["pulse2"], tol)
    pair = holonomy_pair(spec)
    subspace = int(params.get("probe_subspace", 0))
    budget = int(params.get("budget", 5000))
    restarts = int(params.get("restarts", 8))
    probes = tomographic_probes(subspace)
    opt = optimize_measurement(pair, probes, budget=budget, restarts=restarts, seed=seed)

    block = pair.uc0 if subspace == 0 else pair.uc1
    inv0 = invert_holonomy(block)
    if subspace == 0:
        inverter = inv0
    else:
        inverter = MeasurementConfig(e=inv0.e, j13=0.0, d13=0.0, j24=inv0.j13, d24=inv0.d13, b=inv0.b)
    w_opt = w_gates(opt.config)[subspace]
    fidelity = float(abs(np.trace(w_opt @ block)) / 2.0)
    inverter_p_min = min(survival_probability(s, pair, inverter) for s in probes.states)
    results = {
        "config": dataclasses.asdict(opt.config),
        "p_min": float(opt.p_min),
        "iterations": int(opt.iterations),
        "fidelity": fidelity,
        "inverter_config": dataclasses.asdict(inverter),
        "inverter_p_min": float(inverter_p_min),
    }
    diagnostics = {
        "probe_subspace": subspace,
        "budget": budget,
        "restarts": restarts,
    }
    return results, diagnostics


def _sweep_values(params: dict) -> list:
    start = float(params["start"])
    stop = float(params["stop"])
    steps = int(params["steps"])
    if steps == 0:
        return []
    return [start + k * (stop - start) / steps for k in range(steps)]


def _require(params: dict, key: str, axis: str):
    if key not in params:
        raise ConfigError(f"sweep axis {axis!r} requires parameter {key!r}")
    return params[key]


def _run_sweep(params: dict, jobs: int, seed: int, tol: float):
    axis = params["axis"]
    values = _sweep_values(params)

    if axis == "phi2":
        phi1 = float(_require(params, "phi1", axis))
        columns = ["phi2", "phase_pole0", "phase_pole1", "off_diagonal_max"]

        def point(v: float):
            gate = abelian_orange_slice(phi1, v)
            two_pi = 2.0 * math.pi
            return [
                v,
                float(np.angle(gate[0, 0])) % two_pi,
                float(np.angle(gate[1, 1])) % two_pi,
                float(max(abs(gate[0, 1]), abs(gate[1, 0]))),
            ]

    elif axis == "area":
        pulse_obj = dict(_require(params, "pulse", axis))
        couplings = CouplingSet(j=tuple(pulse_obj["j"]), dz=tuple(pulse_obj["dz"]))
        slices = int(params.get("slices", 1024))
        t_block = coupling_matrix(couplings)
        columns = ["area", "closed_vs_sliced_frobenius", "leakage", "unitarity_deviation"]

        def point(v: float):
            closed = closed_form_evolution(t_block, v)
            sliced = sliced_evolution(couplings, v, slices, "effective4")
            full = sliced_evolution(couplings, v, 1, "full16")
            return [
                v,
                float(np.linalg.norm(closed - sliced)),
                excitation_leakage(full),
                float(np.max(np.abs(dagger(closed) @ closed - np.eye(4)))),
            ]

    elif axis == "t_fraction":
        pulse = _pulse_from_json(_require(params, "pulse", axis))
        tri = svd2(coupling_matrix(pulse.couplings))
        plus, minus = fixed_pole_frames(tri.u, tri.v)
        p_plus, p_minus = plus.projector(), minus.projector()
        p0 = subspace_projector(0)
        t_block = coupling_matrix(pulse.couplings)
        columns = ["t_fraction", "trace_plus", "trace_minus", "projector_deviation"]

        def point(v: float):
            p_t = rotating_plane_projector(pulse, v)
            u_partial = closed_form_evolution(t_block, v * pulse.area)
            p_evolved = u_partial @ p0 @ dagger(u_partial)
            return [
                v,
                float(np.trace(p_plus @ p_t).real),
                float(np.trace(p_minus @ p_t).real),
                float(np.max(np.abs(p_t - p_evolved))),
            ]

    elif axis in ("e", "j13", "d13", "b"):
        spec = _slice_from_json(_require(params, "pulse1", axis), _require(params, "pulse2", axis), tol)
        pair = holonomy_pair(spec)
        base = MeasurementConfig(**params.get("config", {}))
        probes = tomographic_probes(0)
        columns = [axis, "p_min"]

        def point(v: float):
            cfg = dataclasses.replace(base, **{axis: v})
            p_min = min(survival_probability(s, pair, cfg) for s in probes.states)
            return [v, float(p_min)]

    else:  # pragma: no cover - schema forbids it
        raise ConfigError(f"unknown sweep axis {axis!r}")

    if jobs > 1 and values:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(point, values))
    else:
        rows = [point(v) for v in values]
    return columns, rows


# ---------------------------------------------------------------------------
# driver


def _validate_config(config: dict) -> None:
    validator = Draft202012Validator(_schema("experiment.schema.json"))
    errors = sorted(validator.iter_errors(config), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        first = errors[0]
        path = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {first.message}")


def _effective_config(config: dict, seed: int) -> dict:
    echoed = {
        "schema_version": config["schema_version"],
        "mode": config["mode"],
        "seed": seed,
        "parameters": config["parameters"],
    }
    return echoed


def run_config(config: dict, seed_override=None, tolerance=None, jobs: int = 1) -> tuple:
    """Execute a validated config; returns (text, is_csv, effective_config)."""
    _validate_config(config)
    mode = config["mode"]
    seed = int(seed_override if seed_override is not None else config.get("seed", 0))
    tol = float(tolerance) if tolerance is not None else CONDITION_TOL
    params = config["parameters"]

    out_cfg = config.get("output", {})
    fmt = out_cfg.get("format")
    if fmt is None:
        fmt = "csv" if mode in _TABLE_MODES else "json"
    if fmt == "csv" and mode not in _TABLE_MODES:
        raise ConfigError(f"mode {mode!r} reports structured results; csv output is only for {_TABLE_MODES}")

    effective = _effective_config(config, seed)
    if mode == "abelian":
        results, diagnostics = _run_abelian(params, tol)
    elif mode == "holonomy":
        results, diagnostics = _run_holonomy(params, tol)
    elif mode == "geometry":
        columns, rows = _run_geometry(params, tol)
        results = {"columns": columns, "rows": rows}
        diagnostics = {"row_count": len(rows)}
    elif mode == "measure":
        results, diagnostics = _run_measure(params, seed, tol)
    elif mode == "sweep":
        columns, rows = _run_sweep(params, jobs, seed, tol)
        results = {"columns": columns, "rows": rows}
        diagnostics = {"row_count": len(rows)}
    else:  # pragma: no cover - schema forbids it
        raise ConfigError(f"unknown mode {mode!r}")

    if fmt == "csv":
        return _render_csv(results["columns"], results["rows"]), True, effective

    report = {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "config": effective,
        "results": results,
        "diagnostics": diagnostics,
    }
    return json.dumps(report, indent=2, sort_keys=True) + "\n", False, effective


def _emit_error(exc: Exception) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holonomy-forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a JSON experiment config")
    run_p.add_argument("config", help="path to the experiment config (JSON)")
    run_p.add_argument("--output", help="write results to this path instead of stdout")
    run_p.add_argument("--format", choices=["csv", "json"], help="override the output format")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel workers for sweep points")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--tolerance", type=float, help="override the pulse-condition tolerance")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
        if args.format is not None:
            config.setdefault("output", {})["format"] = args.format
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        text, _, _ = run_config(
            config,
            seed_override=args.seed,
            tolerance=args.tolerance,
            jobs=args.jobs,
        )
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except NumericalConditionError as exc:
        _emit_error(exc)
        return 3

    out_path = args.output or config.get("output", {}).get("path")
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    elapsed = time.perf_counter() - started
    print(f"completed in {elapsed:.3f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
