"""Command-line front end.

Subcommands: qnd-check, simulate, sweep, design, entropy. Every command is
deterministic given its flags and seed; repeated invocations write
byte-identical output files. Exit codes: 0 success, 2 validation error,
3 infeasible design, 4 internal numerical failure.

Options may come from a JSON config file (--config), a flat object whose
keys are the long flag names with dashes replaced by underscores; explicit
flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .detector import DesignTargets, optimize_design, reference_calibration, entropy_bits
from .dynamics import (
    EffectiveCoupling,
    GaugeAnalogCoupling,
    build_effective,
    build_gauge_analog,
    commutator_norm,
    unitary_tensor,
)
from .hilbert import (
    FockSpace,
    JointSpace,
    NumericalIntegrityError,
    ProbeSpace,
    StateVector,
    basis_state,
    joint_number_operator,
    uniform_superposition,
)
from .metrology import ProtocolConfig, error_backaction_sweep, run_protocol
from .qnd import backaction_metric, epsilon_ba, epsilon_from_distributions, strong_condition

CSV_FLOAT = "{:.17g}"

DEFAULTS = {
    "qnd-check": {
        "hamiltonian": None,  # required
        "g": 1.0,
        "delta": 10.0,
        "t": 1.0,
        "cutoff": 6,
        "system_state": "uniform:0,1",
        "probe_state": "uniform:0,1",
    },
    "simulate": {
        "model": "gauge-analog",
        "branch": "fast",
        "g": 0.1,
        "delta": 10.0,
        "tau_t": 1.0,
        "electrons": 10000,
        "state": "fock:1",
        "cutoff": 6,
        "trials": 200,
        "seed": 12345,
    },
    "sweep": {
        "model": "gauge-analog",
        "branch": "exact",
        "param": "delta",
        "values": None,  # required
        "g": 0.1,
        "delta": 10.0,
        "tau_t": 1.0,
        "electrons": 10000,
        "state": "fock:1",
        "cutoff": 6,
        "trials": 200,
        "seed": 12345,
    },
    "design": {
        "fixture": False,
        "eps_ba": None,
        "eps_err": None,
        "tau_p": None,
        "gamma_bounds": None,
        "delta_bounds": None,
        "n_bounds": None,
        "c_ba": None,
        "c_err": None,
        "c_phi": None,
        "grid_points": 12,
    },
    "entropy": {
        "n_min": None,  # required
        "n_max": None,  # required
        "err": None,  # required
    },
}


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "diverges"
    return value


def _emit(text: str, out_path: str | None) -> None:
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)


def _emit_json(payload: dict, out_path: str | None) -> None:
    _emit(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", out_path)


def _parse_state(spec: str, space) -> StateVector:
    """State flag syntax: 'fock:<k>', 'uniform:<k1>,<k2>,...', or raw
    comma-separated (complex) amplitudes, normalized automatically."""
    if spec.startswith("fock:"):
        return basis_state(space, int(spec[5:]))
    if spec.startswith("uniform:"):
        indices = [int(tok) for tok in spec[8:].split(",") if tok]
        return uniform_superposition(space, indices)
    try:
        amps = [complex(tok) for tok in spec.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse state spec {spec!r}: {exc}") from None
    if len(amps) != space.dimension:
        raise ValueError(
            f"state spec has {len(amps)} amplitudes, space dimension is {space.dimension}"
        )
    return StateVector.normalized(amps, space)


def _parse_bounds(spec, integer: bool = False):
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        lo, hi = spec
    elif isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 2:
            raise ValueError(f"bounds must be LO:HI, got {spec!r}")
        lo, hi = parts
    else:
        raise ValueError(f"cannot parse bounds {spec!r}")
    if integer:
        return (int(lo), int(hi))
    return (float(lo), float(hi))


def _parse_values(spec) -> list[float]:
    if isinstance(spec, (list, tuple)):
        values = [float(v) for v in spec]
    elif isinstance(spec, str):
        values = [float(tok) for tok in spec.split(",") if tok.strip()]
    else:
        raise ValueError(f"cannot parse values {spec!r}")
    if not values:
        raise ValueError("sweep needs at least one value")
    return values


def _merge_options(command: str, args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS[command])
    opts.update({"out": None, "format": None})
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path) as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValueError("config file must contain a JSON object")
        allowed = set(opts)
        for key, value in config.items():
            if key not in allowed:
                raise ValueError(f"unknown config key {key!r} for command {command!r}")
            opts[key] = value
    for key in opts:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            opts[key] = flag_value
    return opts


def _require(opts: dict, keys) -> None:
    for key in keys:
        if opts[key] is None:
            raise ValueError(f"missing required option --{key.replace('_', '-')}")


def _check_json_only(opts: dict) -> None:
    if opts["format"] not in (None, "json"):
        raise ValueError(f"this command emits JSON only, got --format {opts['format']}")


def cmd_qnd_check(opts: dict) -> int:
    _require(opts, ("hamiltonian",))
    _check_json_only(opts)
    space = JointSpace(FockSpace(int(opts["cutoff"])), ProbeSpace(2))
    g, delta, t = float(opts["g"]), float(opts["delta"]), float(opts["t"])
    if opts["hamiltonian"] == "effective":
        h = build_effective(space, EffectiveCoupling(g))
    elif opts["hamiltonian"] == "gauge-analog":
        h = build_gauge_analog(space, GaugeAnalogCoupling(g, delta))
    else:
        raise ValueError(f"unknown hamiltonian {opts['hamiltonian']!r}")
    a = _parse_state(opts["system_state"], space.system)
    b = _parse_state(opts["probe_state"], space.probe)
    n_joint = joint_number_operator(space)
    tensor = unitary_tensor(h, t)
    report = epsilon_ba(tensor, a, b)
    payload = {
        "hamiltonian": opts["hamiltonian"],
        "g": g,
        "delta": delta if opts["hamiltonian"] == "gauge-analog" else None,
        "t": t,
        "cutoff": int(opts["cutoff"]),
        "strong_condition": strong_condition(h, n_joint),
        "commutator_norm": commutator_norm(h, n_joint),
        "epsilon_ba": report.epsilon_ba,
        "delta_n_ba": backaction_metric(tensor, a, b),
    }
    _emit_json(payload, opts["out"])
    return 0


def _protocol_config(opts: dict) -> ProtocolConfig:
    space = FockSpace(int(opts["cutoff"]))
    return ProtocolConfig(
        model=opts["model"],
        g=float(opts["g"]),
        delta=float(opts["delta"]),
        tau_t=float(opts["tau_t"]),
        n_electrons=int(opts["electrons"]),
        initial_state=_parse_state(opts["state"], space),
        rng_seed=int(opts["seed"]),
        trials=int(opts["trials"]),
    )


def cmd_simulate(opts: dict) -> int:
    _check_json_only(opts)
    cfg = _protocol_config(opts)
    result = run_protocol(cfg, opts["branch"])
    eps = epsilon_from_distributions(
        cfg.initial_state.probabilities(), result.final_number_distribution
    )
    payload = {
        "model": cfg.model,
        "branch": opts["branch"],
        "g": cfg.g,
        "delta": cfg.delta,
        "tau_t": cfg.tau_t,
        "electrons": cfg.n_electrons,
        "trials": cfg.trials,
        "seed": cfg.rng_seed,
        "estimate_mean": result.estimate_mean,
        "delta_n_err": result.estimate_rms_error,
        "delta_n_ba": result.delta_n_ba,
        "epsilon_ba": eps,
        "final_distribution": result.final_number_distribution.probabilities,
        "counts": result.counts,
    }
    _emit_json(payload, opts["out"])
    return 0


def cmd_sweep(opts: dict) -> int:
    _require(opts, ("values",))
    cfg = _protocol_config(opts)
    values = _parse_values(opts["values"])
    rows = error_backaction_sweep(cfg, values, param=opts["param"], branch=opts["branch"])
    fmt = opts["format"] or "csv"
    if fmt == "csv":
        lines = ["param,value,delta_n_err,delta_n_ba,epsilon_ba"]
        for row in rows:
            lines.append(
                ",".join(
                    [row.param]
                    + [
                        CSV_FLOAT.format(v)
                        for v in (row.value, row.delta_n_err, row.delta_n_ba, row.epsilon_ba)
                    ]
                )
            )
        _emit("\n".join(lines) + "\n", opts["out"])
    elif fmt == "json":
        payload = [
            {
                "param": row.param,
                "value": row.value,
                "delta_n_err": row.delta_n_err,
                "delta_n_ba": row.delta_n_ba,
                "epsilon_ba": row.epsilon_ba,
            }
            for row in rows
        ]
        _emit(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", opts["out"])
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return 0


def cmd_design(opts: dict) -> int:
    _check_json_only(opts)
    ref_design, ref_targets, ref_bounds = reference_calibration()
    if opts["fixture"]:
        fill = {
            "eps_ba": ref_targets.eps_ba,
            "eps_err": ref_targets.eps_err,
            "tau_p": ref_targets.tau_p_min,
            "gamma_bounds": ref_bounds["gamma"],
            "delta_bounds": ref_bounds["delta"],
            "n_bounds": ref_bounds["n_electrons"],
            "c_ba": ref_design.c_ba,
            "c_err": ref_design.c_err,
            "c_phi": ref_design.c_phi,
        }
        for key, value in fill.items():
            if opts[key] is None:
                opts[key] = value
    _require(
        opts,
        ("eps_ba", "eps_err", "tau_p", "gamma_bounds", "delta_bounds", "n_bounds"),
    )
    for key in ("c_ba", "c_err", "c_phi"):
        if opts[key] is None:
            opts[key] = 1.0
    targets = DesignTargets(float(opts["eps_ba"]), float(opts["eps_err"]), float(opts["tau_p"]))
    bounds = {
        "gamma": _parse_bounds(opts["gamma_bounds"]),
        "delta": _parse_bounds(opts["delta_bounds"]),
        "n_electrons": _parse_bounds(opts["n_bounds"], integer=True),
    }
    design, report = optimize_design(
        targets,
        bounds,
        c_ba=float(opts["c_ba"]),
        c_err=float(opts["c_err"]),
        c_phi=float(opts["c_phi"]),
        grid_points=int(opts["grid_points"]),
    )
    payload = {
        "targets": {
            "eps_ba": targets.eps_ba,
            "eps_err": targets.eps_err,
            "tau_p": targets.tau_p_min,
        },
        "design": {
            "gamma": design.gamma,
            "delta": design.delta,
            "tau_p": design.tau_p,
            "n_electrons": design.n_electrons,
            "c_ba": design.c_ba,
            "c_err": design.c_err,
            "c_phi": design.c_phi,
        },
        "report": {
            "feasible": report.feasible,
            "n_min": report.n_min,
            "n_max": report.n_max,
            "delta_n_err": report.delta_n_err,
            "entropy_bits": report.entropy_bits,
            "distinguishable_values": report.distinguishable_values,
            "binding_constraints": list(report.binding_constraints),
        },
    }
    _emit_json(payload, opts["out"])
    return 0 if report.feasible else 3


def cmd_entropy(opts: dict) -> int:
    _check_json_only(opts)
    _require(opts, ("n_min", "n_max", "err"))
    n_min, n_max, err = float(opts["n_min"]), float(opts["n_max"]), float(opts["err"])
    bits = entropy_bits(n_min, n_max, err)
    payload = {
        "n_min": n_min,
        "n_max": n_max,
        "delta_n_err": err,
        "entropy_bits": bits,
        "distinguishable_values": (n_max - n_min) / err,
    }
    _emit_json(payload, opts["out"])
    return 0


HANDLERS = {
    "qnd-check": cmd_qnd_check,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "design": cmd_design,
    "entropy": cmd_entropy,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; explicit flags win")
    sub.add_argument("--out", help="also write the output to this file")
    sub.add_argument("--format", choices=("csv", "json"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qndsim",
        description="Backaction-limited photon-number measurement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qnd-check", help="strong/weak backaction conditions for one interaction")
    p.add_argument("--hamiltonian", choices=("effective", "gauge-analog"))
    p.add_argument("--g", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--system-state", dest="system_state")
    p.add_argument("--probe-state", dest="probe_state")
    _add_common(p)

    for name in ("simulate", "sweep"):
        p = sub.add_parser(
            name,
            help="run the interference protocol"
            if name == "simulate"
            else "protocol runs over a parameter list (CSV table)",
        )
        p.add_argument("--model", choices=("effective", "gauge-analog"))
        p.add_argument("--branch", choices=("fast", "exact"))
        p.add_argument("--g", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--tau-t", dest="tau_t", type=float)
        p.add_argument("--electrons", type=int)
        p.add_argument("--state")
        p.add_argument("--cutoff", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        if name == "sweep":
            p.add_argument("--param", choices=("delta", "g", "N"))
            p.add_argument("--values", help="comma-separated parameter values")
        _add_common(p)

    p = sub.add_parser("design", help="optimize a detector design against targets")
    p.add_argument("--fixture", action="store_const", const=True,
                   help="start from the reference calibration")
    p.add_argument("--eps-ba", dest="eps_ba", type=float)
    p.add_argument("--eps-err", dest="eps_err", type=float)
    p.add_argument("--tau-p", dest="tau_p", type=float)
    p.add_argument("--gamma-bounds", dest="gamma_bounds", help="LO:HI")
    p.add_argument("--delta-bounds", dest="delta_bounds", help="LO:HI")
    p.add_argument("--n-bounds", dest="n_bounds", help="LO:HI (integers)")
    p.add_argument("--c-ba", dest="c_ba", type=float)
    p.add_argument("--c-err", dest="c_err", type=float)
    p.add_argument("--c-phi", dest="c_phi", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    _add_common(p)

    p = sub.add_parser("entropy", help="information per pulse for a given range and error")
    p.add_argument("--n-min", dest="n_min", type=float)
    p.add_argument("--n-max", dest="n_max", type=float)
    p.add_argument("--err", type=float)
    _add_common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        opts = _merge_options(args.command, args)
        return HANDLERS[args.command](opts)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalIntegrityError as exc:
        print(f"numerical integrity failure: {exc}", file=sys.stderr)
        return 4


def main_script() -> None:
    raise SystemExit(main())
