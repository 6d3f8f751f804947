"""Batch experiment runner over the library.

Subcommands: verify, sweep, gap-scan, proof-check, simulate.  Runs are
described by a JSON config file; unknown fields are rejected with the
offending field named, and syntax errors carry line/column positions.

Exit codes: 0 = pass, 1 = claim failed, 2 = configuration error,
3 = numerical or feasibility error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import (
    AdialabError,
    ConfigError,
    DomainError,
    FeasibilityError,
    GapCollapseError,
    NonConvergenceError,
    NumericalError,
    UnderResolvedGridError,
)
from .evolution import EvolutionConfig, distance_phase_invariant, evolve_discrete
from .problems import InstanceSpec
from .proofcheck import run_proofcheck
from .spectral import spectral_gap, track_eigenpath
from .theorem import verify

EXIT_PASS = 0
EXIT_CLAIM_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (
    FeasibilityError,
    GapCollapseError,
    NonConvergenceError,
    UnderResolvedGridError,
    NumericalError,
)

_ALLOWED_KEYS = {
    "verify": {"instance", "delta", "case", "T_override", "grid_size", "disc_tol",
               "step_ceiling"},
    "sweep": {"instance", "delta", "case", "T_values", "grid_size", "disc_tol",
              "step_ceiling"},
    "gap-scan": {"instance", "grid_size"},
    "proof-check": {"instance", "delta", "L", "T", "grid_size", "k_max"},
    "simulate": {"instance", "T", "L", "snapshot_stride", "grid_size",
                 "sign_convention"},
}

_REQUIRED_KEYS = {
    "verify": {"instance", "delta"},
    "sweep": {"instance", "delta", "T_values"},
    "gap-scan": {"instance"},
    "proof-check": {"instance", "delta", "L"},
    "simulate": {"instance", "T", "L"},
}


def _load_config(path: str, command: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    allowed = _ALLOWED_KEYS[command]
    for key in data:
        if key not in allowed:
            raise ConfigError(
                f"{path}: unknown field {key!r} for command {command!r}; "
                f"allowed: {sorted(allowed)}"
            )
    missing = _REQUIRED_KEYS[command] - set(data)
    if missing:
        raise ConfigError(
            f"{path}: missing required field(s) {sorted(missing)} "
            f"for command {command!r}"
        )
    return data


def _expect(data: dict, key: str, kinds, default=None, where: str = "config"):
    if key not in data:
        return default
    value = data[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ConfigError(
            f"{where}: field {key!r} has type {type(value).__name__}, "
            f"expected {kinds if isinstance(kinds, type) else '/'.join(k.__name__ for k in kinds)}"
        )
    return value


def _build_instance(data: dict, seed_override: int | None) -> InstanceSpec:
    raw = data["instance"]
    if not isinstance(raw, dict):
        raise ConfigError("field 'instance' must be an object")
    unknown = set(raw) - {"kind", "params"}
    if unknown:
        raise ConfigError(f"field 'instance': unknown sub-field(s) {sorted(unknown)}")
    if "kind" not in raw or not isinstance(raw["kind"], str):
        raise ConfigError("field 'instance.kind' must be a string")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("field 'instance.params' must be an object")
    params = dict(params)
    if seed_override is not None:
        if raw["kind"] != "random_interpolation":
            raise ConfigError(
                f"--seed only applies to random_interpolation instances, "
                f"not {raw['kind']!r}"
            )
        params["seed"] = seed_override
    spec = InstanceSpec(raw["kind"], params)
    try:
        spec.build()
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return spec


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as handle:
            handle.write(text)


def _csv(header: str, rows: list[str]) -> str:
    return "\n".join([header] + rows) + "\n"


def cmd_verify(args) -> int:
    data = _load_config(args.config, "verify")
    if args.format == "csv":
        raise ConfigError("verify emits a JSON verdict; use --format json")
    spec = _build_instance(data, args.seed)
    verdict = verify(
        spec.build(),
        delta=float(_expect(data, "delta", (int, float))),
        case=_expect(data, "case", str, "general"),
        T_override=_expect(data, "T_override", (int, float)),
        grid_size=int(_expect(data, "grid_size", int, 1025)),
        disc_tol=_expect(data, "disc_tol", (int, float)),
        step_ceiling=int(_expect(data, "step_ceiling", int, 2**30)),
    )
    payload = verdict.to_dict()
    payload["config"] = data
    _write(args.out, _dump_json(payload))
    return EXIT_PASS if verdict.passed else EXIT_CLAIM_FAILED


def _sweep_point(spec: InstanceSpec, data: dict, t_value: float):
    verdict = verify(
        spec.build(),
        delta=float(data["delta"]),
        case=data.get("case", "general"),
        T_override=t_value,
        grid_size=int(data.get("grid_size", 1025)),
        disc_tol=data.get("disc_tol"),
        step_ceiling=int(data.get("step_ceiling", 2**30)),
    )
    return verdict


def cmd_sweep(args) -> int:
    data = _load_config(args.config, "sweep")
    t_values = data["T_values"]
    if not isinstance(t_values, list) or not t_values:
        raise ConfigError("field 'T_values' must be a nonempty list of numbers")
    for i, value in enumerate(t_values):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"field 'T_values[{i}]' must be a number")
    _expect(data, "delta", (int, float))
    spec = _build_instance(data, args.seed)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            verdicts = list(
                pool.map(lambda t: _sweep_point(spec, data, float(t)), t_values)
            )
    else:
        verdicts = [_sweep_point(spec, data, float(t)) for t in t_values]

    if args.format == "json":
        payload = {
            "config": data,
            "rows": [
                {
                    "T": v.T_used,
                    "L_used": v.L_used,
                    "dist_phase_inv": v.distance_phase_invariant,
                    "dist_gauge": v.distance_gauge_fixed,
                }
                for v in verdicts
            ],
        }
        _write(args.out, _dump_json(payload))
    else:
        rows = [
            f"{v.T_used!r},{v.L_used},{v.distance_phase_invariant!r},"
            f"{v.distance_gauge_fixed!r}"
            for v in verdicts
        ]
        _write(args.out, _csv("T,L_used,dist_phase_inv,dist_gauge", rows))
    return EXIT_PASS


def cmd_gap_scan(args) -> int:
    data = _load_config(args.config, "gap-scan")
    spec = _build_instance(data, args.seed)
    h = spec.build()
    grid_size = int(_expect(data, "grid_size", int, 1025))
    path = track_eigenpath(h, grid_size)
    report = spectral_gap(h, path)
    if args.format == "json":
        payload = report.to_dict()
        payload["gammas"] = path.gammas.tolist()
        payload["config"] = data
        _write(args.out, _dump_json(payload))
    else:
        rows = [
            f"{s!r},{g!r},{gap!r}"
            for s, g, gap in zip(path.grid, path.gammas, report.gap_values)
        ]
        _write(args.out, _csv("s,gamma,gap", rows))
    return EXIT_PASS


def cmd_proof_check(args) -> int:
    data = _load_config(args.config, "proof-check")
    spec = _build_instance(data, args.seed)
    report = run_proofcheck(
        spec.build(),
        L=int(data["L"]),
        delta=float(data["delta"]),
        total_time=_expect(data, "T", (int, float)),
        norm_grid=int(_expect(data, "grid_size", int, 1025)),
        k_max=_expect(data, "k_max", int),
    )
    payload = report.to_dict()
    payload["config"] = data
    json_text = _dump_json(payload)
    csv_text = "\n".join(report.csv_rows()) + "\n"
    if args.out is not None:
        # the full report ships as both JSON and a CSV table
        _write(args.out + ".json", json_text)
        _write(args.out + ".csv", csv_text)
        sys.stdout.write(f"wrote {args.out}.json and {args.out}.csv\n")
    else:
        _write(None, csv_text if args.format == "csv" else json_text)
    return EXIT_PASS if report.passed else EXIT_CLAIM_FAILED


def cmd_simulate(args) -> int:
    data = _load_config(args.config, "simulate")
    if args.format == "json":
        raise ConfigError("simulate emits CSV snapshots; use --format csv")
    spec = _build_instance(data, args.seed)
    h = spec.build()
    total_time = float(data["T"])
    steps = int(data["L"])
    stride = int(_expect(data, "snapshot_stride", int, max(1, steps // 100)))
    grid_size = int(_expect(data, "grid_size", int, 1025))
    sign = _expect(data, "sign_convention", str, "paper_plus")

    path = track_eigenpath(h, grid_size)
    cfg = EvolutionConfig(total_time, steps, sign, stride)
    result = evolve_discrete(h, path.states[0], cfg)
    rows = []
    for step, state in result.snapshots:
        s = step / steps
        idx = int(round(s * (grid_size - 1)))
        dist = distance_phase_invariant(state, path.states[idx])
        rows.append(f"{step},{s!r},{dist!r},{path.gammas[idx]!r}")
    _write(args.out, _csv("step,s,distance_to_path,gamma", rows))
    return EXIT_PASS


_COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "gap-scan": cmd_gap_scan,
    "proof-check": cmd_proof_check,
    "simulate": cmd_simulate,
}

_DEFAULT_FORMAT = {
    "verify": "json",
    "sweep": "csv",
    "gap-scan": "csv",
    "proof-check": "json",
    "simulate": "csv",
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adialab",
        description="Adiabatic runtime-bound laboratory: batch experiment runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.format is None:
        args.format = _DEFAULT_FORMAT[args.command]
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdialabError as exc:  # residual library failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
