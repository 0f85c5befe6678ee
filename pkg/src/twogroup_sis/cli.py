"""Command-line front end.

Subcommands: r0 | equilibria | simulate | sweep | basin | verify.
All inputs come from a JSON config file (strict schema: unknown keys are
rejected, model rates have no defaults); outputs are CSV/JSON files, each
accompanied by a ``<out>.meta.json`` sidecar holding the fully resolved
configuration so any result can be regenerated.

Exit codes: 0 success, 1 config/parameter validation failure,
2 numerical failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from ._backend import backend_name
from .analysis import (
    basin_probe,
    basin_to_csv,
    basin_to_json,
    core_group_decomposition,
    sweep_to_csv,
    sweep_to_json,
    threshold_sweep,
)
from .equilibria import all_rest_points
from .errors import ConfigError, DomainError, InternalError, ParameterError
from .integrate import (
    IntegratorConfig,
    TerminalReason,
    integrate,
    trajectory_to_csv,
)
from .model import AbsoluteState, ModelParams, PlanarState, ProportionState, r0
from .verify import run_verification

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

#: test hook: set to "negate-planar-field" to feed the verification suite a
#: sign-flipped planar field and prove the suite rejects wrong dynamics
FAULT_ENV = "TWOGROUP_SIS_VERIFY_FAULT"

_TOP_KEYS = {
    "r0": {"params"},
    "equilibria": {"params"},
    "verify": {"params", "integrator"},
    "simulate": {"params", "integrator", "simulate"},
    "sweep": {"params", "integrator", "sweep"},
    "basin": {"params", "integrator", "basin"},
}

_INITIAL_KEYS = {
    "absolute": ("S", "I1", "I2"),
    "proportions": ("s", "i1", "i2"),
    "planar": ("i1", "i2"),
}


def _load_config(path: str, command: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = _TOP_KEYS[command]
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown top-level keys for '{command}': {sorted(unknown)}")
    if "params" not in raw:
        raise ConfigError("config requires a 'params' object")
    if command in ("simulate", "sweep", "basin") and command not in raw:
        raise ConfigError(f"'{command}' requires a '{command}' block")
    return raw


def _integrator_from(raw: dict) -> IntegratorConfig:
    block = raw.get("integrator", {})
    if not isinstance(block, dict):
        raise ConfigError("'integrator' must be an object")
    valid = set(IntegratorConfig().to_dict())
    unknown = set(block) - valid
    if unknown:
        raise ConfigError(f"unknown integrator keys: {sorted(unknown)}")
    for key, value in block.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"integrator.{key} must be a number")
    try:
        return IntegratorConfig(**{k: float(v) for k, v in block.items()})
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _initial_state(block: dict):
    system = block.get("system")
    if system not in _INITIAL_KEYS:
        raise ConfigError("simulate.system must be one of "
                          "'absolute', 'proportions', 'planar'")
    initial = block.get("initial")
    if not isinstance(initial, dict):
        raise ConfigError("simulate.initial must be an object")
    keys = _INITIAL_KEYS[system]
    if set(initial) != set(keys):
        raise ConfigError(f"simulate.initial for '{system}' needs exactly {list(keys)}")
    values = []
    for key in keys:
        v = initial[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"simulate.initial.{key} must be a number")
        values.append(float(v))
    try:
        if system == "absolute":
            return system, AbsoluteState(*values)
        if system == "proportions":
            return system, ProportionState(*values)
        return system, PlanarState(*values)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _write_sidecar(out: str, command: str, resolved: dict) -> None:
    meta = {
        "command": command,
        "config": resolved,
        "backend": backend_name(),
        "version": __version__,
    }
    with open(out + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_r0(args) -> int:
    raw = _load_config(args.config, "r0")
    params = ModelParams.from_dict(raw["params"])
    first, second = core_group_decomposition(params)
    print(f"R0={r0(params)!r}")
    print(f"contribution_group1={first!r}")
    print(f"contribution_group2={second!r}")
    return EXIT_OK


def cmd_equilibria(args) -> int:
    raw = _load_config(args.config, "equilibria")
    params = ModelParams.from_dict(raw["params"])
    points = all_rest_points(params)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump([rp.to_dict() for rp in points], fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_sidecar(args.out, "equilibria", {"params": params.to_dict()})
    print(f"wrote {len(points)} rest point(s) to {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    raw = _load_config(args.config, "simulate")
    params = ModelParams.from_dict(raw["params"])
    config = _integrator_from(raw)
    system, state = _initial_state(raw["simulate"])
    run = integrate(system, params, state, config)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        trajectory_to_csv(run, fh)
    _write_sidecar(args.out, "simulate", {
        "params": params.to_dict(),
        "integrator": config.to_dict(),
        "simulate": raw["simulate"],
        "terminal": run.terminal.value,
    })
    print(f"wrote {len(run.times)} samples to {args.out} "
          f"(terminal: {run.terminal.value})")
    if run.terminal is TerminalReason.STEP_SIZE_UNDERFLOW:
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_sweep(args) -> int:
    raw = _load_config(args.config, "sweep")
    params = ModelParams.from_dict(raw["params"])
    block = raw["sweep"]
    if not isinstance(block, dict) or set(block) != {"parameter", "values"}:
        raise ConfigError("'sweep' block needs exactly 'parameter' and 'values'")
    values = block["values"]
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a non-empty list")
    rows = threshold_sweep(params, block["parameter"], values)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        if args.format == "json":
            sweep_to_json(rows, fh)
        else:
            sweep_to_csv(rows, fh)
    _write_sidecar(args.out, "sweep", {
        "params": params.to_dict(),
        "sweep": {"parameter": block["parameter"],
                  "values": [float(v) for v in values]},
        "format": args.format,
    })
    print(f"wrote {len(rows)} sweep rows to {args.out}")
    return EXIT_OK


def cmd_basin(args) -> int:
    raw = _load_config(args.config, "basin")
    params = ModelParams.from_dict(raw["params"])
    config = _integrator_from(raw)
    block = raw["basin"]
    if not isinstance(block, dict) or set(block) != {"grid_n"}:
        raise ConfigError("'basin' block needs exactly 'grid_n'")
    grid_n = block["grid_n"]
    if isinstance(grid_n, bool) or not isinstance(grid_n, int) or grid_n < 2:
        raise ConfigError("basin.grid_n must be an integer >= 2")
    report = basin_probe(params, grid_n, config)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        if args.format == "json":
            basin_to_json(report, fh)
        else:
            basin_to_csv(report, fh)
    _write_sidecar(args.out, "basin", {
        "params": params.to_dict(),
        "integrator": config.to_dict(),
        "basin": {"grid_n": grid_n},
        "format": args.format,
    })
    counts = ", ".join(f"{k}={v}" for k, v in sorted(report.counts.items()))
    print(f"wrote {len(report.cells)} cells to {args.out} ({counts})")
    return EXIT_OK


def cmd_verify(args) -> int:
    raw = _load_config(args.config, "verify")
    params = ModelParams.from_dict(raw["params"])
    config = _integrator_from(raw)

    from .model import vf_planar
    field = vf_planar
    if os.environ.get(FAULT_ENV) == "negate-planar-field":
        def field(p, st):  # noqa: ANN001 - test hook
            f1, f2 = vf_planar(p, st)
            return (-f1, -f2)

    results = run_verification(params, config, planar_field=field)
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag} {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} properties hold")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the exit-code contract reserves 2
    # for numerical failures, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="twogroup-sis",
                     description="Two-group SIS model: threshold, equilibria, "
                                 "simulation and certification")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, needs_out=False, has_format=False):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON config file")
        if needs_out:
            p.add_argument("--out", required=True, help="output file path")
        if has_format:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    add("r0", "print the reproduction number and its group contributions")
    add("equilibria", "write the rest points as JSON", needs_out=True)
    add("simulate", "integrate one trajectory to CSV", needs_out=True)
    add("sweep", "sweep a parameter, write a report", needs_out=True, has_format=True)
    add("basin", "label a grid of starts by attractor", needs_out=True, has_format=True)
    add("verify", "run the property suite for one parameter set")
    return parser


_COMMANDS = {
    "r0": cmd_r0,
    "equilibria": cmd_equilibria,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "basin": cmd_basin,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ParameterError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InternalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
