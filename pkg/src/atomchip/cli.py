"""Command-line entry point ``atomchip``.

Every subcommand except ``report`` and ``sweep`` evaluates one operation,
either at a single point (``--param key=value``) or over a JSON scenario
(``--config``) or a built-in scenario (``--scenario``).  ``sweep`` runs any
scenario whatever its operation.  Exit codes: 0 success, 1 at least one
point failed with a physics-domain error, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .scenarios import OPERATIONS, SCENARIOS, ConfigError, design_report, run_scenario

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_PHYSICS, EXIT_CONFIG = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario file")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="built-in scenario")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override a parameter (SI units); repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomchip", description="Atom-chip trap, noise and tunneling calculations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "barrier": "crossing-wire barrier height, passage probability and current sensitivity",
        "resolution": "largest height at which a bent-wire lattice resolves its sites",
        "corrugation": "field roughness from wire-edge roughness",
        "noise": "thermal magnetic noise rates and geometry factors",
        "cp": "Casimir-Polder potential of chip surface and wire",
        "lifetime": "tunneling lifetime of a trapped cloud to the chip",
        "nanowire": "size-dependent resistivity and current limits",
    }
    for name, text in helps.items():
        _add_common(sub.add_parser(name, help=text))
    rep = sub.add_parser("report", help="figure-of-merit verdict for a chip design")
    _add_common(rep)
    rep.add_argument("--gate-time", type=float, default=None, help="gate duration in s")
    rep.add_argument("--design", choices=("conclusion", "wide-wire"), default="conclusion")
    sw = sub.add_parser("sweep", help="run a scenario of any operation")
    _add_common(sw)
    return parser


def _parse_params(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([(f"--param {item}", "expected KEY=VALUE")])
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError([(f"--param {key}", f"'{value}' is not a number")]) from None
    return out


def _load_config(args, operation: str | None) -> dict:
    if args.config and args.scenario:
        raise ConfigError([("--config/--scenario", "give at most one")])
    if args.config:
        try:
            config = json.loads(args.config.read_text())
        except FileNotFoundError:
            raise ConfigError([(str(args.config), "file not found")]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError([(str(args.config), f"invalid JSON: {exc}")]) from None
        if not isinstance(config, dict):
            raise ConfigError([("/", "scenario must be a JSON object")])
    elif args.scenario:
        config = json.loads(json.dumps(SCENARIOS[args.scenario]))
    elif operation is not None:
        config = {"name": operation, "operation": operation}
    else:
        raise ConfigError([("--config/--scenario", "sweep needs a scenario")])
    if operation is not None:
        if config.get("operation", operation) != operation:
            raise ConfigError([("/operation", f"scenario runs '{config['operation']}', not '{operation}'")])
        config["operation"] = operation
    params = _parse_params(args.param)
    if params:
        config.setdefault("params", {}).update(params)
        swept = {a.get("param") for a in config.get("sweep", []) if isinstance(a, dict)}
        for key in params:
            if key in swept:
                raise ConfigError([(f"--param {key}", "parameter is also swept")])
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise ConfigError([("--seed", "must be an unsigned 64-bit integer")])
    return config


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def _run_report(args) -> int:
    from .scenarios import CONCLUSION_DESIGN, WIDE_WIRE_DESIGN

    if args.config or args.scenario:
        config = _load_config(args, "report")
        from .scenarios import validate_config

        cfg = validate_config(config)
        if cfg["sweep"]:
            raise ConfigError([("/sweep", "report evaluates a single design; use 'sweep' for grids")])
        design = {**CONCLUSION_DESIGN, **cfg["params"]}
    else:
        design = dict(CONCLUSION_DESIGN if args.design == "conclusion" else WIDE_WIRE_DESIGN)
    params = _parse_params(args.param)
    unknown = sorted(set(params) - set(CONCLUSION_DESIGN))
    if unknown:
        raise ConfigError([(f"--param {k}", "unknown design parameter") for k in unknown])
    design.update(params)
    gate_time = args.gate_time if args.gate_time is not None else design["gate_time"]
    if not gate_time > 0:
        raise ConfigError([("--gate-time", "must be positive")])
    rep = design_report(design, gate_time)
    doc = rep.as_dict()
    if args.format == "json":
        _emit(json.dumps(doc, indent=1, sort_keys=True), args.out)
    else:
        lines = ["key,value"]
        for k, v in doc.items():
            if isinstance(v, list):
                lines.append(f"{k},{' '.join(v)}")
            elif isinstance(v, dict):
                lines.extend(f"lifetime_{kk},{vv!r}" for kk, vv in v.items())
            else:
                lines.append(f"{k},{v!r}" if isinstance(v, float) else f"{k},{v}")
        _emit("\n".join(lines), args.out)
    if rep.verdict == "INDETERMINATE":
        return EXIT_PHYSICS
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            return _run_report(args)
        operation = None if args.command == "sweep" else args.command
        config = _load_config(args, operation)
        table = run_scenario(config, seed=args.seed, jobs=max(1, args.jobs))
    except ConfigError as exc:
        for path, message in exc.problems:
            print(f"config error at {path}: {message}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(table.to_json() if args.format == "json" else table.to_csv(), args.out)
    if table.errors:
        print(f"{table.errors} point(s) failed with physics-domain errors", file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
