"""Command-line interface: run searches, sweep curves, cost tables, verify.

Subcommands
    run     one seeded search, JSON outcome
    sweep   probability curves over a rho grid, CSV (or JSON)
    cost    oracle-call report for a problem, JSON
    verify  cross-path agreement over a built-in grid plus the config'd spec

Exit codes: 0 success, 2 config error, 3 size-gate error, 4 verification
failure.  Output is byte-identical for identical configs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import analytic, cost, strategy
from .embedding import ProblemSpec, build_embedding
from .statevector import SizeGateError

__all__ = ["RunConfig", "ConfigError", "load_config", "main", "console_main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GATE = 3
EXIT_VERIFY = 4

DEFAULT_GRID = {"start": 0.26, "stop": 1.0, "step": 0.01}
DEFAULT_SWEEP_EXTRAS = 2
DEFAULT_VERIFY_EXTRAS = 3

# Small cross-section of power-of-four and fractional-fill problems; every
# verify run covers these in addition to the configured spec.
VERIFY_GRID: tuple[tuple[int, int], ...] = (
    (1, 1),
    (4, 2),
    (4, 4),
    (15, 4),
    (16, 16),
    (20, 6),
    (30, 7),
    (48, 17),
    (64, 64),
)


class ConfigError(ValueError):
    """Malformed or missing configuration."""


@dataclass
class RunConfig:
    catalog_size: int | None = None
    targets: list[int] | None = None
    num_targets: int | None = None
    placement: str = "first"
    placement_seed: int | None = None
    mode: str | None = None
    q_max: int | None = None
    rho_grid: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_GRID))
    trials: int = 1
    seed: int = 0
    output_path: str | None = None
    output_format: str | None = None
    tolerance: float = 1e-10  # test hook: corrupting this must fail verify


_KNOWN_KEYS = {
    "catalog_size",
    "targets",
    "num_targets",
    "placement",
    "placement_seed",
    "mode",
    "q_max",
    "rho_grid",
    "trials",
    "seed",
    "output_path",
    "output_format",
    "tolerance",
}


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    cfg = RunConfig(**raw)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    for name in ("catalog_size", "num_targets", "placement_seed", "q_max", "trials", "seed"):
        value = getattr(cfg, name)
        if value is not None and not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
    if cfg.targets is not None and (
        not isinstance(cfg.targets, list)
        or any(not isinstance(t, int) for t in cfg.targets)
    ):
        raise ConfigError("targets must be a list of integers")
    if cfg.placement not in ("first", "seeded-random"):
        raise ConfigError(f"placement must be 'first' or 'seeded-random', got {cfg.placement!r}")
    if cfg.output_format not in (None, "json", "csv"):
        raise ConfigError(f"output_format must be 'json' or 'csv', got {cfg.output_format!r}")
    if cfg.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
    if cfg.q_max is not None and not 0 <= cfg.q_max <= analytic.MAX_EXTRA_ITERATIONS:
        raise ConfigError(f"q_max out of range: {cfg.q_max}")
    if cfg.targets is not None:
        if cfg.catalog_size is None:
            raise ConfigError("targets given without catalog_size")
        bad = [t for t in cfg.targets if not 1 <= t <= cfg.catalog_size]
        if bad:
            raise ConfigError(f"targets {bad} outside [1, {cfg.catalog_size}]")
        if len(set(cfg.targets)) != len(cfg.targets):
            raise ConfigError("targets list contains duplicates")
    if not isinstance(cfg.rho_grid, dict) or set(cfg.rho_grid) - {"start", "stop", "step"}:
        raise ConfigError("rho_grid must be {start, stop, step}")


def build_problem_spec(cfg: RunConfig) -> ProblemSpec:
    """The configured database: explicit targets or a placement policy."""
    if cfg.catalog_size is None:
        raise ConfigError("catalog_size is required")
    if cfg.targets is not None:
        return ProblemSpec(cfg.catalog_size, frozenset(cfg.targets))
    if cfg.num_targets is None:
        raise ConfigError("either targets or num_targets is required")
    if not 1 <= cfg.num_targets <= cfg.catalog_size:
        raise ConfigError(
            f"num_targets {cfg.num_targets} outside [1, {cfg.catalog_size}]"
        )
    if cfg.placement == "first":
        chosen = range(1, cfg.num_targets + 1)
    else:
        placement_seed = cfg.placement_seed if cfg.placement_seed is not None else cfg.seed
        rng = np.random.default_rng(placement_seed)
        chosen = rng.choice(cfg.catalog_size, size=cfg.num_targets, replace=False) + 1
    return ProblemSpec(cfg.catalog_size, frozenset(int(t) for t in chosen))


def _grid_fractions(grid: dict[str, float]) -> list[Fraction]:
    """Exact decimal stepping so short decimal grids hit 1/2 and 1 exactly."""
    try:
        start = Fraction(str(grid.get("start", DEFAULT_GRID["start"])))
        stop = Fraction(str(grid.get("stop", DEFAULT_GRID["stop"])))
        step = Fraction(str(grid.get("step", DEFAULT_GRID["step"])))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad rho_grid values: {exc}") from exc
    if step <= 0:
        raise ConfigError(f"rho_grid step must be > 0, got {step}")
    if not Fraction(1, 4) < start <= stop <= 1:
        raise ConfigError(
            f"rho_grid [{start}, {stop}] must lie inside (1/4, 1]"
        )
    points = []
    k = 0
    while (value := start + k * step) <= stop:
        points.append(value)
        k += 1
    return points


def _fmt(value: float) -> str:
    return format(value, ".17g")


def cmd_run(cfg: RunConfig) -> tuple[int, str]:
    spec = build_problem_spec(cfg)
    outcome = strategy.search(spec, cfg.seed)
    return EXIT_OK, json.dumps(outcome.to_dict(), indent=2) + "\n"


def cmd_sweep(cfg: RunConfig) -> tuple[int, str]:
    grid = _grid_fractions(cfg.rho_grid)
    q_max = cfg.q_max if cfg.q_max is not None else DEFAULT_SWEEP_EXTRAS
    extras = list(range(q_max + 1))
    curve_list = analytic.curves(extras, [float(r) for r in grid])
    if (cfg.output_format or "csv") == "json":
        payload = {
            "rho": [s[0] for s in curve_list[0].samples],
            "curves": {f"P{c.extras}": [s[1] for s in c.samples] for c in curve_list},
        }
        return EXIT_OK, json.dumps(payload, indent=2) + "\n"
    header = "rho," + ",".join(f"P{q}" for q in extras)
    rows = [header]
    for i in range(len(grid)):
        rho = curve_list[0].samples[i][0]
        rows.append(",".join([_fmt(rho)] + [_fmt(c.samples[i][1]) for c in curve_list]))
    return EXIT_OK, "\n".join(rows) + "\n"


def cmd_cost(cfg: RunConfig) -> tuple[int, str]:
    spec = build_problem_spec(cfg)
    report = cost.strategy_cost(build_embedding(spec))
    return EXIT_OK, json.dumps(report.to_dict(), indent=2) + "\n"


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    q_max = cfg.q_max if cfg.q_max is not None else DEFAULT_VERIFY_EXTRAS
    specs = [ProblemSpec(c, frozenset(range(1, t + 1))) for c, t in VERIFY_GRID]
    if cfg.catalog_size is not None:
        specs.append(build_problem_spec(cfg))
    reports = [strategy.verify(s, q_max=q_max, tolerance=cfg.tolerance) for s in specs]
    passed = all(r.passed for r in reports)
    payload = {
        "passed": passed,
        "tolerance": cfg.tolerance,
        "max_deviation": max(r.max_deviation for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    return (EXIT_OK if passed else EXIT_VERIFY), json.dumps(payload, indent=2) + "\n"


_COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "cost": cmd_cost, "verify": cmd_verify}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadsearch",
        description="Multi-target base-four search: simulate, predict, account.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config path")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"], help="output format")
        p.add_argument("--seed", type=int, help="overrides the config seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        if args.format is not None:
            cfg.output_format = args.format
        if args.out is not None:
            cfg.output_path = args.out
        if cfg.mode is not None and cfg.mode != args.command:
            raise ConfigError(
                f"config mode {cfg.mode!r} does not match subcommand {args.command!r}"
            )
        if args.command != "sweep" and cfg.output_format == "csv":
            raise ConfigError(f"{args.command} emits JSON only")
        code, text = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SizeGateError as exc:
        print(f"size gate: {exc}", file=sys.stderr)
        return EXIT_GATE
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def console_main() -> None:  # pragma: no cover - setuptools entry point
    sys.exit(main())
