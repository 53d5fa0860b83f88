"""Command-line front end.

Exit codes: 0 success, 2 bad configuration, 3 run failed (non-finite state),
4 output not writable, 5 singular global system.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from fwldg.driver import (
    ConfigError, RunConfig, emit_outputs, format_report, run, run_convergence)
from fwldg.linsolve import SingularSystemError
from fwldg.problems import PROBLEMS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUN = 3
EXIT_IO = 4
EXIT_SINGULAR = 5


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _domain(text: str) -> tuple[float, float]:
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"domain needs 'a,b', got {text!r}")
    return values  # type: ignore[return-value]


# flag / config-file key -> (RunConfig field, parser)
_KEYS = {
    "scheme": ("scheme", str),
    "problem": ("problem", str),
    "p": ("p", int),
    "degree": ("degree", int),
    "cells": ("n_cells", int),
    "domain": ("domain", _domain),
    "tfinal": ("t_final", float),
    "alpha": ("alpha", float),
    "dt": ("dt", float),
    "limiter": ("limiter", float),
    "limit_variable": ("limit_variable", str),
    "snapshots": ("snapshots", _floats),
    "perturb": ("perturb", float),
    "seed": ("seed", int),
    "out": ("out", str),
    "cadence": ("cadence", int),
    "dt_rule": ("dt_rule", str),
    "s": ("s", float),
    "g": ("g", float),
}


def read_config_file(path: str | Path) -> dict[str, object]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "convergence":
            values[key] = _ints(value)
        elif key == "no_source":
            values[key] = value.lower() in ("1", "true", "yes", "on")
        elif key in _KEYS:
            values[key] = _KEYS[key][1](value)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwldg",
        description="LDG solver for Fornberg-Whitham type equations.")
    parser.add_argument("--config", help="flat 'key = value' file; flags override it")
    parser.add_argument("--scheme", help="d1, c1, d2 or c2")
    parser.add_argument("--problem", help=f"one of {', '.join(PROBLEMS)}")
    parser.add_argument("--p", type=int, help="exponent in f(u) = u^p / p")
    parser.add_argument("--degree", type=int, help="polynomial degree k (default 2)")
    parser.add_argument("--cells", type=int, help="number of cells")
    parser.add_argument("--domain", type=_domain, help="a,b")
    parser.add_argument("--tfinal", type=float)
    parser.add_argument("--alpha", type=float, help="time-step constant (default 0.1)")
    parser.add_argument("--dt", type=float, help="fixed time step")
    parser.add_argument("--limiter", type=float, metavar="M", help="enable TVB limiter")
    parser.add_argument("--limit-variable", dest="limit_variable",
                        help="second family only: limit 'u' (default) or 'w'")
    parser.add_argument("--dt-rule", dest="dt_rule",
                        help="'power' (default) or 'wavespeed'")
    parser.add_argument("--snapshots", type=_floats, help="t1,t2,...")
    parser.add_argument("--perturb", type=float, help="mesh perturbation in [0, 1)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--cadence", type=int, help="diagnostics every n steps")
    parser.add_argument("--convergence", type=_ints, metavar="N1,N2,...")
    parser.add_argument("--no-source", dest="no_source", action="store_true",
                        default=None, help="drop the manufactured forcing")
    parser.add_argument("--s", type=float, help="peakon speed")
    parser.add_argument("--g", type=float, help="periodic peakon shape parameter")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_config(argv: list[str] | None = None) -> tuple[RunConfig, tuple[int, ...] | None]:
    """Merge the optional config file with the flags (flags win) and validate."""
    args = build_parser().parse_args(argv)
    values: dict[str, object] = {}
    if args.config:
        values.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("config", "verbose") or value is None:
            continue
        values[key] = value

    if "problem" not in values:
        raise ConfigError(
            f"no problem given; available: {', '.join(PROBLEMS)}")

    kwargs: dict[str, object] = {}
    problem_args: dict[str, object] = {}
    for key, value in values.items():
        if key == "convergence":
            continue
        if key == "no_source":
            kwargs["use_source"] = not value
        elif key in ("s", "g"):
            problem_args[key] = value
        else:
            kwargs[_KEYS[key][0]] = value
    config = RunConfig(**kwargs, problem_args=problem_args)
    config.validate()
    ladder = values.get("convergence")
    return config, ladder  # type: ignore[return-value]


def main(argv: list[str] | None = None) -> int:
    flags = sys.argv[1:] if argv is None else argv
    verbose = "-v" in flags or "--verbose" in flags
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    warnings.simplefilter("default")
    try:
        config, ladder = parse_config(argv)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        convergence = run_convergence(config, list(ladder)) if ladder else None
        result = run(config)
    except SingularSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if config.out is not None:
        try:
            emit_outputs(result, config.out, convergence)
        except OSError as exc:
            print(f"error: cannot write outputs: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(format_report(result, convergence), end="")

    return EXIT_OK if result.ok else EXIT_RUN


if __name__ == "__main__":
    sys.exit(main())
