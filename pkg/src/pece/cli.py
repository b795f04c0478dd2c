"""Command-line front end.

Subcommands:

* ``run <config>``         - integrate a problem described by a key = value
                             config file; writes solution.csv,
                             error_trace.csv, and stats.csv.
* ``verify-stencils``      - print the formula catalogue with residuals and
                             measured exactness degrees.
* ``convergence ...``      - measured convergence order on an analytic
                             problem; writes an (h, error) CSV.
* ``preset <name>``        - run a named benchmark preset directly.

All CSV fields are written with 17 significant digits so doubles round-trip
exactly, and identical configurations produce byte-identical files.  The
``PECE_OUT_DIR`` environment variable overrides any configured output
directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .core import SolutionSeries, StepUnderflowError
from .driver import IntegrationConfig, convergence_study, integrate, startup_order_probe
from .steppers import CorrectorVariant
from .stencil import CATALOGUE, exactness_degree, taylor_residual
from . import problems

ENV_OUT_DIR = "PECE_OUT_DIR"

_VARIANTS = {v.value: v for v in CorrectorVariant}
_FAMILIES = ("first-order", "second-order", "dynamic")


class ConfigError(Exception):
    pass


def _fmt(value: float) -> str:
    return "%.17g" % value


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _out_dir(configured: Optional[str]) -> Path:
    override = os.environ.get(ENV_OUT_DIR)
    path = Path(override if override else (configured if configured else "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_outputs(out: Path, solution: SolutionSeries) -> None:
    d = solution.x.shape[1]
    header = ["t"] + [f"x{i+1}" for i in range(d)]
    rows = np.column_stack([solution.t, solution.x])
    if solution.v is not None:
        header += [f"v{i+1}" for i in range(d)]
        rows = np.column_stack([rows, solution.v])
    _write_csv(out / "solution.csv", header, rows)
    _write_csv(out / "error_trace.csv", ["t", "eps", "h"], solution.error_trace)
    with open(out / "stats.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("steps,halved,doubled,restarts\n")
        fh.write("%d,%d,%d,%d\n" % solution.stats.as_tuple())


# ---------------------------------------------------------------------------
# config files: flat "key = value" lines, '#' comments
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "problem", "ic", "tol", "n", "t_end", "variant", "m",
    "fixed_step", "out_dir", "amplitude_in", "speed_mph", "seed",
}


def parse_config(path: str) -> dict:
    values: dict = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    if "problem" not in values:
        raise ConfigError(f"{path}: missing required key 'problem'")
    return values


def _convert(key: str, value: str):
    if key == "problem":
        if value not in problems.PRESET_NAMES:
            raise ValueError(f"unknown preset {value!r}; choose from {problems.PRESET_NAMES}")
        return value
    if key == "ic":
        parts = [float(p) for p in value.replace(",", " ").split()]
        if len(parts) != 2:
            raise ValueError("expected two numbers")
        return (parts[0], parts[1])
    if key in ("tol", "t_end", "amplitude_in", "speed_mph"):
        return float(value)
    if key in ("n", "m", "fixed_step", "seed"):
        return int(value)
    if key == "variant":
        return _VARIANTS[value]
    if key == "out_dir":
        return value
    raise KeyError(key)


def _build_from_values(values: dict):
    problem = problems.build_preset(
        values["problem"],
        ic=values.get("ic"),
        t_end=values.get("t_end"),
        n_global=values.get("n"),
        amplitude_in=values.get("amplitude_in", 1.0),
        speed_mph=values.get("speed_mph", 10.0),
    )
    config = IntegrationConfig(
        tol=values.get("tol", 1.0e-4),
        m=values.get("m", 1),
        variant=values.get("variant", CorrectorVariant.TYPE2),
        fixed_step=values.get("fixed_step"),
    )
    return problem, config


def _run_and_write(problem, config, out: Path) -> int:
    try:
        solution = integrate(problem, config)
    except StepUnderflowError as exc:
        (out / "ABORTED.txt").write_text(
            f"integration aborted: {exc}\n", encoding="utf-8"
        )
        print(f"error: {exc}", file=sys.stderr)
        print(f"partial outputs flagged in {out / 'ABORTED.txt'}", file=sys.stderr)
        return 1
    write_outputs(out, solution)
    st = solution.stats
    print(
        f"wrote {out}/solution.csv error_trace.csv stats.csv | "
        f"steps={st.local_steps} halved={st.halvings} "
        f"doubled={st.doublings} restarts={st.restarts}"
    )
    return 0


def cmd_run(args) -> int:
    try:
        values = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    problem, config = _build_from_values(values)
    return _run_and_write(problem, config, _out_dir(values.get("out_dir")))


def cmd_preset(args) -> int:
    try:
        problem = problems.build_preset(
            args.name,
            ic=tuple(args.ic) if args.ic else None,
            t_end=args.t_end,
            n_global=args.N,
            amplitude_in=args.amplitude_in,
            speed_mph=args.speed_mph,
        )
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    config = IntegrationConfig(
        tol=args.tol, m=args.m, variant=_VARIANTS[args.variant],
        fixed_step=args.fixed_step,
    )
    return _run_and_write(problem, config, _out_dir(args.out))


def cmd_verify_stencils(args) -> int:
    ok = True
    name_w = max(len(e.stencil.name) for e in CATALOGUE)
    print(
        f"{'name':{name_w}s} {'kind':9s} {'claim':5s} "
        f"{'r0':>6s} {'r1':>6s} {'r2':>6s} {'r3':>7s} {'r4':>9s} {'degree':6s} status"
    )
    for entry in CATALOGUE:
        s = entry.stencil
        residual = taylor_residual(s, max(4, s.claimed_order + 1))
        degree = exactness_degree(s)
        meets = degree >= s.claimed_order
        if entry.order_verified and not meets:
            ok = False
            status = "FAILED-CLAIM"
        elif meets:
            status = "ok"
        else:
            status = "differs-from-claim"
        cols = " ".join(
            f"{str(residual.coefficients[k]):>{w}s}"
            for k, w in zip(range(5), (6, 6, 6, 7, 9))
        )
        print(f"{s.name:{name_w}s} {s.kind:9s} {s.claimed_order:<5d} {cols} {degree:<6d} {status}")
    return 0 if ok else 1


def cmd_convergence(args) -> int:
    builder = problems.ANALYTIC_BUILDERS[args.problem]
    if args.problem == "harmonic":
        if args.family != "dynamic":
            print("error: the harmonic problem only supports the dynamic family", file=sys.stderr)
            return 2
        analytic = builder()
    else:
        analytic = builder(family=args.family)
    dt = analytic.problem.t_end / analytic.problem.n_global
    base = args.base_h if args.base_h else dt / 4.0
    hs = [base / 2.0**j for j in range(args.levels)]
    variant = _VARIANTS[args.variant]
    if args.startup_only:
        result = startup_order_probe(analytic, hs, m=args.m)
        label = "startup local order"
    else:
        result = convergence_study(analytic, hs, variant=variant, m=args.m)
        label = "global order"
    out = _out_dir(args.out)
    _write_csv(out / "convergence.csv", ["h", "error"], zip(result.h, result.errors))
    print(f"{args.family} {args.variant} {args.problem}: fitted {label} slope = {result.slope:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pece",
        description="Adaptive two-step PECE ODE integration toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a problem from a config file")
    p_run.add_argument("config", help="path to a key = value config file")
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify-stencils", help="print the formula catalogue checks")
    p_ver.set_defaults(func=cmd_verify_stencils)

    p_conv = sub.add_parser("convergence", help="measure convergence order")
    p_conv.add_argument("family", choices=_FAMILIES)
    p_conv.add_argument("variant", choices=sorted(_VARIANTS))
    p_conv.add_argument("problem", choices=sorted(problems.ANALYTIC_BUILDERS))
    p_conv.add_argument("--startup-only", action="store_true",
                        help="probe a single startup step instead of a full run")
    p_conv.add_argument("--base-h", type=float, default=None)
    p_conv.add_argument("--levels", type=int, default=4)
    p_conv.add_argument("--m", type=int, default=1)
    p_conv.add_argument("--out", default=None)
    p_conv.set_defaults(func=cmd_convergence)

    p_pre = sub.add_parser("preset", help="run a named benchmark preset")
    p_pre.add_argument("name", choices=problems.PRESET_NAMES)
    p_pre.add_argument("--ic", type=float, nargs=2, default=None,
                       metavar=("Y1", "Y2"))
    p_pre.add_argument("--tol", type=float, default=1.0e-4)
    p_pre.add_argument("--N", type=int, default=None)
    p_pre.add_argument("--t-end", dest="t_end", type=float, default=None)
    p_pre.add_argument("--variant", choices=sorted(_VARIANTS), default="type2")
    p_pre.add_argument("--m", type=int, default=1)
    p_pre.add_argument("--fixed-step", dest="fixed_step", type=int, default=None)
    p_pre.add_argument("--amplitude-in", dest="amplitude_in", type=float, default=1.0)
    p_pre.add_argument("--speed-mph", dest="speed_mph", type=float, default=10.0)
    p_pre.add_argument("--out", default=None)
    p_pre.set_defaults(func=cmd_preset)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
