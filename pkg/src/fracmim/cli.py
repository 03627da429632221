"""Command-line front end.

::

    fracmim <solve|converge|frac-curves|stability|truncation> \\
        [--config PATH] [--key value ...] --out PATH [--gnuplot]

Config files are flat ``key = value`` text with ``#`` comments; every key is
also accepted as a ``--key value`` flag, and flags win. Numbers may be given
as fractions (``1/2000``), lists as comma-separated values.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from fracmim import __version__
from fracmim.frac_deriv import QuadratureConfig, agreement_curves, exponential, monomial
from fracmim.harness import (
    convergence_study,
    half_step_taus,
    manufactured_source,
    stability_probe,
    truncation_probe,
    zero_problem,
)
from fracmim.mim_solver import Grid, Problem, solve

log = logging.getLogger("fracmim")


class ConfigError(ValueError):
    pass


def _float(s: str) -> float:
    try:
        return float(Fraction(s.strip()))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {s!r}") from None


def _int(s: str) -> int:
    try:
        return int(s.strip())
    except ValueError:
        raise ConfigError(f"not an integer: {s!r}") from None


def _floats(s: str) -> list[float]:
    return [_float(v) for v in s.split(",") if v.strip()]


def _ints(s: str) -> list[int]:
    return [_int(v) for v in s.split(",") if v.strip()]


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _str(s: str) -> str:
    return s.strip()


# key -> (parser, default) per subcommand; defaults are strings so the echoed
# config always shows what was parsed
_COMMON = {"out": (_str, None), "seed": (_int, "0")}
SCHEMAS = {
    "solve": {
        "example": (_str, "1"),
        "alpha": (_float, "0.5"),
        "M": (_int, "64"),
        "N": (_int, "64"),
        "T": (_float, "1"),
        "L": (_float, "1"),
    },
    "converge": {
        "example": (_int, "1"),
        "alphas": (_floats, "0.1,0.5,0.9"),
        "axis": (_str, "space"),
        "fixed_step": (_float, "1/2000"),
        "steps": (_floats, "1/8,1/16,1/32,1/64,1/128"),
    },
    "frac-curves": {
        "function": (_str, "cos"),
        "alphas": (_floats, ""),
        "t_max": (_float, "20"),
        "samples": (_int, "400"),
        "panels_per_unit_time": (_int, "256"),
        "refinement_cap": (_int, "4"),
        "rel_tol": (_float, "1e-8"),
    },
    "stability": {
        "alphas": (_floats, "0.1,0.5,0.9"),
        "taus": (_floats, "1/10,1/100"),
        "Ms": (_ints, "16,64"),
        "long_run": (_bool, "true"),
    },
    "truncation": {
        "alpha": (_float, "0.5"),
        "probe": (_str, "t3"),
        "t_eval": (_float, "1.5"),
        "levels": (_int, "6"),
    },
}

_CURVE_ALPHAS = {"cos": "0.1,0.3,0.6,0.9", "sin": "1.1,1.3,1.6,1.9"}


def read_config_file(path: str | Path) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def resolve_config(command: str, file_values: dict[str, str], flag_values: dict[str, str]):
    """Merge defaults, config-file values and flags; return (raw strings, parsed)."""
    schema = {**_COMMON, **SCHEMAS[command]}
    raw = {k: d for k, (_, d) in schema.items() if d is not None}
    if command == "frac-curves":
        fn = flag_values.get("function", file_values.get("function", "cos"))
        raw["alphas"] = _CURVE_ALPHAS.get(fn.strip(), "")
    for source in (file_values, flag_values):
        for key, value in source.items():
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} for {command}")
            raw[key] = value
    if "out" not in raw:
        raise ConfigError("an output path is required (--out)")
    parsed = {k: schema[k][0](v) for k, v in raw.items()}
    return raw, parsed


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(v)
    return f"{float(v):.17g}"


def write_csv(path: Path, command: str, raw: dict[str, str], columns, rows) -> None:
    buf = io.StringIO()
    buf.write(f"# fracmim {__version__} {command}\n")
    buf.write("# config: " + "; ".join(f"{k}={raw[k]}" for k in sorted(raw)) + "\n")
    buf.write("# columns: " + ",".join(columns) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    log.info("wrote %s", path)


def write_gnuplot(csv_path: Path, xcol: str, columns: list[str], logscale: bool = False) -> Path:
    gp = csv_path.with_suffix(csv_path.suffix + ".gp")
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{xcol}'",
    ]
    if logscale:
        lines.append("set logscale xy")
    x = columns.index(xcol) + 1
    plots = [
        f"'{csv_path.name}' using {x}:{columns.index(c) + 1} with linespoints"
        for c in columns
        if c != xcol
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    gp.write_text("\n".join(lines) + "\n")
    return gp


# {{{ subcommands


def _solve_problem(cfg) -> Problem:
    example = cfg["example"]
    if example == "zero":
        return Problem(length=cfg["L"], horizon=cfg["T"], alpha=cfg["alpha"])
    if example in ("1", "2"):
        if cfg["L"] != 1.0:
            raise ConfigError("examples 1 and 2 are posed on L = 1")
        if not 0 < cfg["alpha"] < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        problem = manufactured_source(int(example), cfg["alpha"])
        if cfg["T"] != 1.0:
            problem = Problem(
                1.0, cfg["T"], problem.alpha, problem.phi, problem.source,
                problem.phi_xx, problem.exact,
            )
        return problem
    raise ConfigError(f"unknown example {example!r}; expected 1, 2 or zero")


def cmd_solve(raw, cfg, gnuplot=False) -> int:
    try:
        problem = _solve_problem(cfg)
        grid = Grid(cfg["M"], cfg["N"], problem.length, problem.horizon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    history = solve(problem, grid)
    x = grid.x
    columns = ["x"]
    data = [x]
    for label, q in (("T/4", 1), ("T/2", 2), ("3T/4", 3), ("T", 4)):
        k = round(q * grid.N / 4)
        t = k * grid.tau
        columns.append(f"u_numeric@{label}")
        data.append(history.levels[k])
        if problem.exact is not None:
            columns.append(f"u_exact@{label}")
            data.append(np.asarray(problem.exact(x, t), dtype=np.float64))
    rows = list(zip(*data))
    out = Path(cfg["out"])
    write_csv(out, "solve", raw, columns, rows)
    if gnuplot:
        write_gnuplot(out, "x", columns)
    return 0


def converge_path(out: str, alpha: float) -> Path:
    if "{alpha}" in out:
        return Path(out.format(alpha=f"{alpha:g}"))
    p = Path(out)
    return p.with_name(f"{p.stem}_alpha{alpha:g}{p.suffix}")


def cmd_converge(raw, cfg, gnuplot=False) -> int:
    if cfg["axis"] not in ("space", "time"):
        raise ConfigError("axis must be space or time")
    if cfg["example"] not in (1, 2):
        raise ConfigError("example must be 1 or 2")
    steps = cfg["steps"]
    if not steps or any(b >= a for a, b in zip(steps, steps[1:])):
        raise ConfigError("steps must be a strictly decreasing list")
    columns = ["h", "tau", "error", "rate"]
    for alpha in cfg["alphas"]:
        if not 0 < alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
        try:
            report = convergence_study(cfg["example"], alpha, cfg["axis"], cfg["fixed_step"], steps)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rows = [(r.h, r.tau, r.error, r.rate) for r in report.rows]
        path = converge_path(cfg["out"], alpha)
        write_csv(path, "converge", {**raw, "alpha": f"{alpha:g}"}, columns, rows)
        if gnuplot:
            xcol = "h" if cfg["axis"] == "space" else "tau"
            write_gnuplot(path, xcol, [xcol, "error"], logscale=True)
    return 0


def cmd_frac_curves(raw, cfg, gnuplot=False) -> int:
    try:
        qcfg = QuadratureConfig(cfg["panels_per_unit_time"], cfg["refinement_cap"], cfg["rel_tol"])
        points = agreement_curves(cfg["function"], cfg["alphas"], cfg["t_max"], cfg["samples"], qcfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    columns = ["t", "alpha", "caputo", "tcaputo", "abs_diff"]
    rows = [(p.t, p.alpha, p.caputo, p.tcaputo, abs(p.caputo - p.tcaputo)) for p in points]
    out = Path(cfg["out"])
    write_csv(out, "frac-curves", raw, columns, rows)
    if gnuplot:
        write_gnuplot(out, "t", ["t", "caputo", "tcaputo"])
    print(f"max_abs_diff={max(r[4] for r in rows):.3e}")
    return 0


def cmd_stability(raw, cfg, gnuplot=False) -> int:
    cases = []
    for alpha in cfg["alphas"]:
        for tau in cfg["taus"]:
            for M in cfg["Ms"]:
                cases.append((alpha, tau, M))
    if cfg["long_run"]:
        cases.append((0.9, 1 / 2000, 16))
    rows = []
    try:
        for alpha, tau, M in cases:
            grid = Grid.from_steps(1.0 / M, tau)
            rep = stability_probe(alpha, grid, cfg["seed"])
            rows.append((alpha, rep.tau, M, rep.N, rep.max_ratio))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(cfg["out"])
    write_csv(out, "stability", raw, ["alpha", "tau", "M", "N", "max_ratio"], rows)
    worst = max(r[4] for r in rows)
    verdict = "<=" if worst <= 1 + 1e-12 else ">"
    print(f"max_ratio={worst:.17g} {verdict} 1")
    return 0 if verdict == "<=" else 1


_PROBES = {"t3": lambda: monomial(3), "t": lambda: monomial(1), "exp": exponential}


def cmd_truncation(raw, cfg, gnuplot=False) -> int:
    if cfg["probe"] not in _PROBES:
        raise ConfigError(f"probe must be one of {sorted(_PROBES)}")
    if cfg["levels"] < 1:
        raise ConfigError("levels must be positive")
    taus = half_step_taus(cfg["t_eval"], cfg["levels"])
    try:
        report = truncation_probe(cfg["alpha"], _PROBES[cfg["probe"]](), cfg["t_eval"], taus)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(cfg["out"])
    columns = ["tau", "error", "order"]
    write_csv(out, "truncation", raw, columns, [(r.tau, r.error, r.order) for r in report.rows])
    if gnuplot:
        write_gnuplot(out, "tau", ["tau", "error"], logscale=True)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "frac-curves": cmd_frac_curves,
    "stability": cmd_stability,
    "truncation": cmd_truncation,
}

# }}}


def _parse_flags(tokens: list[str]) -> dict[str, str]:
    flags = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(f"flag {tok} needs a value") from None
        flags[key.replace("-", "_")] = value
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracmim",
        description="Fractional mobile/immobile transport solver and verification runs.",
        epilog="Any config key can be passed as --key value; see the README for keys.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    parser.add_argument("--verbose", "-v", action="store_true")
    parser.add_argument("--version", action="version", version=f"fracmim {__version__}")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        flags = _parse_flags(rest)
        file_values = read_config_file(args.config) if args.config else {}
        raw, cfg = resolve_config(args.command, file_values, flags)
        return COMMANDS[args.command](raw, cfg, gnuplot=args.gnuplot)
    except ConfigError as exc:
        print(f"fracmim: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any solver failure maps to exit 1
        print(f"fracmim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
