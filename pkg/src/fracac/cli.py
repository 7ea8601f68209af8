"""Command-line front end.

Every subcommand writes one CSV table (header first, ``\\n`` line endings,
floats in Python's shortest round-trip ``repr`` form).  Subcommands that
fit a slope or summarise an error append a second two-line block
(summary header, summary values) after the table.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure,
4 I/O error.  On failure nothing is written to the output path.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .caputo import TimeHistory, caputo_of_monomial, l1_apply
from .constants import structural_constants
from .errors import (DomainError, FracACError, NumericalFailure, UsageError,
                     ValidationError)
from .params import ModelParams
from .residual import REGIMES, fit_scaling_exponent, residual_scan
from .solver import REACTIONS, RadialGrid, solve
from .sphere_flow import extinction_time, phi0_closed_form, phi0_rk4

SUBCOMMANDS = ("constants", "flow", "residual", "simulate", "convergence")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)


def _float_list(text):
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="fracac", description=(
        "Time-fractional Allen-Cahn layers and power-of-mean-curvature sphere flow."))
    parser.add_argument("--config", help="file of 'key = value' lines; flags take precedence")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    def common(p, n=True):
        p.add_argument("--alpha", type=float)
        if n:
            p.add_argument("--n", type=int)
        p.add_argument("--out", default=None, help="output CSV path, '-' for stdout")

    p = sub.add_parser("constants", help="c_alpha and C_alpha")
    common(p)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("flow", help="sphere radius: closed form vs RK4")
    common(p)
    p.add_argument("--t-max", type=float)
    p.add_argument("--t-max-frac", type=float, help="t_max as a fraction of the extinction time")
    p.add_argument("--dt", type=float)

    p = sub.add_parser("convergence", help="L1 scheme against the monomial oracle")
    common(p, n=False)
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--dt-list", type=_float_list)

    p = sub.add_parser("residual", help="residual of the layer ansatz along an eps sweep")
    common(p)
    p.add_argument("--t", type=float)
    p.add_argument("--t-frac", type=float, help="t as a fraction of the extinction time")
    p.add_argument("--eps-list", type=_float_list)
    p.add_argument("--regime", choices=REGIMES, default="interface")
    p.add_argument("--r", type=float, help="radius for the outside/inside regimes")
    p.add_argument("--offset", type=float, default=0.2,
                   help="distance from phi0(t) when --r is not given")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("simulate", help="radial PDE solve with level-set tracking")
    common(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--dr", type=float, help="default eps/5")
    p.add_argument("--dt", type=float, help="default eps^(1+alpha)/2")
    p.add_argument("--t-end", type=float)
    p.add_argument("--t-end-frac", type=float, help="t_end as a fraction of the extinction time")
    p.add_argument("--r-max", type=float, default=2.0)
    p.add_argument("--reaction", choices=REACTIONS, default="linearized")
    p.add_argument("--no-dt-rule", action="store_true",
                   help="allow dt above eps^(1+alpha)")
    return parser


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _config_path(argv):
    for i, arg in enumerate(argv):
        if arg == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a file argument")
            return argv[i + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


_REQUIRED = {
    "constants": ("alpha", "n"),
    "flow": ("alpha", "n", "dt"),
    "convergence": ("alpha", "p", "dt_list"),
    "residual": ("alpha", "n", "eps_list"),
    "simulate": ("alpha", "n", "eps"),
}


def parse_args(argv) -> RunConfig:
    argv = list(argv)
    parser = _build_parser()
    cfg_path = _config_path(argv)
    if cfg_path is not None:
        try:
            cfg = read_config(cfg_path)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        subparsers = parser._subparsers._group_actions[0].choices
        for sp in subparsers.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in known})
        all_known = {a.dest for sp in subparsers.values() for a in sp._actions}
        unknown = sorted(set(cfg) - all_known)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    ns = parser.parse_args(argv)
    if ns.subcommand is None:
        raise UsageError(f"a subcommand is required: one of {', '.join(SUBCOMMANDS)}")
    params = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "config", "help")}
    # string defaults injected from the config file for store_true flags
    if isinstance(params.get("no_dt_rule"), str):
        params["no_dt_rule"] = params["no_dt_rule"].lower() in ("1", "true", "yes", "on")
    for key in _REQUIRED[ns.subcommand]:
        if params.get(key) is None:
            raise UsageError(f"--{key.replace('_', '-')} is required for {ns.subcommand}")
    _validate(ns.subcommand, params)
    return RunConfig(ns.subcommand, params)


def _validate(cmd, p):
    alpha = p.get("alpha")
    if alpha is not None and not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0,1)")
    if p.get("n") is not None and p["n"] < 1:
        raise ValidationError("n must be an integer >= 1")
    for key in ("tol", "dt", "dr", "eps", "t_max", "t", "t_end", "p", "r_max",
                "t_max_frac", "t_frac", "t_end_frac"):
        v = p.get(key)
        if v is not None and not (v > 0 and math.isfinite(v)):
            raise ValidationError(f"{key.replace('_', '-')} must be positive")
    for key in ("eps_list", "dt_list"):
        v = p.get(key)
        if v is None:
            continue
        if not v:
            raise ValidationError(f"{key.replace('_', '-')} must be nonempty")
        if any(not x > 0 for x in v):
            raise ValidationError(f"{key.replace('_', '-')} entries must be positive")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValidationError(f"{key.replace('_', '-')} must be strictly decreasing")
    pairs = {"flow": ("t_max", "t_max_frac"), "residual": ("t", "t_frac"),
             "simulate": ("t_end", "t_end_frac")}
    if cmd in pairs:
        a, b = pairs[cmd]
        if (p.get(a) is None) == (p.get(b) is None):
            raise UsageError(f"give exactly one of --{a.replace('_', '-')} "
                             f"and --{b.replace('_', '-')}")


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit_csv(rows, header, destination, summary=None, sort_key=None) -> None:
    """Write ``rows`` under ``header``; optional ``summary=(header, row)`` block follows.

    The file is assembled in memory and moved into place atomically.
    """
    rows = [list(r) for r in rows]
    if any(len(r) != len(header) for r in rows):
        raise ValueError("rows must match the header width")
    if sort_key is not None:
        rows.sort(key=sort_key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([format_value(v) for v in r] for r in rows)
    if summary is not None:
        s_head, s_row = summary
        writer.writerow(s_head)
        writer.writerow([format_value(v) for v in s_row])
    text = buf.getvalue()
    if destination in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    dirname = os.path.dirname(os.path.abspath(destination))
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".fracac-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, destination)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_constants(p):
    sc = structural_constants(p["alpha"], p["n"], p["tol"])
    emit_csv([[sc.alpha, sc.n, sc.c_alpha, sc.C_alpha, sc.quadrature_error_estimate]],
             ["alpha", "n", "c_alpha", "C_alpha", "err_estimate"], p["out"])


def _t_star(alpha, n):
    return extinction_time(alpha, structural_constants(alpha, n).C_alpha)


def _run_flow(p):
    alpha, n = p["alpha"], p["n"]
    C = structural_constants(alpha, n).C_alpha
    T = extinction_time(alpha, C)
    t_max = p["t_max"] if p["t_max"] is not None else p["t_max_frac"] * T
    if math.isinf(T):
        steps = max(1, math.ceil(t_max / p["dt"] - 1e-12))
        times = t_max / steps * np.arange(steps + 1)
        rk = np.ones_like(times)
    else:
        traj = phi0_rk4(t_max, p["dt"], alpha, C)
        traj.check_invariants()
        times, rk = traj.times, traj.radii
    closed = phi0_closed_form(times, alpha, C)
    rows = [[t, c, r, abs(c - r)] for t, c, r in zip(times, closed, rk)]
    emit_csv(rows, ["t", "phi0_closed", "phi0_rk4", "abs_diff"], p["out"],
             sort_key=lambda row: row[0])


def _run_convergence(p):
    alpha, power, t = p["alpha"], p["p"], p["t"]
    oracle = caputo_of_monomial(power, t, alpha)
    rows = []
    for dt in p["dt_list"]:
        m = round(t / dt)
        if m < 1 or abs(m * dt - t) > 1e-9 * t:
            raise ValidationError(f"t={t:g} is not an integer multiple of dt={dt:g}")
        grid = t * np.arange(m + 1) / m
        val = float(l1_apply(TimeHistory(t / m, grid**power, alpha)))
        rows.append([dt, val, oracle, abs(val - oracle)])
    rows.sort(key=lambda row: -row[0])
    summary = None
    if len(rows) >= 2 and all(r[3] > 0 for r in rows):
        slope = float(np.polyfit(np.log([r[0] for r in rows]), np.log([r[3] for r in rows]), 1)[0])
        summary = (["fitted_order"], [slope])
    else:
        summary = (["fitted_order"], [float("nan")])
    emit_csv(rows, ["dt", "l1_value", "oracle_value", "abs_err"], p["out"], summary=summary)


def _run_residual(p):
    alpha, n = p["alpha"], p["n"]
    t = p["t"] if p["t"] is not None else p["t_frac"] * _t_star(alpha, n)
    report = residual_scan(alpha, n, t, p["eps_list"], p["regime"], r=p["r"],
                           offset=p["offset"], tol=p["tol"])
    rows = [[eps, r, tt, E, abs(E)] for (r, tt, eps, E) in report.samples]
    emit_csv(rows, ["eps", "r", "t", "E", "abs_E"], p["out"],
             sort_key=lambda row: (row[0], row[2], row[1]),
             summary=(["fitted_exponent", "fit_residual"],
                      [report.fitted_exponent, report.fit_residual]))


def _run_simulate(p):
    alpha, n, eps = p["alpha"], p["n"], p["eps"]
    dr = p["dr"] if p["dr"] is not None else eps / 5.0
    dt = p["dt"] if p["dt"] is not None else eps ** (1.0 + alpha) / 2.0
    if p["t_end"] is not None:
        t_end = p["t_end"]
    else:
        T = _t_star(alpha, n)
        if math.isinf(T):
            raise ValidationError("--t-end-frac is undefined when n = 1 (no extinction)")
        t_end = p["t_end_frac"] * T
    params = ModelParams(alpha, n, eps)
    grid = RadialGrid.from_spacing(dr, p["r_max"])
    _, rep = solve(params, grid, dt, t_end, enforce_dt_rule=not p["no_dt_rule"],
                   reaction=p["reaction"])
    rows = [[t, rs, ph, e] for t, rs, ph, e in zip(rep.times, rep.r_star, rep.phi0, rep.abs_err)]
    emit_csv(rows, ["t", "r_star", "phi0", "abs_err"], p["out"],
             sort_key=lambda row: row[0], summary=(["sup_error"], [rep.sup_error]))


_RUNNERS = {
    "constants": _run_constants,
    "flow": _run_flow,
    "convergence": _run_convergence,
    "residual": _run_residual,
    "simulate": _run_simulate,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
        if cfg.subcommand != "constants" and cfg.params.get("out") is None:
            raise UsageError("--out is required (use '-' for stdout)")
        _RUNNERS[cfg.subcommand](cfg.params)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, ValidationError, DomainError) as exc:
        print(f"fracac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"fracac: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"fracac: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FracACError as exc:
        print(f"fracac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
