"""Command-line front end.

    fakesearch <command> [--config PATH] [--out DIR] [--format {json,csv,both}]
                         [--seed N] [--threads N] [--quiet]

Commands: validate, first-best, solve, verify, remedies, sweep, statics.
Exit status: 0 ok, 2 config error, 3 regime error, 4 numeric tolerance
failure, 5 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import RunConfig, csv_text, dump_json, result_document
from .equilibrium import build_equilibrium
from .errors import ConfigError, FakeSearchError, RegimeError, ToleranceError, VerificationError
from .first_best import solve_first_best
from .model import phi_thresholds, validate
from .remedies import compare_remedies, delegate_agent, naive_payoff
from .statics import sensitivity_report
from .verifier import check_indifference, simulate

log = logging.getLogger("fakesearch")

STRATEGY_COLUMNS = ["t", "F_A", "f_A", "F_P", "f_P", "atom_P", "mu1", "a"]
SWEEP_COLUMNS = ["param", "tau_M", "tau_P", "sigma_bar", "value_P", "value_A", "u_naive", "u_delegate"]
VERIFY_COLUMNS = ["check", "residual", "tolerance", "pass"]
SWEEP_PARAMS = ("mu", "theta", "beta", "rho", "sigma")


def strategy_rows(eq, n_time, t_max_factor):
    t_max = t_max_factor * eq.tau_P
    ts = np.unique(np.concatenate([np.linspace(0.0, t_max, n_time), [eq.tau_M, eq.tau_P]]))
    F_A, f_A = eq.faking.cdf(ts), eq.faking.pdf(ts)
    F_P, f_P = eq.stopping.cdf(ts), eq.stopping.pdf(ts)
    atoms = np.array([eq.stopping.atom_mass(t) for t in ts])
    mu1 = eq.posterior(ts)
    a = np.asarray(eq.action(ts), dtype=float)
    return [list(r) for r in zip(ts, F_A, f_A, F_P, f_P, atoms, mu1, a)]


def _sweep_point(cfg, param, value):
    params = cfg.params().with_(**{param: value})
    news = cfg.news()
    try:
        eq = build_equilibrium(params, news)
        return [value, eq.tau_M, eq.tau_P, eq.sigma_bar, eq.value_P, eq.value_A,
                naive_payoff(params, news), delegate_agent(params, news).payoff]
    except FakeSearchError as exc:
        log.warning("sweep point %s=%.6g skipped: %s", param, value, exc)
        return [value] + [math.nan] * (len(SWEEP_COLUMNS) - 1)


def run(command, cfg, args):
    """Execute ``command``; returns ``(payload, tables, exit_status)``."""
    params, news = cfg.params(), cfg.news()
    tables = {}
    if command == "validate":
        rep = validate(params, news)
        payload = rep.to_dict()
        if not rep.ok:
            payload["reason"] = rep.reason()
            return payload, tables, RegimeError.exit_code
        return payload, tables, 0

    if command == "first-best":
        fb = solve_first_best(params, news)
        return {"first_best": fb, "thresholds": phi_thresholds(params)}, tables, 0

    if command == "solve":
        eq = build_equilibrium(params, news)
        rows = strategy_rows(eq, cfg.grid.n_time, cfg.grid.t_max_factor)
        tables["strategies"] = (STRATEGY_COLUMNS, rows)
        payload = {"equilibrium": eq.summary(), "params": params.to_dict(), "hazard": news.to_dict(),
                   "strategies": {c: [r[i] for r in rows] for i, c in enumerate(STRATEGY_COLUMNS)}}
        return payload, tables, 0

    if command == "verify":
        eq = build_equilibrium(params, news)
        mc = cfg.montecarlo
        rep = check_indifference(eq, tol=cfg.tolerances.analytic).merge(
            simulate(eq, n=mc.n, seed=mc.seed, threads=mc.threads, n_bins=mc.bins,
                     se_band=cfg.tolerances.se_band))
        tables["verify"] = (VERIFY_COLUMNS, [[c.check, c.residual, c.tolerance, c.passed] for c in rep.checks])
        status = 0 if rep.certified else VerificationError.exit_code
        return {"equilibrium": eq.summary(), "report": rep}, tables, status

    if command == "remedies":
        cmp_ = compare_remedies(params, news, threads=cfg.montecarlo.threads)
        return {"comparison": cmp_}, tables, 0

    if command == "sweep":
        sw = cfg.sweep
        if sw.param not in SWEEP_PARAMS:
            raise ConfigError("sweep.param", f"choose from {SWEEP_PARAMS}")
        values = np.linspace(sw.start, sw.stop, sw.steps) if sw.steps > 1 else np.array([sw.start])
        job = lambda v: _sweep_point(cfg, sw.param, float(v))
        with ThreadPoolExecutor(max_workers=cfg.montecarlo.threads) as pool:
            rows = list(pool.map(job, values))
        rows.sort(key=lambda r: r[0])
        tables["sweep"] = (SWEEP_COLUMNS, rows)
        return {"param": sw.param, "rows": [dict(zip(SWEEP_COLUMNS, r)) for r in rows]}, tables, 0

    if command == "statics":
        rep = sensitivity_report(params, news)
        return {"sensitivity": rep}, tables, 0 if rep.passed else ToleranceError.exit_code

    raise ConfigError("command", f"unknown command {command!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration (default: $FAKESEARCH_CONFIG or canonical)")
    common.add_argument("--out", help="directory for the result document and CSV tables")
    common.add_argument("--format", choices=("json", "csv", "both"), help="file outputs to write")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (non-negative integer)")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--quiet", action="store_true", help="do not echo the result document")

    parser = argparse.ArgumentParser(prog="fakesearch", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("validate", "check the parameter regime"),
                        ("first-best", "single-player search durations and values"),
                        ("solve", "equilibrium, strategies and beliefs on the time grid"),
                        ("verify", "analytic and Monte Carlo certification"),
                        ("remedies", "naive commitment, delegation to agent or intermediary"),
                        ("statics", "comparative statics with finite-difference checks")]:
        sub.add_parser(name, parents=[common], help=help_)
    sw = sub.add_parser("sweep", parents=[common], help="per-point summary over one parameter")
    sw.add_argument("param", choices=SWEEP_PARAMS)
    sw.add_argument("start", type=float)
    sw.add_argument("stop", type=float)
    sw.add_argument("steps", type=int)
    return parser


def _apply_overrides(cfg, args):
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2 ** 64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        cfg.montecarlo.seed = args.seed
    if args.threads is not None:
        cfg.montecarlo.threads = args.threads
    if args.format is not None:
        cfg.output.format = args.format
    if args.out is not None:
        cfg.output.dir = args.out
    if args.command == "sweep":
        cfg.sweep.param, cfg.sweep.start, cfg.sweep.stop, cfg.sweep.steps = (
            args.param, args.start, args.stop, args.steps)
    cfg.check()
    return cfg


def _write_outputs(cfg, command, doc, tables):
    out = cfg.output.dir
    if not out:
        return
    os.makedirs(out, exist_ok=True)
    if cfg.output.format in ("json", "both"):
        with open(os.path.join(out, f"{command}.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dump_json(doc))
    if cfg.output.format in ("csv", "both"):
        for name, (header, rows) in tables.items():
            with open(os.path.join(out, f"{name}.csv"), "w", encoding="utf-8", newline="") as fh:
                fh.write(csv_text(header, rows))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = _apply_overrides(RunConfig.load(args.config), args)
        payload, tables, status = run(args.command, cfg, args)
    except FakeSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    doc = result_document(args.command, cfg, payload)
    doc["status"] = status
    _write_outputs(cfg, args.command, doc, tables)
    if not args.quiet:
        sys.stdout.write(dump_json(doc))
    if status and "reason" in payload:
        print(f"error: {payload['reason']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
