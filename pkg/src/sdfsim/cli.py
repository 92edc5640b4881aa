"""Command-line entry point: ``sdfsim {simulate,sweep,analyze,validate}``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis
from .engine import run
from .harness.configfile import load_config
from .harness.csvio import emit_csv
from .harness.stability import detect_stability
from .harness.sweep import load_grid, parse_policies, sweep
from .model import ConfigError

DEFAULT_POLICIES = "oracle,sdf@0.01,sdf@0.02,full_probe@0.01,full_probe@0.02"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _outdir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("--out", f"cannot create {out}: {exc.strerror}") from None
    return out


def cmd_simulate(args) -> int:
    exp = load_config(args.config)
    cfg = exp.system if args.seed is None else replace(exp.system, seed=args.seed)
    ts = run(cfg)
    verdict = detect_stability(ts, exp.slope_tol, exp.queue_cap)
    out = _outdir(args.out)
    emit_csv(ts, out / "timeseries.csv")
    summary = ts.summary()
    summary.update(seed=cfg.seed, stable=verdict.stable, trend_slope=verdict.trend_slope,
                   final_mean=verdict.final_mean)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"mean total queue {ts.mean_total_queue_pkts:.4f} pkts, probed fraction "
          f"{ts.mean_probed_fraction:.4f}, stable={str(verdict.stable).lower()}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    exp = load_config(args.config)
    specs = parse_policies(args.policies, exp.system.beta)
    grid = load_grid(args.lambda_min, args.lambda_max, args.steps)
    results = []
    for spec in specs:
        res = sweep(exp.system, spec, grid, args.reps, slope_tol=exp.slope_tol, queue_cap=exp.queue_cap,
                    workers=args.workers)
        results.append(res)
        front = "none" if res.frontier is None else f"{res.frontier:g}"
        print(f"{res.policy:>20s}  frontier {front}")
    path = emit_csv(results, _outdir(args.out) / "sweep.csv")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    exp = load_config(args.config)
    c = exp.system
    print(f"N={c.n_users} beta={c.beta!r} channel={'jakes' if c.is_fading else f'L={c.n_states}'}")
    for rep in analysis.expansion_reports(c, mc_slots=args.slots):
        print()
        print("\n".join(rep.lines()))
    return EXIT_OK


def cmd_validate(args) -> int:
    exp = load_config(args.config)
    c = exp.system
    if c.is_fading:
        raise ConfigError("channel", "validate needs a finite-state channel with a closed form")
    p = c.prob_matrix()
    if c.is_homogeneous():
        target = float(analysis.expected_m_homogeneous(p[0], c.n_users))
    else:
        target = analysis.het_expected_m_exact(p, np.full(c.n_users, 1.0 / c.n_users))
    mean, se = analysis.monte_carlo_expected_m(c, args.slots, np.random.default_rng(c.seed))
    dev = abs(mean - target)
    ok = dev <= 3.0 * se + 1e-9 * max(1.0, abs(target))
    print(f"closed form E[M] = {target:.6f}")
    print(f"monte carlo E[M] = {mean:.6f} +/- {se:.6f} ({args.slots} slots)")
    print(f"deviation = {dev / se:.3f} sigma" if se > 0 else f"deviation = {dev:.3g} (zero variance)")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdfsim", description="Simulate and analyze queue-aware CSI probing.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configuration and write its time series")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sweep total load for several policies")
    p.add_argument("--config", required=True)
    p.add_argument("--policies", default=DEFAULT_POLICIES,
                   help="comma-separated name[@beta]; names: oracle, sdf, full_probe (alias full)")
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--workers", type=int, default=None, help="process count (capped by SDF_SIM_THREADS)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="print closed-form expansion figures")
    p.add_argument("--config", required=True)
    p.add_argument("--slots", type=int, default=200_000, help="Monte Carlo slots for fading channels")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="check Monte Carlo E[M] against the closed form at 3 sigma")
    p.add_argument("--config", required=True)
    p.add_argument("--slots", type=int, default=1_000_000)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"sdfsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
