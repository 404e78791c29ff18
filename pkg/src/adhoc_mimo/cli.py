"""Command-line entry point: curve sweeps, single-point queries, validation.

Exit codes: 0 success, 1 validation failure, 2 usage error,
3 infeasible/data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .analytic import (
    LinkConfig,
    NetworkParams,
    max_cancelable,
    omega,
    outage_probability,
    theta,
    transmission_capacity_exact,
)
from .errors import BracketError, ConsistencyError, DomainError, InfeasibleEpsilonError, NumericalError
from .montecarlo import DEFAULT_DELTA, simulate_outage

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3, 4

# Defaults per command; z and gamma are in dB unless noted.
DEFAULTS = {
    "outage-curve": dict(nt=[1, 2, 4], nr=4, z_db=0.0, gamma_db=20.0, alpha=4.6,
                         sweep=(0.01, 2.0, 12, True)),
    "tc-vs-epsilon": dict(nt=[1, 2, 4], nr=4, z_db=10.0, gamma=math.inf, alpha=4.5,
                          sweep=(1e-4, 0.8, 20, True)),
    "tc-vs-alpha": dict(nt=[1, 2, 4], nr=4, z_db=15.0, gamma=math.inf, epsilon=1e-3,
                        sweep=(2.5, 6.0, 15, False)),
    "point": dict(nt=[1], nr=4, z_db=0.0, gamma_db=20.0, alpha=4.6, density=0.01, epsilon=0.1),
    "validate": dict(trials=20_000),
}


class UsageError(Exception):
    pass


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _gamma(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("link and network")
    g.add_argument("--nt", type=_positive_int, action="append", help="transmit streams (repeatable)")
    g.add_argument("--nr", type=_positive_int, help="receive antennas")
    z = g.add_mutually_exclusive_group()
    z.add_argument("--z", type=float, help="SINR threshold, linear")
    z.add_argument("--z-db", type=float, help="SINR threshold, dB")
    gm = g.add_mutually_exclusive_group()
    gm.add_argument("--gamma", type=_gamma, help="transmit SNR, linear or 'inf'")
    gm.add_argument("--gamma-db", type=float, help="transmit SNR, dB")
    g.add_argument("--d0", type=float, help="link distance (default 1)")
    g.add_argument("--alpha", type=float, help="path loss exponent")

    m = p.add_argument_group("simulation")
    m.add_argument("--trials", type=_positive_int, help="Monte Carlo trials per point (default 100000)")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="far-field truncation tolerance")
    m.add_argument("--workers", type=_positive_int, default=1)
    m.add_argument("--no-mc", action="store_true", help="analytic values only")

    o = p.add_argument_group("output")
    o.add_argument("--out", help="output path (default stdout)")
    o.add_argument("--gnuplot", action="store_true", help="also write <out>.gp plotting the CSV")


def _add_sweep(p: argparse.ArgumentParser) -> None:
    s = p.add_argument_group("sweep")
    s.add_argument("--sweep-min", type=float)
    s.add_argument("--sweep-max", type=float)
    s.add_argument("--points", type=_positive_int)
    sp = s.add_mutually_exclusive_group()
    sp.add_argument("--log", dest="spacing", action="store_const", const="log")
    sp.add_argument("--linear", dest="spacing", action="store_const", const="linear")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adhoc-mimo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("outage-curve", help="outage probability vs stream density")
    _add_common(p)
    _add_sweep(p)
    p.add_argument("--per-stream-density", action=argparse.BooleanOptionalAction, default=True,
                   help="divide the swept density by n_t (default on)")

    p = sub.add_parser("tc-vs-epsilon", help="transmission capacity vs target outage")
    _add_common(p)
    _add_sweep(p)

    p = sub.add_parser("tc-vs-alpha", help="transmission capacity vs path loss exponent")
    _add_common(p)
    _add_sweep(p)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("point", help="every derived quantity at one parameter point")
    _add_common(p)
    p.add_argument("--density", "--lambda", dest="density", type=float, help="transmitter density")
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("validate", help="run the cross-validation suite")
    p.add_argument("--trials", type=_positive_int, help="Monte Carlo trials per point (default 20000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--sigma", type=float, default=3.0, help="gate width in standard errors")
    return parser


# Argument resolution


def _resolve(args: argparse.Namespace) -> dict:
    d = DEFAULTS[args.command]
    r: dict = {}
    r["nt"] = args.nt or d["nt"]
    r["nr"] = args.nr or d["nr"]
    if args.z is not None:
        r["z"] = args.z
    elif args.z_db is not None:
        r["z"] = db_to_linear(args.z_db)
    else:
        r["z"] = db_to_linear(d["z_db"])
    if args.gamma is not None:
        r["gamma"] = args.gamma
    elif args.gamma_db is not None:
        r["gamma"] = db_to_linear(args.gamma_db)
    elif "gamma_db" in d:
        r["gamma"] = db_to_linear(d["gamma_db"])
    else:
        r["gamma"] = d["gamma"]
    r["d0"] = 1.0 if args.d0 is None else args.d0
    r["alpha"] = args.alpha if args.alpha is not None else d.get("alpha")
    r["trials"] = args.trials or 100_000
    r["seed"], r["delta"], r["workers"], r["mc"] = args.seed, args.delta, args.workers, not args.no_mc
    if r["seed"] < 0:
        raise UsageError("--seed must be non-negative")
    if not r["delta"] > 0:
        raise UsageError("--delta must be positive")
    if "sweep" in d:
        lo, hi, n, log = d["sweep"]
        lo = lo if args.sweep_min is None else args.sweep_min
        hi = hi if args.sweep_max is None else args.sweep_max
        n = n if args.points is None else args.points
        log = log if args.spacing is None else args.spacing == "log"
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi or (n > 1 and lo == hi):
            raise UsageError(f"invalid sweep [{lo}, {hi}] with {n} points")
        if log and lo <= 0:
            raise UsageError("log sweep requires a positive minimum")
        r["grid"] = [lo] if n == 1 else list(np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n))
        r["sweep"] = (lo, hi, n, "log" if log else "linear")
    for key in ("epsilon", "density"):
        if key in d:
            v = getattr(args, key, None)
            r[key] = d[key] if v is None else v
    # validate physical parameters once, before any computation
    for n_t in r["nt"]:
        LinkConfig(n_t, r["nr"], r["z"], r["gamma"], r["d0"])
    if r["alpha"] is not None:
        NetworkParams(0.0, r["alpha"])
    return r


def _header(command: str, r: dict) -> str:
    # workers never changes the numbers, so it stays out of the header
    shown = {k: v for k, v in r.items() if k not in ("grid", "workers")}
    shown["gamma"] = "inf" if math.isinf(r["gamma"]) else r["gamma"]
    return f"# adhoc-mimo {__version__} command={command} " + json.dumps(shown, sort_keys=True, default=str)


def _emit(lines: list[str], r: dict, args, columns: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if args.gnuplot:
            _write_gnuplot(args.out, args.command, columns)
    else:
        if args.gnuplot:
            raise UsageError("--gnuplot requires --out")
        sys.stdout.write(text)


def _write_gnuplot(path: str, command: str, columns: list[str]) -> None:
    x = columns[0]
    y = columns[2]
    logx = "set logscale x\n" if command in ("outage-curve", "tc-vs-epsilon") else ""
    script = (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"{logx}set xlabel '{x}'\nset ylabel '{y}'\n"
        f"plot for [n in system(\"tail -n +3 '{path}' | cut -d, -f2 | sort -un\")] "
        f"'{path}' skip 1 using (column(2)==n ? column(1) : 1/0):3 with linespoints title 'n_t='.n\n"
    )
    with open(path + ".gp", "w", encoding="utf-8") as fh:
        fh.write(script)


# Commands


def run_outage_curve(args, r: dict) -> int:
    cols = ["lambda", "n_t", "analytic_outage"] + (["mc_outage", "mc_std_error"] if r["mc"] else [])
    lines = [_header(args.command, r | {"per_stream_density": args.per_stream_density}), ",".join(cols)]
    for n_t in r["nt"]:
        cfg = LinkConfig(n_t, r["nr"], r["z"], r["gamma"], r["d0"])
        for lam in r["grid"]:
            per_tx = lam / n_t if args.per_stream_density else lam
            net = NetworkParams(float(per_tx), r["alpha"])
            row = [lam, n_t, outage_probability(cfg, net)]
            if r["mc"]:
                est = simulate_outage(cfg, net, r["trials"], r["seed"], r["delta"], workers=r["workers"])
                row += [est.probability, est.std_error]
            lines.append(",".join(fmt(v) for v in row))
    _emit(lines, r, args, cols)
    return EXIT_OK


def run_tc_vs_epsilon(args, r: dict) -> int:
    cols = ["epsilon", "n_t", "exact_capacity", "asymptotic_capacity", "status"]
    lines = [_header(args.command, r), ",".join(cols)]
    feasible = 0
    for n_t in r["nt"]:
        cfg = LinkConfig(n_t, r["nr"], r["z"], r["gamma"], r["d0"])
        for eps in r["grid"]:
            if not 0 < eps < 1:
                raise UsageError(f"epsilon {eps} outside (0, 1)")
            try:
                res = transmission_capacity_exact(cfg, r["alpha"], float(eps))
            except InfeasibleEpsilonError:
                lines.append(",".join([fmt(eps), fmt(n_t), "", "", "infeasible"]))
                continue
            feasible += 1
            lines.append(",".join([fmt(eps), fmt(n_t), fmt(res.exact_capacity), fmt(res.asymptotic_capacity), "ok"]))
    if not feasible:
        print("error: every outage target lies below the noise floor", file=sys.stderr)
        return EXIT_DATA
    _emit(lines, r, args, cols)
    return EXIT_OK


def run_tc_vs_alpha(args, r: dict) -> int:
    cols = ["alpha", "n_t", "exact_capacity"]
    lines = [_header(args.command, r), ",".join(cols)]
    eps = r["epsilon"]
    if any(not a > 2 for a in r["grid"]):
        raise UsageError("every path loss exponent in the sweep must exceed 2")
    for n_t in r["nt"]:
        cfg = LinkConfig(n_t, r["nr"], r["z"], r["gamma"], r["d0"])
        caps = []
        for a in r["grid"]:
            caps.append(transmission_capacity_exact(cfg, float(a), eps).exact_capacity)
            lines.append(",".join([fmt(a), fmt(n_t), fmt(caps[-1])]))
        rising = all(b > a for a, b in zip(caps, caps[1:]))
        print(f"n_t={n_t}: capacity increasing in alpha: {'yes' if rising else 'no'}", file=sys.stderr)
    _emit(lines, r, args, cols)
    return EXIT_OK


def _num(x):
    if x is None:
        return None
    return "inf" if math.isinf(x) else x


def run_point(args, r: dict) -> int:
    records = []
    for n_t in r["nt"]:
        cfg = LinkConfig(n_t, r["nr"], r["z"], r["gamma"], r["d0"])
        net = NetworkParams(r["density"], r["alpha"])
        rec = dict(n_t=n_t, n_r=r["nr"], z=r["z"], gamma=_num(r["gamma"]), d0=r["d0"], alpha=r["alpha"],
                   density=r["density"], rate=cfg.rate, outage=outage_probability(cfg, net),
                   theta=theta(cfg, r["alpha"]), epsilon=r["epsilon"])
        if r["mc"]:
            est = simulate_outage(cfg, net, r["trials"], r["seed"], r["delta"], workers=r["workers"])
            rec.update(mc_outage=est.probability, mc_std_error=est.std_error, mc_trials=est.trials)
        if n_t <= r["nr"]:
            rec.update(ell=max_cancelable(r["nr"], n_t), omega=omega(cfg, r["alpha"]))
            try:
                res = transmission_capacity_exact(cfg, r["alpha"], r["epsilon"])
                rec.update(contention_density=res.contention_density, exact_capacity=res.exact_capacity,
                           asymptotic_capacity=res.asymptotic_capacity)
            except (InfeasibleEpsilonError, DomainError, BracketError) as exc:
                rec.update(contention_density=None, exact_capacity=None, asymptotic_capacity=None,
                           note=str(exc))
        records.append(rec)
    lines = [json.dumps(rec) for rec in records]
    _emit(lines, r, args, [])
    return EXIT_OK


def run_validate(args) -> int:
    from .validation import run_all

    if not (args.sigma > 0 and math.isfinite(args.sigma)):
        raise UsageError("--sigma must be positive")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    trials = args.trials or DEFAULTS["validate"]["trials"]
    results = run_all(trials=trials, sigma=args.sigma, seed=args.seed, workers=args.workers)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"all {len(results)} checks passed")
    return EXIT_OK


COMMANDS = {
    "outage-curve": run_outage_curve,
    "tc-vs-epsilon": run_tc_vs_epsilon,
    "tc-vs-alpha": run_tc_vs_alpha,
    "point": run_point,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "validate":
            return run_validate(args)
        return COMMANDS[args.command](args, _resolve(args))
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleEpsilonError, BracketError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, ConsistencyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
