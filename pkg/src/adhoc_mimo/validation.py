"""Cross-checks between the closed forms, the partition machinery and the
simulators.  Used by ``adhoc-mimo validate`` and the acceptance tests."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import partitions as P
from .analytic import (
    LinkConfig,
    NetworkParams,
    contention_density,
    outage_probability,
    theta,
    transmission_capacity_asymptotic,
    transmission_capacity_exact,
    max_cancelable,
)
from .montecarlo import (
    DEFAULT_DELTA,
    OutageEstimate,
    conditional_outage,
    conditional_outage_mc,
    simulate_outage,
    simulate_outage_semianalytic,
)

OUTAGE_REF = dict(n_r=4, alpha=4.6, z=1.0, gamma=100.0, d0=1.0)  # 0 dB threshold, 20 dB SNR
CAPACITY_REF = dict(n_r=4, alpha=4.5, z=10.0, gamma=math.inf, d0=1.0)  # 10 dB threshold
STREAMS = (1, 2, 4)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def outage_link(n_t: int) -> LinkConfig:
    return LinkConfig(n_t, OUTAGE_REF["n_r"], OUTAGE_REF["z"], OUTAGE_REF["gamma"], OUTAGE_REF["d0"])


def capacity_link(n_t: int, gamma: float = math.inf) -> LinkConfig:
    return LinkConfig(n_t, CAPACITY_REF["n_r"], CAPACITY_REF["z"], gamma, CAPACITY_REF["d0"])


def outage_density_grid(n_t: int, points: int = 5, lo: float = 0.05, hi: float = 0.9) -> np.ndarray:
    """Log-spaced per-stream densities whose analytic outage spans [lo, hi].

    The returned values are stream densities; each transmitter uses
    ``density / n_t``.
    """
    cfg = outage_link(n_t)
    a = contention_density(cfg, OUTAGE_REF["alpha"], lo) * n_t
    b = contention_density(cfg, OUTAGE_REF["alpha"], hi) * n_t
    return np.geomspace(a, b, points)


# 1. Partition bookkeeping


def check_partitions() -> CheckResult:
    def run():
        got = [p.summands for p in P.enumerate_partitions(4)]
        want = [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
        probes = {
            "h(2,3,4)": (P.summand(2, 3, 4), 2),
            "h(2,4,4)": (P.summand(2, 4, 4), 1),
            "|h(.,3,4)|": (P.num_summands(3, 4), 2),
            "|h(.,.,4)|": (P.partition_count(4), 5),
            "g(1,3,4)": (P.multiplicity(1, 3, 4), 2),
            "g(1,5,4)": (P.multiplicity(1, 5, 4), 4),
            "|g(.,3,4)|": (P.num_distinct(3, 4), 1),
        }
        bad = [k for k, (a, b) in probes.items() if a != b]
        ok = got == want and not bad
        return ok, f"order {'ok' if got == want else got}; mismatches {bad or 'none'}"

    return _timed("partition fidelity", run)


# 2. Collapse identities


def check_collapse(points: int = 100, seed: int = 0, tol: float = 1e-12) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        worst_single = worst_noise = 0.0
        for _ in range(points):
            alpha = rng.uniform(2.1, 6.0)
            z = 10 ** rng.uniform(-2, 2)
            gamma = 10 ** rng.uniform(0, 3)
            d0 = rng.uniform(0.5, 2.0)
            lam = rng.uniform(0, 1)
            cfg = LinkConfig(1, 1, z, gamma, d0)
            s = z * d0**alpha / gamma
            want = 1 - math.exp(-s - theta(cfg, alpha) * lam)
            worst_single = max(worst_single, abs(outage_probability(cfg, NetworkParams(lam, alpha)) - want))
            n_r = int(rng.integers(1, 7))
            cfg = LinkConfig(1, n_r, z, gamma, d0)
            gamma_cdf = 1 - math.exp(-s) * math.fsum(s**p / math.factorial(p) for p in range(n_r))
            worst_noise = max(worst_noise, abs(outage_probability(cfg, NetworkParams(0.0, alpha)) - gamma_cdf))
        ok = worst_single <= tol and worst_noise <= tol
        return ok, f"max |err| single-antenna {worst_single:.2e}, noise-only {worst_noise:.2e} (tol {tol:g})"

    return _timed("collapse identities", run)


# 3 & 4. Closed form vs simulation


@dataclass
class GridPoint:
    n_t: int
    stream_density: float
    analytic: float
    mc: OutageEstimate | None = None
    semi: OutageEstimate | None = None
    mc_seconds: float = 0.0
    semi_seconds: float = 0.0


def run_outage_grid(trials: int, seed: int = 0, semi: bool = True, workers: int = 1) -> list[GridPoint]:
    out = []
    for n_t in STREAMS:
        cfg = outage_link(n_t)
        for lam in outage_density_grid(n_t):
            net = NetworkParams(float(lam) / n_t, OUTAGE_REF["alpha"])
            gp = GridPoint(n_t, float(lam), outage_probability(cfg, net))
            t0 = time.perf_counter()
            gp.mc = simulate_outage(cfg, net, trials, seed, workers=workers)
            gp.mc_seconds = time.perf_counter() - t0
            if semi:
                t0 = time.perf_counter()
                gp.semi = simulate_outage_semianalytic(cfg, net, trials, seed, workers=workers)
                gp.semi_seconds = time.perf_counter() - t0
            out.append(gp)
    return out


def check_closed_form_vs_mc(grid: list[GridPoint], sigma: float = 3.0) -> CheckResult:
    def run():
        worst, fails = 0.0, []
        for g in grid:
            z = abs(g.analytic - g.mc.probability) / g.mc.std_error
            worst = max(worst, z)
            if z > sigma:
                fails.append(f"n_t={g.n_t} lam={g.stream_density:.4g}")
        return not fails, f"{len(grid)} points, worst |diff|/se = {worst:.2f} (gate {sigma:g}); failing {fails or 'none'}"

    return _timed("closed form vs Monte Carlo", run)


def check_estimators(grid: list[GridPoint], sigma: float = 3.0) -> CheckResult:
    def run():
        worst, fails = 0.0, []
        for g in grid:
            comb = math.hypot(g.mc.std_error, g.semi.std_error)
            z = abs(g.mc.probability - g.semi.probability) / comb
            worst = max(worst, z)
            if z > sigma or not g.semi.std_error < g.mc.std_error:
                fails.append(f"n_t={g.n_t} lam={g.stream_density:.4g}")
        ratio = max(g.semi.std_error / g.mc.std_error for g in grid)
        return not fails, (
            f"worst |mc-semi|/combined se = {worst:.2f} (gate {sigma:g}); "
            f"max se ratio semi/mc = {ratio:.3f}; failing {fails or 'none'}"
        )

    return _timed("estimator equivalence", run)


# 5. Single-stream dominance


def outage_crossover(n_t: int) -> tuple[float, float]:
    """Stream density where the n_t-stream outage drops below single-stream
    outage on the outage reference link, and the outage there."""
    from scipy.optimize import brentq

    alpha = OUTAGE_REF["alpha"]

    def gap(lam):
        return (outage_probability(outage_link(1), NetworkParams(lam, alpha))
                - outage_probability(outage_link(n_t), NetworkParams(lam / n_t, alpha)))

    lo = outage_density_grid(1, 2, 0.5, 0.99)
    lam = brentq(gap, lo[0], lo[1], xtol=1e-12)
    return lam, outage_probability(outage_link(1), NetworkParams(lam, alpha))


def check_dominance(points: int = 20, outage_range: tuple[float, float] = (1e-4, 0.5)) -> CheckResult:
    """Strict ordering over the low-outage operating region.

    At the outage reference link the curves cross once single-stream outage
    exceeds roughly 0.76, so the density sweep stops well short of that.
    """

    def run():
        alpha = OUTAGE_REF["alpha"]
        ends = outage_density_grid(1, 2, *outage_range)
        bad = []
        for lam in np.geomspace(ends[0], ends[1], points):
            f = {n: outage_probability(outage_link(n), NetworkParams(float(lam) / n, alpha)) for n in STREAMS}
            if not (f[1] <= f[2] and f[1] <= f[4]):
                bad.append(("outage", float(lam)))
        for eps in np.geomspace(1e-4, 0.8, points):
            c = {n: transmission_capacity_exact(capacity_link(n), CAPACITY_REF["alpha"], float(eps)).exact_capacity for n in STREAMS}
            if not (c[1] > c[2] and c[1] > c[4]):
                bad.append(("capacity", float(eps)))
        cross = outage_crossover(2)[1]
        return not bad, (
            f"{points} densities (single-stream outage {outage_range[0]:g}..{outage_range[1]:g}) and "
            f"{points} outage targets; violations {bad or 'none'}; "
            f"outage curves cross at single-stream outage {cross:.3f}"
        )

    return _timed("single-stream dominance", run)


# 6. Small-outage asymptotics


def check_asymptotics() -> CheckResult:
    def run():
        alpha = CAPACITY_REF["alpha"]
        eps = np.geomspace(1e-6, 1e-3, 13)
        parts, ok = [], True
        for n in STREAMS:
            cfg = capacity_link(n)
            ell = max_cancelable(cfg.n_r, n)
            lam = [contention_density(cfg, alpha, float(e)) for e in eps]
            slope = np.polyfit(np.log(eps), np.log(lam), 1)[0]
            gap = {
                e: abs(transmission_capacity_exact(cfg, alpha, e).exact_capacity / transmission_capacity_asymptotic(cfg, alpha, e) - 1)
                for e in (1e-4, 1e-2)
            }
            good = abs(slope * ell - 1) <= 0.10 and gap[1e-4] < gap[1e-2]
            ok &= good
            parts.append(f"n_t={n}: slope {slope:.4f} vs 1/ell={1 / ell:.4f}, gap {gap[1e-4]:.2e} < {gap[1e-2]:.2e}")
        return ok, "; ".join(parts)

    return _timed("small-outage asymptotics", run)


# 7. Conditional CDF


def random_fixed_configs(count: int = 20, seed: int = 7) -> list[tuple[LinkConfig, float, np.ndarray]]:
    """Random interferer sets (L <= 5) at n_r = 4 whose outage is not degenerate."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n_t = 1 + len(out) % 2
        L = int(rng.integers(0, 6))
        alpha = float(rng.uniform(2.5, 5.0))
        z = float(10 ** rng.uniform(-0.5, 1.0))
        gamma = float(10 ** rng.uniform(0.5, 2.0))
        x = rng.uniform(0.3, 3.0, L) ** alpha
        cfg = LinkConfig(n_t, 4, z, gamma, 1.0)
        if 0.02 <= conditional_outage(cfg, alpha, x) <= 0.98:
            out.append((cfg, alpha, x))
    return out


def conditional_zscores(draws: int = 100_000, count: int = 20, seed: int = 0) -> list[float]:
    """Signed (simulated - exact) / std_error for each random configuration."""
    out = []
    for i, (cfg, alpha, x) in enumerate(random_fixed_configs(count)):
        est = conditional_outage_mc(cfg, alpha, x, draws, seed + i)
        out.append((est.probability - conditional_outage(cfg, alpha, x)) / est.std_error)
    return out


def check_conditional(draws: int = 100_000, sigma: float = 3.0, count: int = 20, seed: int = 0) -> CheckResult:
    def run():
        z = conditional_zscores(draws, count, seed)
        fails = [i for i, v in enumerate(z) if abs(v) > sigma]
        worst = max(abs(v) for v in z)
        return not fails, (
            f"{count} configurations, worst |diff|/se = {worst:.2f} (gate {sigma:g}); "
            f"sum z^2 = {sum(v * v for v in z):.1f} on {count} dof; failing {fails or 'none'}"
        )

    return _timed("conditional outage vs channel Monte Carlo", run)


# 8. Determinism and truncation


def reference_point() -> tuple[LinkConfig, NetworkParams]:
    """Middle point of the n_t = 2 outage grid."""
    n_t = 2
    lam = float(outage_density_grid(n_t)[2])
    return outage_link(n_t), NetworkParams(lam / n_t, OUTAGE_REF["alpha"])


def check_truncation(trials: int = 100_000, seed: int = 0, delta: float = DEFAULT_DELTA) -> CheckResult:
    def run():
        cfg, net = reference_point()
        a = simulate_outage(cfg, net, trials, seed, delta)
        b = simulate_outage(cfg, net, trials, seed, delta / 2)
        diff = abs(a.probability - b.probability)
        return diff < a.std_error, f"p(delta)={a.probability:.5f}, p(delta/2)={b.probability:.5f}, |diff|={diff:.2e} < se={a.std_error:.2e}"

    return _timed("truncation insensitivity", run)


def check_determinism(trials: int = 2000, seed: int = 0) -> CheckResult:
    from .cli import main  # local import: cli depends on this module

    def run():
        import contextlib
        import io

        outputs = []
        for workers in (1, 1, 2):
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                code = main([
                    "outage-curve", "--points", "3", "--trials", str(trials),
                    "--seed", str(seed), "--workers", str(workers),
                ])
            outputs.append((code, buf.getvalue()))
        same = all(o == outputs[0] for o in outputs) and outputs[0][0] == 0
        return same, f"3 runs (workers 1, 1, 2) identical: {same}, {len(outputs[0][1])} bytes"

    return _timed("byte-identical output", run)


def run_all(trials: int = 20_000, sigma: float = 3.0, seed: int = 0, workers: int = 1, log=print) -> list[CheckResult]:
    results = []

    def add(r: CheckResult):
        results.append(r)
        log(r.line())

    add(check_partitions())
    add(check_collapse())
    grid = run_outage_grid(trials, seed, workers=workers)
    r = check_closed_form_vs_mc(grid, sigma)
    r.seconds += sum(g.mc_seconds for g in grid)
    add(r)
    r = check_estimators(grid, sigma)
    r.seconds += sum(g.semi_seconds for g in grid)
    add(r)
    add(check_dominance())
    add(check_asymptotics())
    add(check_conditional(trials, sigma))
    add(check_determinism(min(trials, 2000), seed))
    add(check_truncation(trials, seed))
    return results
