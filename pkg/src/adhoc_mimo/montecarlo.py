"""Monte Carlo validation of the closed-form outage probability.

Two estimators share the same per-trial interferer realizations:

* :func:`simulate_outage` draws Rayleigh channels and computes the MMSE SINR
  directly from the received-signal model.
* :func:`simulate_outage_semianalytic` averages the exact conditional outage
  (channels integrated out) over interferer positions only.

The plane is truncated to a disc; interference from beyond the disc is
replaced by its mean, which enters as extra white noise.  Trial ``t`` of seed
``s`` reads only from the counter-based streams keyed by ``(s, t)``, so the
estimates do not depend on how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import LinkConfig, NetworkParams, _check_alpha
from .errors import DomainError, NumericalError
from .numerics import (
    CounterStreams,
    cholesky,
    forward_substitute,
    poly_mul,
    sample_complex_gaussian,
    trial_stream,
)

__all__ = [
    "DEFAULT_DELTA",
    "PppRealization",
    "SinrSample",
    "OutageEstimate",
    "truncation_radius",
    "far_field_interference",
    "sample_ppp",
    "mmse_sinr",
    "simulate_outage",
    "conditional_outage",
    "conditional_outage_mc",
    "simulate_outage_semianalytic",
]

DEFAULT_DELTA = 1e-2
MIN_RADIUS = 5.0  # in units of d0
CHUNK = 1024  # trials per work unit

_POSITIONS, _CHANNELS = 0, 1


@dataclass(frozen=True)
class PppRealization:
    """Interferer positions in polar form, ordered by distance from the origin."""

    radius: float
    distances: np.ndarray = field(repr=False)
    angles: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.distances)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.distances * np.cos(self.angles), self.distances * np.sin(self.angles)])


@dataclass(frozen=True)
class SinrSample:
    sinr: float
    stream_index: int


@dataclass(frozen=True)
class OutageEstimate:
    probability: float
    trials: int
    std_error: float

    @classmethod
    def from_count(cls, outages: int, trials: int) -> "OutageEstimate":
        p = outages / trials
        return cls(p, trials, math.sqrt(p * (1.0 - p) / trials))

    @classmethod
    def from_values(cls, values: np.ndarray) -> "OutageEstimate":
        n = len(values)
        mean = math.fsum(values) / n
        sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
        return cls(min(max(mean, 0.0), 1.0), n, sd / math.sqrt(n))


def truncation_radius(net: NetworkParams, cfg: LinkConfig, delta: float = DEFAULT_DELTA) -> float:
    """Simulation disc radius.

    ``r*`` makes the mean interference from beyond the disc equal to ``delta``
    times the mean desired-signal power: ``n_t lam 2 pi r^(2-alpha) / (alpha-2)
    = delta d0^-alpha``.  Never smaller than ``MIN_RADIUS * d0``.
    """
    _check_alpha(net.alpha)
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    floor = MIN_RADIUS * cfg.d0
    if net.density == 0:
        return floor
    a = net.alpha
    r_star = (cfg.n_t * net.density * 2 * math.pi * cfg.d0**a / ((a - 2) * delta)) ** (1 / (a - 2))
    return max(floor, r_star)


def far_field_interference(net: NetworkParams, cfg: LinkConfig, radius: float) -> float:
    """Mean per-antenna interference power (unit transmit power) from beyond ``radius``."""
    a = net.alpha
    return cfg.n_t * net.density * 2 * math.pi * radius ** (2 - a) / (a - 2)


def sample_ppp(net: NetworkParams, radius: float, rng: np.random.Generator) -> PppRealization:
    """Homogeneous PPP on the disc of ``radius`` centred at the origin.

    Points are generated outward as arrivals of a unit-rate process in
    ``lam * pi * r**2``, which gives a Poisson count with independent uniform
    positions.  Because each point consumes a fixed pair of uniforms, a larger
    disc reproduces the points of a smaller one exactly.
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius!r}")
    if net.density == 0:
        return PppRealization(radius, np.empty(0), np.empty(0))
    mass = net.density * math.pi * radius**2
    chunks, total = [], 0.0
    while True:
        n = int(mass - total + 5 * math.sqrt(mass) + 16)
        u = rng.random((n, 2))
        area = total + np.cumsum(-np.log1p(-u[:, 0]))
        keep = area <= mass
        chunks.append((area[keep], u[keep, 1]))
        if not keep[-1]:
            break
        total = area[-1]
    area = np.concatenate([c[0] for c in chunks])
    angle = 2 * math.pi * np.concatenate([c[1] for c in chunks])
    return PppRealization(radius, np.sqrt(area / (net.density * math.pi)), angle)


# SINR kernels


def _sqrt_factor(columns: np.ndarray, noise: float) -> np.ndarray:
    # Lower L with L L^H = C C^H + noise I, from a QR of [C^H; sqrt(noise) I].
    n_r = columns.shape[0]
    stacked = np.vstack([columns.conj().T, math.sqrt(noise) * np.eye(n_r)])
    upper = np.linalg.qr(stacked, mode="r")
    d = np.diag(upper)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    return (upper / phase[:, None]).conj().T


def _effective_noise(cfg: LinkConfig, net: NetworkParams, radius: float | None, compensate: bool) -> float:
    # noise variance over transmit power, plus the far-field mean
    noise = 0.0 if math.isinf(cfg.gamma) else 1.0 / cfg.gamma
    if compensate and radius is not None and net.density > 0:
        noise += far_field_interference(net, cfg, radius)
    return noise


def _draw_columns(
    cfg: LinkConfig,
    alpha: float,
    distances: np.ndarray,
    rng: np.random.Generator,
    stream_k: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Desired column (n_r,) and scaled interference columns (n_r, m).

    Channels are read from ``rng`` in a fixed order: the typical
    transmitter's ``n_t`` columns, then ``n_t`` columns per interferer in
    distance order.
    """
    n_t, n_r = cfg.n_t, cfg.n_r
    h0 = sample_complex_gaussian(rng, (n_t, n_r))
    g = sample_complex_gaussian(rng, (len(distances), n_t, n_r))
    g *= (distances ** (-alpha / 2))[:, None, None]
    self_cols = h0[np.arange(n_t) != stream_k - 1] * cfg.d0 ** (-alpha / 2)
    return h0[stream_k - 1], np.concatenate([self_cols, g.reshape(-1, n_r)]).T


def _covariance(others: np.ndarray, noise: float) -> np.ndarray:
    cov = others @ others.conj().T
    cov[np.diag_indices(cov.shape[0])] += noise
    return cov


def _sinr_single(desired: np.ndarray, others: np.ndarray, noise: float, gain: float) -> float:
    """``gain * h^H (C C^H + noise I)^{-1} h`` via a Cholesky factor."""
    n_r = desired.shape[0]
    if noise == 0 and others.shape[1] < n_r:
        # interference spans a proper subspace; the stream is nulled cleanly
        return math.inf
    try:
        lower = cholesky(_covariance(others, noise))
    except NumericalError:
        # Gram matrix lost definiteness to rounding; factor the columns directly
        lower = _sqrt_factor(others, noise)
        if not np.all(np.abs(np.diag(lower)) > 0):
            raise NumericalError(f"singular interference covariance (noise={noise!r})") from None
    y = forward_substitute(lower, desired)
    return gain * float(np.vdot(y, y).real)


def mmse_sinr(
    cfg: LinkConfig,
    net: NetworkParams,
    realization: PppRealization,
    rng: np.random.Generator,
    stream_k: int = 1,
    compensate: bool = True,
) -> SinrSample:
    """SINR of stream ``stream_k`` at the MMSE output for one realization.

    Fresh Rayleigh channels are drawn from ``rng``.  Covariances are
    normalized by the transmit power, so ``gamma=inf`` drops the noise term.
    """
    if not 1 <= stream_k <= cfg.n_t:
        raise DomainError(f"stream_k must lie in [1, {cfg.n_t}], got {stream_k!r}")
    desired, others = _draw_columns(cfg, net.alpha, realization.distances, rng, stream_k)
    noise = _effective_noise(cfg, net, realization.radius, compensate)
    return SinrSample(_sinr_single(desired, others, noise, cfg.d0 ** (-net.alpha)), stream_k)


def _outage_chunk(args) -> int:
    cfg, net, seed, start, stop, radius, stream_k, compensate = args
    streams = CounterStreams()
    noise = _effective_noise(cfg, net, radius, compensate)
    gain = cfg.d0 ** (-net.alpha)
    n = stop - start
    desired = np.empty((n, cfg.n_r), dtype=complex)
    cov = np.empty((n, cfg.n_r, cfg.n_r), dtype=complex)
    sinr = np.full(n, np.nan)
    for i, t in enumerate(range(start, stop)):
        real = sample_ppp(net, radius, streams.at(seed, t, _POSITIONS))
        h, others = _draw_columns(cfg, net.alpha, real.distances, streams.at(seed, t, _CHANNELS), stream_k)
        if noise == 0 and others.shape[1] < cfg.n_r:
            sinr[i] = math.inf
            cov[i] = np.eye(cfg.n_r)
            desired[i] = h
            continue
        desired[i] = h
        cov[i] = _covariance(others, noise)
    todo = np.isnan(sinr)
    try:
        y = forward_substitute(cholesky(cov[todo]), desired[todo])
        sinr[todo] = gain * np.einsum("bi,bi->b", y.conj(), y).real
    except NumericalError:
        # redo one trial at a time to isolate and repair the offender
        for i in np.flatnonzero(todo):
            t = start + i
            real = sample_ppp(net, radius, streams.at(seed, t, _POSITIONS))
            h, others = _draw_columns(cfg, net.alpha, real.distances, streams.at(seed, t, _CHANNELS), stream_k)
            try:
                sinr[i] = _sinr_single(h, others, noise, gain)
            except NumericalError as exc:
                raise NumericalError(f"trial {t}: {exc}") from None
    return int(np.count_nonzero(sinr <= cfg.z))


def _chunks(trials: int):
    return [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def simulate_outage(
    cfg: LinkConfig,
    net: NetworkParams,
    trials: int,
    seed: int = 0,
    delta: float = DEFAULT_DELTA,
    *,
    stream_k: int = 1,
    compensate: bool = True,
    workers: int = 1,
) -> OutageEstimate:
    """Fraction of independent snapshots with SINR at or below ``cfg.z``."""
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials!r}")
    if not 1 <= stream_k <= cfg.n_t:
        raise DomainError(f"stream_k must lie in [1, {cfg.n_t}], got {stream_k!r}")
    radius = truncation_radius(net, cfg, delta)
    jobs = [(cfg, net, seed, a, b, radius, stream_k, compensate) for a, b in _chunks(trials)]
    return OutageEstimate.from_count(sum(_map(_outage_chunk, jobs, workers)), trials)


# Conditional (channels averaged out) outage


def _noise_weights(n_r: int, snr_term: float) -> np.ndarray:
    # A_p = sum_{u < n_r - p} snr_term^u / u!
    terms = np.array([snr_term**u / math.factorial(u) for u in range(n_r)])
    return np.cumsum(terms)[::-1].copy()


def conditional_outage(
    cfg: LinkConfig,
    alpha: float,
    distances_alpha,
    extra_noise: float = 0.0,
) -> float:
    """Outage probability given interferers at ``|D_i|**alpha = x_i``.

    The success probability is
    ``exp(-S) * sum_{p<n_r} A_p(S) * [t^p] ((1+z t)/(1+z))^(n_t-1)
    * prod_i ((1 + s_i t)/(1 + s_i))^n_t`` with ``s_i = z d0^alpha / x_i`` and
    ``S = z d0^alpha (1/gamma + extra_noise)``.  Each factor is normalized
    before multiplying so the coefficients stay in [0, 1].
    """
    _check_alpha(alpha)
    x = np.asarray(distances_alpha, dtype=float).ravel()
    if np.any(~(x > 0)):
        raise DomainError("distances_alpha must be positive")
    n_t, n_r, z = cfg.n_t, cfg.n_r, cfg.z
    top = n_r - 1
    poly = np.ones(1)
    self_factor = np.array([1.0, z]) / (1.0 + z)
    for _ in range(n_t - 1):
        poly = poly_mul(poly, self_factor, top)
    for s in z * cfg.d0**alpha / x:
        factor = np.array([1.0, s]) / (1.0 + s)
        for _ in range(n_t):
            poly = poly_mul(poly, factor, top)
    coeffs = np.zeros(n_r)
    coeffs[: len(poly)] = poly[:n_r]
    snr_term = z * cfg.d0**alpha * ((0.0 if math.isinf(cfg.gamma) else 1.0 / cfg.gamma) + extra_noise)
    success = math.exp(-snr_term) * float(_noise_weights(n_r, snr_term) @ coeffs)
    return min(max(1.0 - success, 0.0), 1.0)


def _conditional_outage_batch(cfg: LinkConfig, alpha: float, x: np.ndarray, snr_term: float) -> np.ndarray:
    """Vectorized :func:`conditional_outage` over rows of ``x`` (inf = no interferer)."""
    n_t, n_r, z = cfg.n_t, cfg.n_r, cfg.z
    batch = x.shape[0]
    coeffs = np.zeros((batch, n_r))
    coeffs[:, 0] = 1.0

    def apply(a, b):
        # multiply every row by (a + b t), truncated at degree n_r - 1
        coeffs[:, 1:] = a[:, None] * coeffs[:, 1:] + b[:, None] * coeffs[:, :-1]
        coeffs[:, 0] *= a

    one = np.ones(batch)
    for _ in range(n_t - 1):
        apply(one / (1 + z), one * z / (1 + z))
    s = z * cfg.d0**alpha / x
    for j in range(x.shape[1]):
        a = 1.0 / (1.0 + s[:, j])
        b = s[:, j] * a
        for _ in range(n_t):
            apply(a, b)
    success = math.exp(-snr_term) * (coeffs @ _noise_weights(n_r, snr_term))
    return np.clip(1.0 - success, 0.0, 1.0)


def _semianalytic_chunk(args) -> np.ndarray:
    cfg, net, seed, start, stop, radius, compensate = args
    streams = CounterStreams()
    dists = [sample_ppp(net, radius, streams.at(seed, t, _POSITIONS)).distances for t in range(start, stop)]
    width = max((len(d) for d in dists), default=0)
    x = np.full((stop - start, width), np.inf)
    for i, d in enumerate(dists):
        x[i, : len(d)] = d**net.alpha
    noise = _effective_noise(cfg, net, radius, compensate)
    return _conditional_outage_batch(cfg, net.alpha, x, cfg.z * cfg.d0**net.alpha * noise)


def simulate_outage_semianalytic(
    cfg: LinkConfig,
    net: NetworkParams,
    trials: int,
    seed: int = 0,
    delta: float = DEFAULT_DELTA,
    *,
    compensate: bool = True,
    workers: int = 1,
) -> OutageEstimate:
    """Average of the conditional outage over PPP realizations.

    ``std_error`` is the sample standard deviation of the conditional values
    over ``sqrt(trials)``.  Realizations match :func:`simulate_outage` for the
    same ``seed`` and ``delta``.
    """
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials!r}")
    radius = truncation_radius(net, cfg, delta)
    jobs = [(cfg, net, seed, a, b, radius, compensate) for a, b in _chunks(trials)]
    return OutageEstimate.from_values(np.concatenate(_map(_semianalytic_chunk, jobs, workers)))


def conditional_outage_mc(
    cfg: LinkConfig,
    alpha: float,
    distances_alpha,
    draws: int,
    seed: int = 0,
    batch: int = 8192,
) -> OutageEstimate:
    """Channels-only Monte Carlo with interferer positions held fixed."""
    _check_alpha(alpha)
    x = np.asarray(distances_alpha, dtype=float).ravel()
    n_t, n_r = cfg.n_t, cfg.n_r
    noise = 0.0 if math.isinf(cfg.gamma) else 1.0 / cfg.gamma
    if noise == 0 and (n_t - 1 + len(x) * n_t) < n_r:
        return OutageEstimate.from_count(0, draws)
    gain = cfg.d0**-alpha
    outages = 0
    for b, start in enumerate(range(0, draws, batch)):
        m = min(batch, draws - start)
        rng = trial_stream(seed, b, 2)
        h0 = sample_complex_gaussian(rng, (m, n_t, n_r))
        g = sample_complex_gaussian(rng, (m, len(x), n_t, n_r)) * (x ** -0.5)[None, :, None, None]
        cols = np.concatenate([h0[:, 1:, :] * math.sqrt(gain), g.reshape(m, -1, n_r)], axis=1)
        cov = np.einsum("bci,bcj->bij", cols, cols.conj())
        cov[:, np.arange(n_r), np.arange(n_r)] += noise
        y = forward_substitute(cholesky(cov), h0[:, 0, :])
        sinr = gain * np.einsum("bi,bi->b", y.conj(), y).real
        outages += int(np.count_nonzero(sinr <= cfg.z))
    return OutageEstimate.from_count(outages, draws)
