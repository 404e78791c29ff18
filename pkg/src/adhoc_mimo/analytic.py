"""Closed-form outage probability and transmission capacity.

Everything here works on linear scales; dB conversion happens in the CLI.
``gamma=math.inf`` selects the interference-limited (high-SNR) regime.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError, InfeasibleEpsilonError
from .numerics import find_root_increasing, gamma_ratio
from .partitions import (
    Partition,
    enumerate_partitions,
    multiplicity_profile,
    partitions_with_length,
)

__all__ = [
    "LinkConfig",
    "NetworkParams",
    "CapacityResult",
    "OutageCurve",
    "theta",
    "xi",
    "outage_probability",
    "noise_floor",
    "max_cancelable",
    "omega",
    "contention_density",
    "transmission_capacity_exact",
    "transmission_capacity_asymptotic",
]


@dataclass(frozen=True)
class LinkConfig:
    """Per-link parameters.

    ``z`` is the linear SINR threshold (``2**R - 1``), ``gamma`` the linear
    transmit SNR ``P/N0`` (may be ``inf``) and ``d0`` the link distance.
    ``z = 0`` is accepted as the zero-rate limit, where outage vanishes.
    """

    n_t: int
    n_r: int
    z: float
    gamma: float = math.inf
    d0: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.n_t, int) and self.n_t >= 1):
            raise DomainError(f"n_t must be a positive integer, got {self.n_t!r}")
        if not (isinstance(self.n_r, int) and self.n_r >= 1):
            raise DomainError(f"n_r must be a positive integer, got {self.n_r!r}")
        if not (self.z >= 0 and math.isfinite(self.z)):
            raise DomainError(f"z must be non-negative and finite, got {self.z!r}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")
        if not (self.d0 > 0 and math.isfinite(self.d0)):
            raise DomainError(f"d0 must be positive and finite, got {self.d0!r}")

    @property
    def rate(self) -> float:
        return math.log2(1.0 + self.z)


@dataclass(frozen=True)
class NetworkParams:
    density: float
    alpha: float

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if not (self.density >= 0 and math.isfinite(self.density)):
            raise DomainError(f"density must be non-negative and finite, got {self.density!r}")


@dataclass(frozen=True)
class CapacityResult:
    epsilon: float
    contention_density: float
    exact_capacity: float
    asymptotic_capacity: float
    ell: int
    omega: float


def _check_alpha(alpha: float) -> None:
    if not (alpha > 2 and math.isfinite(alpha)):
        raise DomainError(f"path loss exponent must exceed 2, got {alpha!r}")


def _snr_term(cfg: LinkConfig, alpha: float) -> float:
    # z d0^alpha / gamma; zero in the interference-limited regime
    if math.isinf(cfg.gamma):
        return 0.0
    return cfg.z * cfg.d0**alpha / cfg.gamma


def theta(cfg: LinkConfig, alpha: float) -> float:
    """Interference coefficient multiplying the density in the outage exponent."""
    _check_alpha(alpha)
    delta = 2.0 / alpha
    # (d0^alpha z)^(2/alpha) = d0^2 z^(2/alpha)
    scale = cfg.d0**2 * cfg.z**delta
    return math.pi * scale * gamma_ratio([cfg.n_t + delta, 1.0 - delta], [cfg.n_t])


def xi(p: Partition, n_t: int, alpha: float) -> float:
    """Weight of one partition in the outage expansion.

    Product over summands ``m`` of
    ``prod_{k<=m} (n_t-k+1)(k-1-2/alpha) / (k (n_t+2/alpha-k))``, divided by
    the product of factorials of the summand multiplicities.  Summands larger
    than ``n_t`` make the weight vanish.
    """
    _check_alpha(alpha)
    return _xi(p.summands, n_t, alpha)


@lru_cache(maxsize=4096)
def _xi(summands: tuple[int, ...], n_t: int, alpha: float) -> float:
    delta = 2.0 / alpha
    value = 1.0
    for m in summands:
        for k in range(1, m + 1):
            value *= (n_t - k + 1) * (k - 1 - delta) / (k * (n_t + delta - k))
    for _, mult in multiplicity_profile(Partition(summands)).entries:
        value /= math.factorial(mult)
    return value


class OutageCurve:
    """Outage probability as a function of density for fixed link and alpha.

    The expansion is precomputed once as a polynomial in ``y = Theta*lambda``:
    ``F(lambda) = 1 - exp(-snr_term - y) * P(y) / (1+z)**(n_t-1)``.
    """

    def __init__(self, cfg: LinkConfig, alpha: float):
        _check_alpha(alpha)
        self.cfg = cfg
        self.alpha = alpha
        self.theta = theta(cfg, alpha)
        self.snr_term = _snr_term(cfg, alpha)
        self.coefficients = self._build()

    def _build(self) -> np.ndarray:
        cfg, s = self.cfg, self.snr_term
        n_t, n_r, z = cfg.n_t, cfg.n_r, cfg.z
        coeffs = np.zeros(n_r)
        for p in range(n_r):
            # noise-side weight: sum_{v=1}^{n_r-p} s^(v-1)/(v-1)!
            a_p = math.fsum(s**u / math.factorial(u) for u in range(n_r - p)) if s else 1.0
            for q in range(min(p, n_t - 1) + 1):
                w = math.comb(n_t - 1, q) * z**q
                for part in enumerate_partitions(p - q):
                    # (-Theta lambda)^{#summands} -> sign folded in here
                    coeffs[len(part)] += a_p * w * _xi(part.summands, n_t, self.alpha) * (-1) ** len(part)
        return coeffs

    def success(self, density: float) -> float:
        y = self.theta * density
        poly = math.fsum(c * y**i for i, c in enumerate(self.coefficients))
        return math.exp(-self.snr_term - y) * poly / (1.0 + self.cfg.z) ** (self.cfg.n_t - 1)

    def __call__(self, density: float) -> float:
        if not density >= 0:
            raise DomainError(f"density must be non-negative, got {density!r}")
        f = 1.0 - self.success(density)
        if not -1e-9 <= f <= 1.0 + 1e-9:
            raise ConsistencyError(f"outage {f!r} outside [0, 1]")
        return min(max(f, 0.0), 1.0)


@lru_cache(maxsize=256)
def _curve(cfg: LinkConfig, alpha: float) -> OutageCurve:
    return OutageCurve(cfg, alpha)


def outage_probability(cfg: LinkConfig, net: NetworkParams) -> float:
    """Per-stream outage probability Pr(SINR <= z) of the MMSE receiver."""
    return _curve(cfg, net.alpha)(net.density)


def noise_floor(cfg: LinkConfig, alpha: float) -> float:
    """Outage with no interferers (zero at infinite SNR)."""
    return _curve(cfg, alpha)(0.0)


def max_cancelable(n_r: int, n_t: int) -> int:
    """``floor(n_r/n_t)``: one more than the number of strongest interferers
    the MMSE receiver can null while keeping all ``n_t`` streams clean."""
    if n_t < 1 or n_r < 1:
        raise DomainError("antenna counts must be positive")
    if n_t > n_r:
        raise DomainError(f"n_t={n_t} exceeds n_r={n_r}: self-interference cannot be nulled")
    ell = n_r // n_t
    if not ((n_r + 1) / (ell + 1) <= n_t < (n_r + 1) / ell):
        warnings.warn(f"ell={ell} violates the cancellation sandwich for n_r={n_r}, n_t={n_t}")
    return ell


def omega(cfg: LinkConfig, alpha: float) -> float:
    """Leading coefficient of the small-density outage: F ~ omega * (Theta*lambda)**ell.

    Interference-limited regime.  The inner sum over ``p`` is empty whenever
    ``n_r-1-q < ell``.
    """
    _check_alpha(alpha)
    ell = max_cancelable(cfg.n_r, cfg.n_t)
    n_t, z = cfg.n_t, cfg.z
    acc = []
    for q in range(n_t):
        inner = math.fsum(
            _xi(part.summands, n_t, alpha)
            for p in range(ell, cfg.n_r - q)
            for part in partitions_with_length(p, ell)
        )
        acc.append(math.comb(n_t - 1, q) * z**q * inner)
    return 1.0 / math.factorial(ell) - (-1) ** ell * math.fsum(acc) / (1.0 + z) ** (n_t - 1)


def _check_rate(cfg: LinkConfig) -> None:
    if cfg.z == 0:
        raise DomainError("z = 0: outage is identically zero and the density unbounded")


def contention_density(cfg: LinkConfig, alpha: float, epsilon: float, rel_tol: float = 1e-10) -> float:
    """Largest density whose outage does not exceed ``epsilon``."""
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    _check_rate(cfg)
    curve = _curve(cfg, alpha)
    floor = curve(0.0)
    if epsilon <= floor:
        raise InfeasibleEpsilonError(epsilon, floor)
    hi = 1.0
    for _ in range(60):
        if curve(hi) >= epsilon:
            break
        hi *= 2.0
    return find_root_increasing(curve, epsilon, 0.0, hi, rel_tol=rel_tol)


def transmission_capacity_asymptotic(cfg: LinkConfig, alpha: float, epsilon: float) -> float:
    """Small-outage capacity ``n_t R eps^(1/ell) / (Theta omega^(1/ell))``.

    Evaluated in the interference-limited regime regardless of ``cfg.gamma``.
    """
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    _check_rate(cfg)
    ell = max_cancelable(cfg.n_r, cfg.n_t)
    om = omega(cfg, alpha)
    if not om > 0:
        raise ConsistencyError(f"omega={om!r} must be positive")
    return cfg.n_t * cfg.rate * (epsilon / om) ** (1.0 / ell) / theta(cfg, alpha)


def transmission_capacity_exact(cfg: LinkConfig, alpha: float, epsilon: float) -> CapacityResult:
    lam = contention_density(cfg, alpha, epsilon)
    return CapacityResult(
        epsilon=epsilon,
        contention_density=lam,
        exact_capacity=cfg.n_t * lam * (1.0 - epsilon) * cfg.rate,
        asymptotic_capacity=transmission_capacity_asymptotic(cfg, alpha, epsilon),
        ell=max_cancelable(cfg.n_r, cfg.n_t),
        omega=omega(cfg, alpha),
    )
