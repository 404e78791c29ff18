"""Numerical kernels shared by the analytic and simulation code."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BracketError, DomainError, NumericalError

__all__ = [
    "BracketError",
    "NumericalError",
    "log_gamma",
    "gamma_ratio",
    "trial_stream",
    "CounterStreams",
    "sample_complex_gaussian",
    "hermitian_solve",
    "cholesky",
    "forward_substitute",
    "poly_mul",
    "find_root_increasing",
]


def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_gamma domain error: x={x!r} must be positive")
    return math.lgamma(x)


def gamma_ratio(num: Sequence[float], den: Sequence[float]) -> float:
    """prod(Gamma(num)) / prod(Gamma(den)), formed in the log domain."""
    return math.exp(math.fsum(log_gamma(a) for a in num) - math.fsum(log_gamma(b) for b in den))


# Random streams


_STREAM_WORD = 2  # counter word that separates substreams of one trial


def trial_stream(seed: int, trial: int, substream: int = 0) -> np.random.Generator:
    """Counter-based generator for ``(seed, trial, substream)``.

    Every trial owns a Philox key; substreams differ in a high counter word,
    so they never overlap in practice and do not depend on how trials are
    scheduled.
    """
    if seed < 0 or trial < 0 or substream < 0:
        raise ValueError("seed, trial and substream must be non-negative")
    counter = [0, 0, 0, 0]
    counter[_STREAM_WORD] = substream
    return np.random.Generator(np.random.Philox(key=[seed, trial], counter=counter))


class CounterStreams:
    """Re-keys a single Philox generator in place.

    ``at(seed, trial, substream)`` yields the same stream as
    :func:`trial_stream` but avoids constructing a generator per trial.  The
    returned generator is shared: finish with it before calling ``at`` again.
    """

    def __init__(self) -> None:
        self._bits = np.random.Philox(key=[0, 0])
        self._gen = np.random.Generator(self._bits)
        self._buffer = np.zeros(4, dtype=np.uint64)

    def at(self, seed: int, trial: int, substream: int = 0) -> np.random.Generator:
        counter = np.zeros(4, dtype=np.uint64)
        counter[_STREAM_WORD] = substream
        self._bits.state = {
            "bit_generator": "Philox",
            "state": {"counter": counter, "key": np.array([seed, trial], dtype=np.uint64)},
            "buffer": self._buffer,
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen


def sample_complex_gaussian(rng: np.random.Generator, n: int | tuple[int, ...]) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussians, CN(0, 1).

    Real and imaginary parts are interleaved in the draw order, so the first
    ``m`` values of a larger request match a request for ``m`` values.
    """
    shape = (n,) if isinstance(n, int) else tuple(n)
    raw = rng.standard_normal(shape + (2,))
    out = raw[..., 0] + 1j * raw[..., 1]
    out *= math.sqrt(0.5)
    return out


# Hermitian positive-definite solves


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, batched over leading axes."""
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"matrix is not positive definite: {exc}") from None


def forward_substitute(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve L y = b for lower-triangular L; batched over leading axes."""
    if lower.ndim == 2 and b.ndim == 1:
        return solve_triangular(lower, b, lower=True, check_finite=False)
    n = lower.shape[-1]
    y = np.empty(np.broadcast_shapes(lower.shape[:-1], b.shape), dtype=np.result_type(lower, b))
    for i in range(n):
        acc = b[..., i] - np.einsum("...j,...j->...", lower[..., i, :i], y[..., :i])
        y[..., i] = acc / lower[..., i, i]
    return y


def _back_substitute_h(lower: np.ndarray, y: np.ndarray) -> np.ndarray:
    # solves L^H x = y
    n = lower.shape[-1]
    x = np.empty_like(y)
    for i in range(n - 1, -1, -1):
        acc = y[..., i] - np.einsum("...j,...j->...", lower[..., i + 1 :, i].conj(), x[..., i + 1 :])
        x[..., i] = acc / lower[..., i, i].conj()
    return x


def hermitian_solve(a: np.ndarray, b: np.ndarray, *, hermitian_tol: float = 1e-10) -> np.ndarray:
    """Solve ``A x = b`` for Hermitian positive-definite ``A`` via Cholesky.

    Raises :class:`NumericalError` if the factorization hits a non-positive
    pivot.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-1] != a.shape[-2] or b.shape[-1] != a.shape[-1]:
        raise ValueError(f"shape mismatch: A{a.shape}, b{b.shape}")
    asym = np.max(np.abs(a - np.swapaxes(a, -1, -2).conj()), initial=0.0)
    if asym > hermitian_tol:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
    lower = cholesky(a)
    return _back_substitute_h(lower, forward_substitute(lower, b))


# Polynomials (coefficient lists, index = power)


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:1] * 0


def poly_mul(a: Sequence[float], b: Sequence[float], max_degree: int | None = None) -> np.ndarray:
    """Product of two real polynomials, optionally truncated at ``max_degree``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        return np.zeros(1)
    out = np.convolve(a, b)
    if max_degree is not None:
        out = out[: max_degree + 1]
    return _trim(out)


# Root finding


def find_root_increasing(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    rel_tol: float = 1e-10,
    abs_guard: float = 1e-300,
    max_iter: int = 2000,
) -> float:
    """Bisection for ``f(x) = target`` with ``f`` nondecreasing on ``[lo, hi]``.

    Stops once the bracket is narrower than ``rel_tol * max(|x|, abs_guard)``.
    """
    f_lo, f_hi = f(lo), f(hi)
    if not f_lo <= target <= f_hi:
        raise BracketError(target, f_lo, f_hi, lo, hi)
    if f_lo == target:
        return lo
    if f_hi == target:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rel_tol * max(abs(mid), abs_guard) or mid in (lo, hi):
            return mid
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
