"""Independent reference computations used by the tests.

The outage oracle integrates the Laplace functional of the interference
directly by quadrature, so it shares nothing with the partition expansion.
"""

import math

import numpy as np
from scipy.integrate import quad


def _radial(f, k, alpha):
    # int_0^inf 2 pi rho f(s) d rho with s = k rho^-alpha, via rho = e^u;
    # the integrand decays like e^{2u} and e^{(2-alpha)u}, so cut at +-60 e-folds
    u0 = math.log(k) / alpha

    def g(u):
        # f takes log s so that both tails stay finite
        return 2 * math.pi * math.exp(2 * u) * f(math.log(k) - alpha * u)

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=400)
    return quad(g, u0 - 30.0, u0, **opts)[0] + quad(g, u0, u0 + 60.0 / (alpha - 2), **opts)[0]


def interference_coefficients(n_t, alpha, z, d0=1.0):
    """c_0 .. c_{n_t}: exp(-lambda * sum c_m t^m) is the interference factor."""
    k = z * d0**alpha
    c = [_radial(lambda ls: -math.expm1(-n_t * np.logaddexp(0.0, ls)), k, alpha)]
    for m in range(1, n_t + 1):
        c.append(-math.comb(n_t, m) * _radial(lambda ls, m=m: math.exp(m * ls - n_t * np.logaddexp(0.0, ls)), k, alpha))
    return c


def exp_series(b, n):
    """First n coefficients of exp(sum_{m>=1} b[m] t^m)."""
    e = [1.0] + [0.0] * (n - 1)
    for i in range(1, n):
        e[i] = math.fsum(k * b[k] * e[i - k] for k in range(1, min(i, len(b) - 1) + 1)) / i
    return e


def _generating(n_t, alpha, z, density, d0, terms):
    c = interference_coefficients(n_t, alpha, z, d0)
    e = exp_series([0.0] + [-density * x for x in c[1:]], terms)
    g = np.convolve(e, [math.comb(n_t - 1, q) * z**q for q in range(n_t)])[:terms]
    return math.exp(-density * c[0]) * g


def outage_quadrature(n_t, n_r, z, gamma, alpha, density, d0=1.0):
    s = 0.0 if math.isinf(gamma) else z * d0**alpha / gamma
    g = _generating(n_t, alpha, z, density, d0, n_r)
    a = [math.fsum(s**u / math.factorial(u) for u in range(n_r - p)) for p in range(n_r)]
    success = math.exp(-s) * math.fsum(a[p] * g[p] for p in range(n_r)) / (1 + z) ** (n_t - 1)
    return 1.0 - success


def outage_tail(n_t, n_r, z, alpha, density, d0=1.0, extra=80):
    """Interference-limited outage summed from the tail, free of cancellation."""
    g = _generating(n_t, alpha, z, density, d0, n_r + extra)
    return math.fsum(g[n_r:]) / (1 + z) ** (n_t - 1)
