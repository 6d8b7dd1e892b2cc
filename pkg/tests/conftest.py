import math

import numpy as np
from scipy import integrate, stats


def exact_fwer(n, alpha, rho):
    """Bonferroni FWER under equicorrelation by conditioning on the common factor."""
    x = stats.norm.isf(alpha / n)
    if rho == 0:
        return -math.expm1(n * stats.norm.logcdf(x))
    if rho == 1:
        return alpha / n
    a, b = math.sqrt(rho), math.sqrt(1 - rho)

    def miss(z):
        return stats.norm.pdf(z) * np.exp(n * stats.norm.logcdf((x - a * z) / b))

    # the integrand drops from phi(z) to 0 around z = x/a over a width of order b/a;
    # integrate that window separately so quad cannot step over it when b is tiny
    mid, half = x / a, 10 * b / a
    edges = sorted({-12.0, min(max(mid - half, -12.0), 12.0), min(max(mid + half, -12.0), 12.0), 12.0})
    pieces = (integrate.quad(miss, lo, hi, epsabs=1e-15, limit=500)[0] for lo, hi in zip(edges, edges[1:]))
    return 1 - sum(pieces)
