"""Normal distribution functions and the diagonal bivariate normal CDF.

The diagonal bivariate CDF is evaluated through the one-dimensional integral

    P(X <= x, Y <= x) = Phi(x)^2 + (1 / 2 pi) * I(x, rho),
    I(x, rho) = int_0^rho (1 - z^2)^(-1/2) exp(-x^2 / (1 + z)) dz,

and is checked against an independent conditioning-identity oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ApplicabilityError, DomainError
from .quadrature import QuadratureResult, adaptive_gk

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

MONHOR_TOL = 1e-13
ORACLE_TOL = 1e-10

# Acklam's rational approximation to the normal quantile (relative error ~1.2e-9).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
P_LOW = 0.02425
NEWTON_STEPS = 2


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / SQRT2PI


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    x = _check_finite("x", x)
    return 0.5 * math.erfc(-x / SQRT2)


def std_normal_sf(x: float) -> float:
    """Upper tail ``1 - Phi(x)`` without cancellation."""
    x = _check_finite("x", x)
    return 0.5 * math.erfc(x / SQRT2)


def _quantile_guess(p: float) -> float:
    # p in (0, 0.5]
    if p < P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def _lower_quantile(p: float) -> float:
    y = _quantile_guess(p)
    for _ in range(NEWTON_STEPS):
        y = y - (0.5 * math.erfc(-y / SQRT2) - p) / (math.exp(-0.5 * y * y) / SQRT2PI)
    return y


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF.

    A rational initial guess refined by two Newton steps against
    :func:`std_normal_cdf`. Upper-half probabilities are reflected through
    ``1 - p`` (exact in binary floating point for ``p >= 0.5``) so both tails
    keep full relative accuracy.
    """
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    if p > 0.5:
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def _check_rho(rho: float, *, allow_one: bool) -> float:
    rho = _check_finite("rho", rho)
    if rho < 0.0:
        raise DomainError(f"rho must be nonnegative, got {rho}")
    if rho > 1.0 or (rho == 1.0 and not allow_one):
        bound = "[0, 1]" if allow_one else "[0, 1)"
        raise DomainError(f"rho must lie in {bound}, got {rho}")
    return rho


def _check_positive_x(x: float) -> float:
    x = _check_finite("x", x)
    if x <= 0.0:
        raise DomainError(f"x must be positive, got {x}")
    return x


def monhor_integral(x: float, rho: float, abs_tol: float = MONHOR_TOL) -> QuadratureResult:
    """``int_0^rho (1 - z^2)^(-1/2) exp(-x^2 / (1 + z)) dz``.

    Integrated in the angle ``z = sin(t)``, which removes the square-root
    factor and leaves ``int_0^asin(rho) exp(-x^2 / (1 + sin t)) dt``.
    """
    x = _check_positive_x(x)
    rho = _check_rho(rho, allow_one=False)
    if rho == 0.0:
        return QuadratureResult(0.0, 0.0, 0)
    x2 = x * x
    return adaptive_gk(lambda t: np.exp(-x2 / (1.0 + np.sin(t))), 0.0, math.asin(rho), abs_tol)


def bvn_cdf_equal(x: float, rho: float) -> float:
    """``P(X <= x, Y <= x)`` for a standard bivariate normal with correlation ``rho``."""
    integral = monhor_integral(x, rho).value
    return std_normal_cdf(x) ** 2 + integral / (2.0 * math.pi)


def bvn_cdf_oracle(x: float, rho: float) -> float:
    """Reference value of ``P(X <= x, Y <= x)`` by conditioning on ``X``.

    Integrates ``phi(u) * Phi((x - rho u) / sqrt(1 - rho^2))`` over
    ``(-8, x]`` with QUADPACK and scipy's own normal CDF, so it shares no code
    path with :func:`bvn_cdf_equal`.
    """
    from scipy import integrate, special

    x = _check_positive_x(x)
    rho = _check_rho(rho, allow_one=False)
    scale = math.sqrt(1.0 - rho * rho)

    def integrand(u: float) -> float:
        return math.exp(-0.5 * u * u) / SQRT2PI * special.ndtr((x - rho * u) / scale)

    value, _ = integrate.quad(integrand, -8.0, x, epsabs=ORACLE_TOL, epsrel=0.0, limit=500)
    return float(value)


def bvn_lower_bound_thm32(x: float, rho: float) -> float:
    """``Phi(x)^2 + asin(rho) exp(-x^2 / (1 + rho/2)) / 2 pi``, valid for ``x >= 2``."""
    x = _check_finite("x", x)
    if x < 2.0:
        raise ApplicabilityError(f"lower bound requires x >= 2, got {x}")
    rho = _check_rho(rho, allow_one=True)
    return std_normal_cdf(x) ** 2 + math.asin(rho) * math.exp(-x * x / (1.0 + 0.5 * rho)) / (2.0 * math.pi)


def bvn_lower_bound_monhor(x: float, rho: float) -> float:
    """Older bound ``Phi(x)^2 + asin(rho) exp(-x^2) / 2 pi`` for any ``x > 0``."""
    x = _check_positive_x(x)
    rho = _check_rho(rho, allow_one=True)
    return std_normal_cdf(x) ** 2 + math.asin(rho) * math.exp(-x * x) / (2.0 * math.pi)


def threshold_Mc(x: float, c: float) -> float:
    """``exp(-x^2 / (1 + c/2)) / (1 - Phi(x))``; the table thresholds."""
    return math.exp(-x * x / (1.0 + 0.5 * c)) / std_normal_sf(x)


def threshold_M(x: float) -> float:
    x = _check_finite("x", x)
    if not (2.0 <= x <= 5.0):
        raise DomainError(f"threshold_M is defined on [2, 5], got {x}")
    return threshold_Mc(x, 0.5)


def threshold_G(x: float) -> float:
    x = _check_positive_x(x)
    return 0.5 * (math.exp(-x * x) + math.exp(-x * x / 1.25))


def threshold_H(x: float) -> float:
    x = _check_positive_x(x)
    return 0.5 * (math.exp(-x * x) + math.exp(-x * x / 1.011375))
