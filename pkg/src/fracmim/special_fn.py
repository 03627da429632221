"""Gamma and regularized lower incomplete gamma functions."""

import math

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def gamma(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"gamma requires a finite positive argument, got {x!r}")
    return math.gamma(x)


def _series_p(a: float, x: float) -> float:
    # P(a, x) = x^a e^{-x} / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma series did not converge for a={a}, x={x}")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _continued_fraction_q(a: float, x: float) -> float:
    # modified Lentz evaluation of the Legendre continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma fraction did not converge for a={a}, x={x}")
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def lower_incomplete_gamma_regularized(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Uses the power series below ``x = a + 1`` and the complement of the
    continued fraction for Q(a, x) above it.
    """
    if not a > 0 or not math.isfinite(a):
        raise ValueError(f"P(a, x) requires a > 0, got a={a!r}")
    if not x >= 0 or math.isnan(x):
        raise ValueError(f"P(a, x) requires x >= 0, got x={x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(_series_p(a, x), 1.0)
    return max(1.0 - _continued_fraction_q(a, x), 0.0)


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Unregularized gamma(a, x) = P(a, x) * Gamma(a)."""
    return lower_incomplete_gamma_regularized(a, x) * gamma(a)
