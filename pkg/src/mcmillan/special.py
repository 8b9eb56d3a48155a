"""Scalar special functions: log-gamma, regularized lower incomplete gamma, erf.

The incomplete gamma follows the usual regime split: power series below
``x = s + 1`` and a modified-Lentz continued fraction for the upper tail
above it.  ``erf`` is evaluated through ``erf(x) = P(1/2, x**2)``.
"""

import math

__all__ = [
    "ConvergenceError",
    "log_gamma",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
    "erf",
]

TOL = 1e-15
MAX_ITER = 500
_TINY = 1e-300

# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
_LANCZOS_G = 607 / 128
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


class ConvergenceError(ArithmeticError):
    """An iterative evaluation hit its iteration cap."""


def log_gamma(s):
    """``log Gamma(s)`` for real ``s > 0``."""
    s = float(s)
    if not s > 0:
        raise ValueError(f"log_gamma domain error: s={s} must be positive")
    if s == 1.0 or s == 2.0:
        return 0.0
    if s < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.log(math.pi / math.sin(math.pi * s)) - log_gamma(1.0 - s)
    z = s - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _iteration_cap(s):
    # the series and the continued fraction both need O(sqrt(s)) terms near x ~ s
    return MAX_ITER + int(20 * math.sqrt(s))


def _stirling_correction(s):
    """``log Gamma(s) - [(s - 1/2) log s - s + log(2 pi)/2]`` for ``s >= 10``."""
    r = 1.0 / s
    r2 = r * r
    return r * (1 / 12 - r2 * (1 / 360 - r2 * (1 / 1260 - r2 * (1 / 1680 - r2 / 1188))))


def _prefactor(s, x):
    """``x**s * exp(-x) / Gamma(s)``."""
    if s < 10.0:
        return math.exp(s * math.log(x) - x - log_gamma(s))
    # written around x = s so large s does not cancel catastrophically
    t = (x - s) / s
    # log(x/s), split so a tiny x cannot round t to -1
    log_ratio = math.log1p(t) if t > -0.5 else math.log(x) - math.log(s)
    return math.exp(
        s * (log_ratio - t)
        + 0.5 * math.log(s / (2 * math.pi))
        - _stirling_correction(s)
    )


def _lower_series(s, x):
    cap = _iteration_cap(s)
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(cap):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * TOL:
            return total * _prefactor(s, x)
    raise ConvergenceError(f"incomplete gamma series did not converge (s={s}, x={x})")


def _upper_fraction(s, x):
    cap = _iteration_cap(s)
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, cap + 1):
        an = -i * (i - s)
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
        if abs(delta - 1.0) < TOL:
            return h * _prefactor(s, x)
    raise ConvergenceError(
        f"incomplete gamma continued fraction did not converge (s={s}, x={x})"
    )


def _check_args(s, x):
    s = float(s)
    x = float(x)
    if not s > 0:
        raise ValueError(f"incomplete gamma domain error: s={s} must be positive")
    if not x >= 0:
        raise ValueError(f"incomplete gamma domain error: x={x} must be nonnegative")
    return s, x


def regularized_lower_gamma(s, x):
    """``P(s, x) = gamma(s, x) / Gamma(s)``."""
    s, x = _check_args(s, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return min(1.0, _lower_series(s, x))
    return max(0.0, 1.0 - _upper_fraction(s, x))


def regularized_upper_gamma(s, x):
    """``Q(s, x) = 1 - P(s, x)``, accurate in the upper tail."""
    s, x = _check_args(s, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return max(0.0, 1.0 - _lower_series(s, x))
    return min(1.0, _upper_fraction(s, x))


def erf(x):
    x = float(x)
    if math.isnan(x):
        raise ValueError("erf of NaN")
    if x == 0.0:
        return 0.0
    value = regularized_lower_gamma(0.5, x * x)
    return value if x > 0 else -value
