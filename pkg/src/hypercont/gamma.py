"""Real-argument gamma-family kernels in binary64.

``ln_gamma`` is backed by :func:`math.lgamma`; the digamma function is
evaluated by upward recurrence followed by the Stirling-type asymptotic
series, with reflection for negative arguments.
"""

import math

from .errors import PoleError

POLE_TOL = 1e-12

# Bernoulli numbers B_2k / (2k) for the digamma asymptotic series.
_PSI_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_EXACT_SPAN = 64


def is_pole(x, tol=POLE_TOL):
    """True if ``x`` lies within ``tol`` of a nonpositive integer."""
    if x > 0.5:
        return False
    return abs(x - round(x)) < tol


def _check_pole(x, name):
    if is_pole(x):
        raise PoleError(f"{name}({x!r}): argument is a nonpositive integer")


def ln_gamma(x):
    """log|Gamma(x)|; see :func:`gamma_sign` for the sign."""
    _check_pole(x, "ln_gamma")
    return math.lgamma(x)


def gamma_sign(x):
    """Sign of Gamma(x) (+1 or -1)."""
    _check_pole(x, "gamma_sign")
    if x > 0:
        return 1
    # Gamma alternates sign between consecutive poles on the negative axis.
    return -1 if math.floor(x) % 2 else 1


def gamma(x):
    """Gamma(x); +inf past the binary64 range (x > 171.62...)."""
    _check_pole(x, "gamma")
    if x < 171.0:
        return math.gamma(x)
    lg = math.lgamma(x)
    return math.exp(lg) if lg < 709.78 else math.inf


def digamma(x):
    _check_pole(x, "digamma")
    if x < 0.0:
        # psi(1 - x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_PSI_ASYMPTOTIC):
        series = series * inv2 + c
    return acc + math.log(x) - 0.5 / x - series * inv2


def pochhammer(lam, n):
    """Rising factorial (lam)_n for integer n >= 0."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    # Exact test: a near-integer lam gives a tiny but nonzero product.
    if lam <= 0 and lam == round(lam) and n > -lam:
        return 0.0
    if n <= 4096:
        out = 1.0
        for i in range(n):
            out *= lam + i
            if math.isinf(out):
                break
        else:
            return out
    return gamma_ratio(lam + n, lam)


def _signed_exp(sign, log_mag):
    if log_mag > 709.78:
        return sign * math.inf
    return sign * math.exp(log_mag)


def gamma_ratio(x, y):
    """Gamma(x) / Gamma(y); zero when x is a pole."""
    _check_pole(y, "gamma_ratio")
    if is_pole(x):
        return 0.0
    d = x - y
    n = round(d)
    if d == n and abs(n) <= _EXACT_SPAN:
        if n >= 0:
            return pochhammer(y, n)
        return 1.0 / pochhammer(x, -n)
    sign = gamma_sign(x) * gamma_sign(y)
    return _signed_exp(sign, math.lgamma(x) - math.lgamma(y))


def gamma_fraction(num, den):
    """prod Gamma(num) / prod Gamma(den).

    A pole in the denominator makes the fraction vanish; a pole in the
    numerator raises :class:`PoleError` unless the fraction already vanished.
    """
    if any(is_pole(y) for y in den):
        return 0.0
    for x in num:
        _check_pole(x, "gamma_fraction")
    sign = 1
    log_mag = 0.0
    for x in num:
        sign *= gamma_sign(x)
        log_mag += math.lgamma(x)
    for y in den:
        sign *= gamma_sign(y)
        log_mag -= math.lgamma(y)
    return _signed_exp(sign, log_mag)
