"""Parameter bookkeeping, direct evaluation of pFq-type power series, and the
Gauss hypergeometric toolkit (continuation, Gauss and Saalschuetz sums).
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import gamma as gm
from .dd import DD, dd_fsum
from .dd import terminating as dd_terminating
from .errors import (
    DomainError,
    IntegerExponent,
    NoConvergence,
    SingularDenominator,
)
from .summation import sum_with_tail, term_block

DEFAULT_TOL = 1e-12
DEFAULT_MAX_TERMS = 10000
INTEGER_TOL = 1e-8
P_MAX = 6

METHODS = ("direct", "continuation", "zero_balanced", "closed_form")


@dataclass(frozen=True)
class ParameterSet:
    """Numerator parameters ``a`` (p+1 of them) and denominators ``b`` (p)."""

    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if len(self.a) != len(self.b) + 1:
            raise DomainError(
                f"need p+1 numerator parameters for p={len(self.b)} denominators, "
                f"got {len(self.a)}"
            )
        if not 1 <= len(self.b) <= P_MAX:
            raise DomainError(f"p={len(self.b)} outside supported range 1..{P_MAX}")
        for j, bj in enumerate(self.b):
            if not math.isfinite(bj) or gm.is_pole(bj):
                raise DomainError(f"b_{j + 1}={bj!r} is a nonpositive integer")
        if not all(math.isfinite(x) for x in self.a):
            raise DomainError("numerator parameters must be finite")

    @property
    def p(self):
        return len(self.b)

    @property
    def s(self):
        return math.fsum(self.b + tuple(-x for x in self.a))

    def prefactor(self):
        """prod Gamma(a_j) / prod Gamma(b_j)."""
        return gm.gamma_fraction(self.a, self.b)

    def terminating_degree(self):
        """Degree of the polynomial if some a_j is a nonpositive integer."""
        degs = [-round(x) for x in self.a if gm.is_pole(x)]
        return min(degs) if degs else None

    def reduced(self):
        """Drop numerator/denominator pairs that are exactly equal."""
        a, b = list(self.a), list(self.b)
        for bj in list(b):
            if bj in a:
                a.remove(bj)
                b.remove(bj)
        return a, b


@dataclass(frozen=True)
class BalanceInfo:
    s: float
    is_integer: bool
    integer_value: int = None


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_err_estimate: float
    terms_used: int
    method: str


def balance(params):
    s = params.s
    near = round(s)
    if abs(s - near) < INTEGER_TOL:
        return BalanceInfo(s, True, int(near))
    return BalanceInfo(s, False)


def _geometric_sum(num, den, z, tol, max_terms, chunk=256):
    """Sum a convergent (|z| < 1) or terminating series term by term.

    Stops once the geometric tail bound of three consecutive terms falls
    below ``tol * |partial sum|``.
    """
    blocks = []
    first, start = 1.0, 0
    absz = abs(z)
    running = 0.0
    quiet = 0
    while start < max_terms:
        count = min(chunk, max_terms - start)
        t = term_block(num, den, z, first, start, count + 1)
        nxt = t[-1]
        t = t[:-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(np.append(t[1:], nxt) / t)
        r = np.maximum(np.nan_to_num(ratio, nan=0.0, posinf=np.inf), absz)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            bound = np.where(r < 1.0, np.abs(t) * r / (1.0 - r), np.inf)
        bound = np.where(t == 0.0, 0.0, bound)
        partial = running + np.cumsum(t)
        ok = bound <= tol * np.abs(partial)
        for i in range(count):
            quiet = quiet + 1 if ok[i] else 0
            if quiet == 3:
                blocks.append(t[: i + 1])
                terms = np.concatenate(blocks)
                value = math.fsum(terms)
                # each term carries a few ulps from the running product, which
                # matters once alternating terms cancel
                rounding = np.finfo(float).eps * float(np.sum(np.abs(terms)))
                return value, float(bound[i]) + rounding, start + i + 1
        blocks.append(t)
        running = partial[-1]
        first, start = nxt, start + count
        if not math.isfinite(first):
            break
    raise NoConvergence(f"series not converged after {max_terms} terms")


def _unit_sum(num, den, z, s, tol, max_terms):
    """Sum a series at |z| = 1 whose terms decay like k^(-1-s), s > 0."""
    scale = max([abs(x) for x in num + den] + [1.0])
    n = max(512, int(64 * scale))
    best = None
    while True:
        if n > max_terms:
            if best is not None and best[1] <= max(tol, 1e-9) * abs(best[0]):
                return best
            raise NoConvergence(f"unit-argument series not converged within {max_terms} terms")
        t = term_block(num, den, z, 1.0, 0, n)
        if z > 0:
            value, err = sum_with_tail(t, [s])
        else:
            pairs = t[0::2] + t[1::2]
            value, err = sum_with_tail(pairs, [s + 1.0])
        err += 4 * np.finfo(float).eps * math.log2(n) * float(np.sum(np.abs(t)))
        best = (value, err, n)
        if err <= tol * abs(value):
            return best
        n *= 2


def eval_direct(params, z, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """Sum the defining power series of p+1Fp at real ``z``."""
    z = float(z)
    if z == 0.0:
        return EvalResult(1.0, 0.0, 1, "direct")
    a, b = params.reduced()
    deg = params.terminating_degree()
    if abs(z) < 1.0 or deg is not None:
        if deg is not None:
            max_terms = max(max_terms, deg + 4)
        value, err, used = _geometric_sum(a, b, z, tol, max_terms)
        return EvalResult(value, err, used, "direct")
    if abs(z) == 1.0:
        s = params.s
        if s <= 0.0:
            raise DomainError(f"series diverges at z={z} for s={s}")
        value, err, used = _unit_sum(a, b, z, s, tol, max_terms)
        return EvalResult(value, err, used, "direct")
    raise DomainError(f"|z|={abs(z)} > 1 outside the disc of convergence")


def terminating_sum(num, den, z=1.0):
    """Literal term-by-term sum of a terminating hypergeometric series.

    Terms are accumulated in double-double arithmetic, so the heavy
    cancellation typical of these sums costs no accuracy."""
    degs = [-round(x) for x in num if gm.is_pole(x)]
    if not degs:
        raise DomainError("series does not terminate")
    if z != 1.0:
        return float(_dd_terminating_z(num, den, z, min(degs)))
    return float(dd_terminating(num, den, min(degs)))


def _dd_terminating_z(num, den, z, length):
    term = DD(1.0)
    total = DD(1.0)
    for k in range(length):
        nmr = DD(z)
        for x in num:
            nmr = nmr * (x + k)
        d = DD(k + 1.0)
        for y in den:
            if abs(y + k) < gm.POLE_TOL:
                raise SingularDenominator(f"denominator factor vanishes at index {k}")
            d = d * (y + k)
        term = term * nmr / d
        total = total + term
    return total


def gauss_sum(a1, a2, b1):
    """Value of 2F1(a1, a2; b1; 1) for s1 = b1 - a1 - a2 > 0."""
    s1 = b1 - a1 - a2
    if not s1 > 0.0:
        raise DomainError(f"Gauss sum needs b1-a1-a2 > 0, got {s1}")
    return gm.gamma_fraction([b1, s1], [a1 + s1, a2 + s1])


def saalschutz_sum(a1, a2, b1, m):
    """3F2(a1, a2, -m; b1, 1-s1-m; 1) in closed form."""
    s1 = math.fsum([b1, -a1, -a2])
    if gm.is_pole(s1):
        raise DomainError(f"s1={s1} is zero or a negative integer")
    num = gm.pochhammer(b1 - a2, m) * gm.pochhammer(b1 - a1, m)
    return num / (gm.pochhammer(s1, m) * gm.pochhammer(b1, m))


def saalschutz_brute(a1, a2, b1, m):
    """The same terminating series summed term by term."""
    c = dd_fsum([1.0, -b1, a1, a2, -float(m)])
    return float(dd_terminating([a1, a2, -float(m)], [b1, c], m))


def _check_continuation_z(z):
    if not 0.0 < z < 1.0:
        raise DomainError(f"continuation near z=1 needs 0 < z < 1, got {z}")


def continue_2f1(a1, a2, b1, z, tol=DEFAULT_TOL):
    """2F1(a1, a2; b1; z) from its two local solutions at z = 1."""
    s1 = b1 - a1 - a2
    if abs(s1 - round(s1)) < INTEGER_TOL:
        raise IntegerExponent(f"s1={s1} is an integer")
    _check_continuation_z(z)
    w = 1.0 - z
    c0 = gm.gamma_fraction([b1, s1], [b1 - a1, b1 - a2])
    cs = gm.gamma_fraction([b1, -s1], [a1, a2])
    value, err, used = 0.0, 0.0, 0
    parts = []
    if c0 != 0.0:
        r = eval_direct(ParameterSet((a1, a2), (1.0 - s1,)), w, tol)
        parts.append(c0 * r.value)
        err += abs(c0) * r.abs_err_estimate
        used += r.terms_used
    if cs != 0.0:
        r = eval_direct(ParameterSet((b1 - a1, b1 - a2), (1.0 + s1,)), w, tol)
        ws = w**s1
        parts.append(cs * ws * r.value)
        err += abs(cs) * ws * r.abs_err_estimate
        used += r.terms_used
    value = math.fsum(parts)
    return EvalResult(value, err, used, "continuation")


def zero_balanced_2f1(a1, a2, z):
    """Leading behaviour of 2F1(a1, a2; a1+a2; z) as z -> 1 (error o(1))."""
    if not 0.0 < z < 1.0:
        raise DomainError(f"need 0 < z < 1, got {z}")
    lead = 2 * gm.digamma(1.0) - gm.digamma(a1) - gm.digamma(a2) - math.log1p(-z)
    return lead * gm.gamma_fraction([a1 + a2], [a1, a2])
