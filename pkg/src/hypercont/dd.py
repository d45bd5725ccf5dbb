"""Double-double arithmetic on top of binary64.

A value is an unevaluated sum ``hi + lo`` with ``|lo| <= ulp(hi)/2``, giving
about 32 significant digits.  Everything is built from the error-free
transformations TwoSum and TwoProd (Veltkamp splitting), so only binary64
operations are involved.  Used for literal finite sums whose terms cancel
heavily.
"""

import math

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=0.0):
        self.hi = float(hi)
        self.lo = float(lo)

    def __float__(self):
        return self.hi + self.lo

    def __repr__(self):
        return f"DD({self.hi!r}, {self.lo!r})"

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __abs__(self):
        return -self if self.hi < 0 or (self.hi == 0 and self.lo < 0) else self

    def __add__(self, other):
        o = _coerce(other)
        s, e = two_sum(self.hi, o.hi)
        t, f = two_sum(self.lo, o.lo)
        e += t
        s, e = _fast_two_sum(s, e)
        e += f
        return DD(*_fast_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        p, e = two_prod(self.hi, o.hi)
        e += self.hi * o.lo + self.lo * o.hi
        return DD(*_fast_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.hi == 0.0:
            raise ZeroDivisionError("double-double division by zero")
        q1 = self.hi / o.hi
        r = self - o * q1
        q2 = r.hi / o.hi
        r = r - o * q2
        q3 = r.hi / o.hi
        q1, q2 = _fast_two_sum(q1, q2)
        return DD(q1, q2) + q3

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def is_zero(self):
        return self.hi == 0.0


def _coerce(x):
    return x if isinstance(x, DD) else DD(x)


def dd(x):
    return _coerce(x)


def dd_sum(values):
    """Exact-to-double-double sum of floats or DD values."""
    acc = DD(0.0)
    for v in values:
        acc = acc + v
    return acc


def dd_fsum(values):
    """Double-double sum of binary64 numbers (e.g. parameter combinations)."""
    hi = math.fsum(values)
    lo = math.fsum(list(values) + [-hi])
    return DD(hi, lo)


# Hypergeometric building blocks -------------------------------------------

_ZERO_TOL = 1e-12


def poch(x, n):
    """(x)_n in double-double."""
    v = DD(1.0)
    x = _coerce(x)
    for i in range(n):
        v = v * (x + i)
    return v


def poch_ratio(num, den, n):
    """prod (num)_n / (prod (den)_n n!) in double-double.

    Raises :class:`SingularDenominator` if a denominator factor vanishes."""
    from .errors import SingularDenominator

    v = DD(1.0)
    for x in num:
        v = v * poch(x, n)
    for y in den:
        d = poch(y, n)
        if abs(float(d)) < _ZERO_TOL:
            raise SingularDenominator(f"({float(y)!r})_{n} vanishes")
        v = v / d
    return v / math.factorial(n) if n <= 22 else v / float(math.factorial(n))


def poch_ratio_seq(num, den, n):
    """[poch_ratio(num, den, t) for t in 0..n] by the running term ratio."""
    from .errors import SingularDenominator

    num = [_coerce(x) for x in num]
    den = [_coerce(y) for y in den]
    out = [DD(1.0)]
    for t in range(n):
        nmr = DD(1.0)
        for x in num:
            nmr = nmr * (x + t)
        d = DD(t + 1.0)
        for y in den:
            f = y + t
            if abs(float(f)) < _ZERO_TOL:
                raise SingularDenominator(f"({float(y)!r})_{t + 1} vanishes")
            d = d * f
        out.append(out[-1] * nmr / d)
    return out


DD_EPS = 2.0**-104


def terminating(num, den, length=None, with_abs=False):
    """sum_{t=0}^{length} prod (num)_t / (prod (den)_t t!), double-double.

    Without ``length`` the sum stops at the first nonpositive-integer
    numerator.  Terms come from the running ratio, so the cost is linear.
    ``with_abs=True`` also returns sum |term| (binary64) for a condition
    estimate."""
    from .errors import DomainError, SingularDenominator

    num = [_coerce(x) for x in num]
    den = [_coerce(y) for y in den]
    if length is None:
        cands = [-round(float(x)) for x in num
                 if float(x) <= 0.5 and abs(float(x) - round(float(x))) < _ZERO_TOL]
        if not cands:
            raise DomainError("series does not terminate")
        length = min(cands)
    term = DD(1.0)
    total = DD(1.0)
    mag = 1.0
    for t in range(length):
        nmr = DD(1.0)
        for x in num:
            nmr = nmr * (x + t)
        d = DD(t + 1.0)
        for y in den:
            f = y + t
            if abs(float(f)) < _ZERO_TOL:
                raise SingularDenominator(f"denominator factor vanishes at index {t}")
            d = d * f
        term = term * nmr / d
        total = total + term
        mag += abs(term.hi)
    if with_abs:
        return total, mag
    return total
