"""Connection coefficients of p+1Fp at z = 1.

The coefficients ``A_k`` reduce the p-parameter problem to a weighted sum of
Gauss functions.  They grow like ``(k-1)!``, so tables store the normalized
values ``A_k / k!`` and every consumer folds the ``k!`` into its own weights.

``g_n(0)`` needs an infinite series whose terms decay only algebraically,
like ``k^(-1-a_j-n)`` for j >= 3.  Two devices keep that series cheap and
well conditioned:

* the function is symmetric in the numerator parameters, so the two
  smallest are moved to the ``a1, a2`` slots;
* the contiguous relation ``g_n(a + e_j) = (a_j + n) g_n(a) - (n+1) g_{n+1}(a)``
  trades a slowly convergent series for one with ``a_j`` raised by one.
"""

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gamma as gm
from .dd import DD_EPS, dd_fsum, dd_sum, poch_ratio, poch_ratio_seq, terminating
from .errors import (
    ConvergenceCondition,
    DomainError,
    ExtrapolationUnstable,
    NoConvergence,
    SingularDenominator,
)
from .series import DEFAULT_TOL, INTEGER_TOL, ParameterSet, eval_direct, terminating_sum
from .summation import sum_with_tail

REPRESENTATIONS = ("recurrence", "saalschutz_alt")
R_VALUES = ("zero", "s")
TRANSFORM_KINDS = ("4F3", "5F4", "6F5")

# Raise a_j until every tail exponent a_j + n reaches this.
RAISE_TARGET = 2.5
_K_START = 256
_K_MAX = 2048
_SINGULAR_TOL = 1e-12
_EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# A_k tables


def _levels(a, b):
    """(sigma_i, beta_i, c_i) for the nesting levels i = 1 .. p-1."""
    p = len(b)
    out = []
    for i in range(1, p):
        sigma = math.fsum(b[i:p]) - math.fsum(a[i + 1 : p + 1])
        out.append((sigma, b[i - 1] - a[i + 1], 1.0 + a[i + 1] - b[i - 1]))
    return out


def _weights(x, y, K):
    """(x)_m (y)_m / (m!)^2 for m < K."""
    m = np.arange(K - 1, dtype=float)
    w = np.ones(K)
    if K > 1:
        w[1:] = np.cumprod((x + m) * (y + m) / ((m + 1.0) ** 2))
    return w


def _fsum_rows(mat):
    """Row sums of a lower-triangular matrix, Neumaier-compensated.

    Vectorised down the columns; for these alternating terminating sums it
    matches math.fsum row by row at a fraction of the cost."""
    n, K = mat.shape
    s = np.zeros(n)
    c = np.zeros(n)
    for j in range(min(n, K)):
        x = mat[j:, j]
        sj = s[j:]
        t = sj + x
        c[j:] += np.where(np.abs(sj) >= np.abs(x), (sj - t) + x, (x - t) + sj)
        s[j:] = t
    return s + c


def _terminating_rows(K, ratio_fn):
    """Lower-triangular matrix R[m, t] = prod_{q<t} ratio_fn(m, q) for t <= m."""
    m = np.arange(K, dtype=float)[:, None]
    q = np.arange(K, dtype=float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = ratio_fn(m, q)
    ratio = np.where(q < m, ratio, 0.0)
    R = np.ones((K, K))
    R[:, 1:] = np.cumprod(ratio[:, :-1], axis=1)
    return np.tril(R)


def _check_denominator(values, what):
    if np.any(np.abs(values) < _SINGULAR_TOL):
        raise SingularDenominator(f"{what} vanishes for a needed index")


def _recurrence_table(a, b, K):
    """A_k / k! from the nested finite-sum representation."""
    p = len(b)
    if p == 1:
        out = np.zeros(K)
        out[0] = 1.0
        return out
    levels = _levels(a, b)
    sigma, beta, _ = levels[-1]
    F = _weights(sigma, beta, K)
    m = np.arange(K, dtype=float)
    for sigma, beta, c in reversed(levels[:-1]):
        mm, qq = np.meshgrid(m, m, indexing="ij")
        den = c - mm + qq
        _check_denominator(np.where(qq < mm, den, 1.0), f"(1+a-b-k)_j with c={c}")
        R = _terminating_rows(K, lambda mi, qi: (qi - mi) / (c - mi + qi))
        # t! / (sigma)_t
        v = np.ones(K)
        if K > 1:
            v[1:] = np.cumprod((m[:-1] + 1.0) / (sigma + m[:-1]))
        F = _weights(sigma, beta, K) * _fsum_rows(R * (v * F)[None, :])
    return F


def _sheppard_rows(K, num2, num3, den1, den2):
    """Rows S[n] = 3F2(-n, num2, num3-n; den1-n, den2-n; 1) for n < K."""
    m = np.arange(K, dtype=float)
    mm, qq = np.meshgrid(m, m, indexing="ij")
    lower = qq < mm
    _check_denominator(np.where(lower, (den1 - mm + qq) * (den2 - mm + qq), 1.0),
                       "shifted denominator in the alternate coefficient form")
    R = _terminating_rows(
        K,
        lambda n, t: (t - n) * (num2 + t) * (num3 - n + t)
        / ((den1 - n + t) * (den2 - n + t) * (t + 1.0)),
    )
    # After Sheppard's transformation the terms no longer cancel, so plain
    # pairwise summation is accurate here.
    return R.sum(axis=1)


def _alt_table(a, b, K):
    """A_k / k! from the representation obtained through the Saalschuetzian
    transformations (p = 3, 4).  The inner terminating 3F2 is first passed
    through Sheppard's transformation, which removes the alternating
    cancellation the literal form suffers for large k."""
    p = len(b)
    if p == 3:
        a1, a2, a3, a4 = a
        b1, b2, b3 = b
        w = _weights(b1 - a4, b2 - a4, K)
        S = _sheppard_rows(K, b3 - a3, 1 + a3 + a4 - b1 - b2, 1 + a4 - b1, 1 + a4 - b2)
        return w * S
    if p == 4:
        a1, a2, a3, a4, a5 = a
        b1, b2, b3, b4 = b
        B3 = b3 + b4 - a3 - a5
        g, d1, d2 = 1 + a3 + a4 - b1 - b2, 1 + a4 - b1, 1 + a4 - b2
        wq = _weights(b3 - a5, b4 - a5, K)
        wn = _weights(b1 - a4, b2 - a4, K)
        ln_fact = np.array([math.lgamma(i + 1.0) for i in range(K)])
        # T[q, n] = 3F2(-n, B3+q, g-n; d1-n, d2-n; 1)
        T = np.empty((K, K))
        for q in range(K):
            T[q] = _sheppard_rows(K - q, B3 + q, g, d1, d2).tolist() + [0.0] * q
        out = np.empty(K)
        for k in range(K):
            q = np.arange(k + 1)
            inv_binom = np.exp(ln_fact[q] + ln_fact[k - q] - ln_fact[k])
            out[k] = math.fsum(wq[q] * wn[k - q] * inv_binom * T[q, k - q])
        return out
    raise DomainError(f"alternate representation exists only for p in (3, 4), got p={p}")


class CoefficientTable:
    """Memoized ``A_k`` for one parameter set and representation.

    Entries are stored normalized (``A_k / k!``).  Growth recomputes the
    table at the new length; every entry depends only on its index, so the
    stored prefix never changes.  Growth is guarded by a lock.
    """

    def __init__(self, params, representation="recurrence"):
        if representation not in REPRESENTATIONS:
            raise DomainError(f"unknown representation {representation!r}")
        if representation == "saalschutz_alt" and params.p not in (3, 4):
            raise DomainError("saalschutz_alt representation needs p in (3, 4)")
        self.params = params
        self.representation = representation
        # The p = 4 alternate table costs O(K^3) and its inner sums overflow
        # beyond a few hundred terms.
        self.max_length = 256 if (representation == "saalschutz_alt" and params.p == 4) else None
        self._values = np.ones(1)
        self._lock = threading.Lock()
        self._frozen = False

    def __len__(self):
        return len(self._values)

    def freeze(self):
        self._frozen = True

    def normalized(self, K):
        """First ``K`` values of ``A_k / k!``."""
        if len(self._values) < K:
            with self._lock:
                if len(self._values) < K:
                    if self._frozen:
                        raise DomainError("table is frozen")
                    if self.max_length is not None and K > self.max_length:
                        raise DomainError(f"table limited to {self.max_length} entries")
                    size = max(K, 2 * len(self._values))
                    if self.max_length is not None:
                        size = min(size, self.max_length)
                    build = _recurrence_table if self.representation == "recurrence" else _alt_table
                    self._values = build(self.params.a, self.params.b, size)
        return self._values[:K]

    def __getitem__(self, k):
        v = self.normalized(k + 1)[k]
        return float(v * math.exp(math.lgamma(k + 1.0))) if v else 0.0

    @property
    def values(self):
        return [self[k] for k in range(len(self._values))]


@lru_cache(maxsize=512)
def shared_table(a, b, representation="recurrence"):
    """CoefficientTable for tuples ``a``, ``b``, shared between callers.

    Tables only ever grow and their entries depend on the index alone, so
    one instance per parameter set can serve every expansion built from it.
    """
    return CoefficientTable(ParameterSet(a, b), representation)


# ---------------------------------------------------------------------------
# literal A_k


def _lv(*terms):
    return dd_fsum([float(t) for t in terms])


def _levels_exact(a, b):
    p = len(b)
    return [
        (_lv(*b[i:p], *[-x for x in a[i + 1 : p + 1]]), _lv(b[i - 1], -a[i + 1]),
         _lv(1.0, a[i + 1], -b[i - 1]))
        for i in range(1, p)
    ]


def _a_general(a, b, k):
    """Nested finite-sum form valid for every p >= 2."""
    levels = _levels_exact(a, b)
    depth = len(levels)

    @lru_cache(maxsize=None)
    def level(i, m):
        sigma, beta, c = levels[i]
        head = poch_ratio([sigma, beta], [], m)
        if i == depth - 1:
            return head
        inner = dd_sum(
            poch_ratio([-m], [sigma, c - m], t) * math.factorial(t) * level(i + 1, t)
            for t in range(m + 1)
        )
        return head * inner

    return level(0, k)


def _a_special(a, b, k):
    """Closed forms for p = 2, 3, 4 with their inner terminating 3F2."""
    p = len(b)
    if p == 2:
        return poch_ratio([_lv(b[1], -a[2]), _lv(b[0], -a[2])], [], k)
    if p == 3:
        a1, a2, a3, a4 = a
        b1, b2, b3 = b
        x = _lv(b3, b2, -a4, -a3)
        head = poch_ratio([x, _lv(b1, -a3)], [], k)
        inner = terminating([_lv(b3, -a4), _lv(b2, -a4), -k], [x, _lv(1, a3, -b1, -k)])
        return head * inner
    if p == 4:
        a1, a2, a3, a4, a5 = a
        b1, b2, b3, b4 = b
        x = _lv(b4, b3, b2, -a5, -a4, -a3)
        y = _lv(b4, b3, -a5, -a4)
        total = dd_sum(
            poch_ratio([y, _lv(b2, -a4), -k], [x, _lv(1, a3, -b1, -k)], l)
            * terminating([_lv(b4, -a5), _lv(b3, -a5), -l], [y, _lv(1, a4, -b2, -l)])
            for l in range(k + 1)
        )
        return poch_ratio([x, _lv(b1, -a3)], [], k) * total
    return _a_general(a, b, k)


def _a_alt_literal(a, b, k):
    p = len(b)
    if p == 3:
        a1, a2, a3, a4 = a
        b1, b2, b3 = b
        B1, B2 = _lv(b1, b3, -a3, -a4), _lv(b2, b3, -a3, -a4)
        inner = terminating([_lv(b3, -a3), _lv(b3, -a4), -k], [B1, B2])
        return poch_ratio([B1, B2], [], k) * inner
    if p == 4:
        a1, a2, a3, a4, a5 = a
        b1, b2, b3, b4 = b
        B1 = _lv(b1, b3, b4, -a3, -a4, -a5)
        B2 = _lv(b2, b3, b4, -a3, -a4, -a5)
        B3, B4 = _lv(b3, b4, -a3, -a5), _lv(b3, b4, -a4, -a5)
        total = dd_sum(
            poch_ratio([B3, B4, -k], [B1, B2], l)
            * terminating([_lv(b3, -a5), _lv(b4, -a5), -l], [B3, B4])
            for l in range(k + 1)
        )
        return poch_ratio([B1, B2], [], k) * total
    raise DomainError(f"alternate representation exists only for p in (3, 4), got p={p}")


def a_coeff(params, k, rep="recurrence", general=False):
    """A_k evaluated term by term from its finite-sum definition.

    Parameter combinations and the sums are carried in double-double
    arithmetic, which keeps the alternating inner sums accurate.  Cost grows
    quickly with k; large-k work belongs to :class:`CoefficientTable`.

    ``general=True`` forces the nested form for every p instead of the
    specialized p = 2, 3, 4 expressions.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    if params.p < 2:
        return 1.0 if k == 0 else 0.0
    if rep == "recurrence":
        if general or params.p > 4:
            return float(_a_general(params.a, params.b, k))
        return float(_a_special(params.a, params.b, k))
    if rep == "saalschutz_alt":
        return float(_a_alt_literal(params.a, params.b, k))
    raise DomainError(f"unknown representation {rep!r}")


# ---------------------------------------------------------------------------
# g_n


@dataclass(frozen=True)
class ConnectionCoefficient:
    n: int
    r: str
    value: float
    abs_err: float = 0.0


def canonical(params):
    """Same function with the numerator parameters in ascending order."""
    return ParameterSet(tuple(sorted(params.a)), params.b)


def _check_s(params):
    s = params.s
    if abs(s - round(s)) < INTEGER_TOL:
        from .errors import IntegerExponent

        raise IntegerExponent(f"s={s} is an integer")
    return s


def _check_r(r):
    if r not in R_VALUES:
        raise DomainError(f"r must be one of {R_VALUES}, got {r!r}")


def _prefactor(a1, a2, s, r_val, n):
    """(-1)^n Gamma(a1+r+n) Gamma(a2+r+n) Gamma(s-2r-n) / (Gamma(a1+s) Gamma(a2+s) n!)."""
    for x in (a1 + s, a2 + s):
        if gm.is_pole(x):
            raise SingularDenominator(f"a+s={x} is a nonpositive integer")
    v = gm.gamma_fraction([a1 + r_val + n, a2 + r_val + n, s - 2 * r_val - n],
                          [a1 + s, a2 + s, n + 1.0])
    return -v if n % 2 else v


def _series_weights(a1, a2, s, x, K):
    """(x)_k k! / ((a1+s)_k (a2+s)_k) for k < K."""
    k = np.arange(K - 1, dtype=float)
    w = np.ones(K)
    if K > 1:
        w[1:] = np.cumprod((x + k) * (k + 1.0) / ((a1 + s + k) * (a2 + s + k)))
    return w


def _sum_series(table, a1, a2, s, x, exponents, tol):
    """sum_k (x)_k / ((a1+s)_k (a2+s)_k) A_k with an algebraic tail."""
    if not exponents:
        return 1.0, 0.0
    if min(exponents) <= 0.0:
        raise ConvergenceCondition(f"series needs a_j + n > 0, exponents {exponents}")
    K = _K_START
    k_max = _K_MAX if table.max_length is None else min(_K_MAX, table.max_length)
    K = min(K, k_max)
    best = (math.nan, math.inf, 0.0)
    while True:
        terms = _series_weights(a1, a2, s, x, K) * table.normalized(K)
        value, err = sum_with_tail(terms, exponents)
        # the terms carry rounding of their own; a sum that cancels to zero
        # is only known to this level
        floor = _EPS * float(np.sum(np.abs(terms)))
        improved = err < 0.5 * best[1]
        if err < best[1]:
            best = (value, err, floor)
        # Once rounding dominates, longer tables only add fit noise.
        if err <= max(tol * abs(value), floor) or K >= k_max or not improved:
            break
        K *= 2
    value, err, floor = best
    err = max(err, floor)
    if not err <= max(max(tol, 1e-7) * abs(value), 4 * floor):
        raise NoConvergence(f"coefficient series error {err:.3g} at {K} terms")
    return value, err


class _ZeroFamily:
    """g_n(0) for one canonical parameter set and its raised relatives."""

    def __init__(self, params, rep="recurrence", tol=DEFAULT_TOL, target=RAISE_TARGET):
        self.base = params
        self.rep = rep
        self.tol = tol
        self.target = target
        self._tables = {}
        self._memo = {}
        # answers already handed out; kept across retries so that repeated
        # calls give identical values whatever was asked in between
        self._results = {}
        self._lock = threading.Lock()

    def table(self, a):
        key = tuple(a)
        if key not in self._tables:
            self._tables[key] = shared_table(key, self.base.b, self.rep)
        return self._tables[key]

    def direct(self, a, n):
        b = self.base.b
        s = math.fsum(b) - math.fsum(a)
        a1, a2 = a[0], a[1]
        pre = _prefactor(a1, a2, s, 0.0, n)
        exps = [aj + n for aj in a[2:]]
        val, err = _sum_series(self.table(a), a1, a2, s, s - n, exps, self.tol)
        return pre * val, abs(pre) * err

    def __call__(self, n, a=None):
        if a is not None:
            return self._eval(n, a)
        with self._lock:
            if n in self._results:
                return self._results[n]
            while True:
                try:
                    out = self._results[n] = self._eval(n, tuple(self.base.a))
                    return out
                except NoConvergence:
                    # Each raise lowers s; with many parameters the raised
                    # series can stall.  Retry with fewer raises.
                    if self.target <= 0.0:
                        raise
                    self.target -= 1.0
                    self._memo.clear()

    def _eval(self, n, a):
        key = (a, n)
        if key in self._memo:
            return self._memo[key]
        low = [j for j in range(2, len(a)) if a[j] + n < self.target]
        if not low:
            out = self.direct(a, n)
        else:
            out = self._raise(n, a, min(low, key=lambda i: a[i]))
        self._memo[key] = out
        return out


    def _raise(self, n, a, j):
        up = a[:j] + (a[j] + 1.0,) + a[j + 1 :]
        v_up, e_up = self._eval(n, up)
        v_next, e_next = self._eval(n + 1, a)
        d = a[j] + n
        return (v_up + (n + 1) * v_next) / d, (e_up + (n + 1) * e_next) / abs(d)


def _check_zero_condition(params, n):
    bad = [x for x in params.a[2:] if not x + n > 0.0]
    if bad:
        raise ConvergenceCondition(
            f"g_n(0) series needs a_j + n > 0 for j >= 3 (n={n}, offending {bad})"
        )


def g_s_values(params, N, rep="recurrence"):
    """g_n(s), n = 0..N: the k-sum terminates at k = n."""
    s = params.s
    a1, a2 = params.a[0], params.a[1]
    if params.p >= 2:
        At = shared_table(params.a, params.b, rep).normalized(N + 1)
    else:
        At = np.eye(1, N + 1)[0]
    out = []
    for n in range(N + 1):
        w = _series_weights(a1, a2, s, -float(n), n + 1)
        total = math.fsum(w * At[: n + 1])
        out.append(_prefactor(a1, a2, s, s, n) * total)
    return out


def g_n(params, r, n, tol=DEFAULT_TOL, rep="recurrence"):
    """Coefficient of (1-z)^(r+n) in the continuation of the prefactored
    p+1Fp, with r in {"zero", "s"}."""
    _check_r(r)
    if params.p < 2:
        raise DomainError("g_n needs p >= 2")
    _check_s(params)
    cp = canonical(params)
    if r == "s":
        return ConnectionCoefficient(n, r, g_s_values(cp, n, rep)[n])
    _check_zero_condition(cp, n)
    v, e = _ZeroFamily(cp, rep, tol)(n)
    return ConnectionCoefficient(n, r, v, e)


@lru_cache(maxsize=64)
def _family(a, b, rep, tol):
    return _ZeroFamily(ParameterSet(a, b), rep, tol)


def g_zero_values(params, N, tol=DEFAULT_TOL, rep="recurrence"):
    """(values, errors) of g_n(0), n = 0..N, for canonical ``params``.

    Families are cached, so a larger N after a smaller one (or another z
    for the same parameters) only computes the new orders."""
    fam = _family(tuple(params.a), tuple(params.b), rep, tol)
    vals, errs = [], []
    for n in range(N + 1):
        v, e = fam(n)
        vals.append(v)
        errs.append(e)
    return vals, errs


def g_n_closed(params, r, n, tol=DEFAULT_TOL):
    """g_n from the forms obtained via the Saalschuetzian transformations.

    p = 2 sums the 3F2 of unit argument directly; p = 3, 4 use the
    alternate coefficient representation.
    """
    _check_r(r)
    if params.p not in (2, 3, 4):
        raise DomainError(f"closed forms exist for p in (2, 3, 4), got p={params.p}")
    _check_s(params)
    cp = canonical(params)
    if params.p == 2:
        a1, a2, a3 = cp.a
        b1, b2 = cp.b
        s = cp.s
        if r == "s":
            pre = _prefactor(a1, a2, s, s, n)
            return ConnectionCoefficient(
                n, r, pre * terminating_sum([b1 - a3, b2 - a3, -float(n)], [a1 + s, a2 + s])
            )
        _check_zero_condition(cp, n)
        pre = _prefactor(a1, a2, s, 0.0, n)
        inner = eval_direct(ParameterSet((b1 - a3, b2 - a3, s - n), (a1 + s, a2 + s)), 1.0,
                            tol, max_terms=1 << 20)
        return ConnectionCoefficient(n, r, pre * inner.value, abs(pre) * inner.abs_err_estimate)
    if r == "s":
        return ConnectionCoefficient(n, r, g_s_values(cp, n, "saalschutz_alt")[n])
    _check_zero_condition(cp, n)
    v, e = _ZeroFamily(cp, "saalschutz_alt", tol)(n)
    return ConnectionCoefficient(n, r, v, e)


def generalized_gauss(params, tol=DEFAULT_TOL):
    """p+1Fp at z = 1 (s > 0) from the coefficient series."""
    s = params.s
    if not s > 0.0:
        raise DomainError(f"unit-argument sum needs s > 0, got {s}")
    cp = canonical(params)
    if cp.p < 2:
        from .series import gauss_sum

        return gauss_sum(cp.a[0], cp.a[1], cp.b[0])
    if any(not x > 0.0 for x in cp.a[2:]):
        raise DomainError("unit-argument sum needs a_j > 0 for j >= 3")
    pref = cp.prefactor()
    if pref == 0.0 or not math.isfinite(pref):
        raise DomainError("Gamma prefactor is zero or infinite")
    v, _ = _ZeroFamily(cp, "recurrence", tol)(0)
    return v / pref


# ---------------------------------------------------------------------------
# terminating Saalschuetzian transformations


def _rgamma_prod(xs):
    return gm.gamma_fraction([], list(xs))


def _kind_p(kind):
    if kind not in TRANSFORM_KINDS:
        raise DomainError(f"kind must be one of {TRANSFORM_KINDS}")
    return TRANSFORM_KINDS.index(kind) + 2


def _transform_setup(kind, params, m):
    p = _kind_p(kind)
    if params.p != p:
        raise DomainError(f"{kind} needs p={p} parameters, got p={params.p}")
    if m < 0:
        raise DomainError("m must be nonnegative")
    s = params.s
    if gm.is_pole(s):
        raise DomainError(f"s={s} is zero or a negative integer")
    return _lv(*params.b, *[-x for x in params.a])


def transform_lhs(kind, params, m):
    """Terminating Saalschuetzian series, summed term by term, over prod Gamma(b)."""
    s = _transform_setup(kind, params, m)
    a, b = list(params.a), list(params.b)
    return _rgamma_prod(b) * float(terminating(a + [-m], b + [1 - s - m]))


def transform_saalschutzian(kind, params, m):
    """Right-hand side of the transformation of a terminating Saalschuetzian
    4F3, 5F4 or 6F5 of unit argument, evaluated literally.

    The common factor ``1 / prod Gamma(b_j)`` is split off as a binary64
    number; everything else is carried in double-double."""
    s = _transform_setup(kind, params, m)
    a, b = params.a, params.b
    head_num = [a[0] + s, a[1] + s] + list(a[2:])
    head = poch_ratio(head_num, [s] + list(b), m) * math.factorial(m)
    if kind == "4F3":
        a1, a2, a3 = a
        b1, b2 = b
        body = terminating([_lv(b1, -a3), _lv(b2, -a3), s, -m],
                           [a1 + s, a2 + s, _lv(1, -a3, -m)])
    elif kind == "5F4":
        a1, a2, a3, a4 = a
        b1, b2, b3 = b
        c1, c2 = _lv(b1, b3, -a3, -a4), _lv(b2, b3, -a3, -a4)
        ws = poch_ratio_seq([c1, c2, _lv(1, -b3, -m), s, -m],
                            [a1 + s, a2 + s, _lv(1, -a3, -m), _lv(1, -a4, -m)], m)
        terms = []
        for k, w in enumerate(ws):
            inner = terminating([_lv(b3, -a3), _lv(b3, -a4), a1 + a2 + s + (m - 1), -k],
                                [c1, c2, _lv(b3, m, -k)])
            terms.append(w * inner)
        body = dd_sum(terms)
    else:
        a1, a2, a3, a4, a5 = a
        b1, b2, b3, b4 = b
        c1 = _lv(b1, b3, b4, -a3, -a4, -a5)
        c2 = _lv(b2, b3, b4, -a3, -a4, -a5)
        d1, d2 = _lv(b3, b4, -a3, -a5), _lv(b3, b4, -a4, -a5)
        e = _lv(b3, b4, -a3, -a4, -a5)
        ws = poch_ratio_seq(
            [c1, c2, _lv(1, -b3, -m), _lv(1, -b4, -m), s, -m],
            [a1 + s, a2 + s, _lv(1, -a3, -m), _lv(1, -a4, -m), _lv(1, -a5, -m)], m)
        terms = []
        for k, w in enumerate(ws):
            wls = poch_ratio_seq([d1, d2, _lv(a5, m, -k), a1 + a2 + s + (m - 1), -k],
                                 [c1, c2, _lv(b3, m, -k), _lv(b4, m, -k)], k)
            inner = []
            for l, wl in enumerate(wls):
                f = terminating([_lv(b3, -a5), _lv(b4, -a5), e - m + k, -l],
                                [d1, d2, _lv(1, -a5, -m, k, -l)])
                inner.append(wl * f)
            terms.append(w * dd_sum(inner))
        body = dd_sum(terms)
    return _rgamma_prod(b) * float(head * body)


# ---------------------------------------------------------------------------
# limit oracle


DEFAULT_SCHEDULE = (64, 96, 128, 192, 256, 384, 512)
ROUNDING_BUDGET = 1e-6


def limit_sequence(params, n, m, with_error=False):
    """The m-th member of the sequence whose limit is g_n(0): a prefactored
    terminating Saalschuetzian p+2F_{p+1}(1), summed term by term.

    ``with_error=True`` also returns a rounding-error bound.  For s - n < 0
    the terms cancel strongly and that bound can exceed the value."""
    s = _lv(*params.b, *[-x for x in params.a])
    a = [x + n for x in params.a]
    b = [y + n for y in params.b]
    pre = gm.gamma_fraction(a, b + [n + 1.0])
    if n % 2:
        pre = -pre
    total, mag = terminating([_lv(x, n) for x in params.a] + [-m],
                             [_lv(y, n) for y in params.b] + [1 - s + (n - m)],
                             with_abs=True)
    value = pre * float(total)
    if with_error:
        err = abs(pre) * (mag * (m + 1) * 8 * DD_EPS + abs(float(total)) * 2.3e-16)
        return value, err
    return value


def richardson(values, ms):
    """Neville-Richardson table for a sequence with an expansion in powers
    of 1/m.  Returns the estimate of each level (last entry is the best)."""
    rows = [list(values)]
    for j in range(1, len(values)):
        prev = rows[-1]
        cur = []
        for i in range(len(prev) - 1):
            ratio = ms[i + j] / ms[i]
            cur.append((ratio * prev[i + 1] - prev[i]) / (ratio - 1.0))
        rows.append(cur)
    return [r[-1] for r in rows]


def limit_oracle_g_n(params, r, n, m_schedule=DEFAULT_SCHEDULE):
    """Extrapolated limit m -> infinity of :func:`limit_sequence` (test oracle)."""
    _check_r(r)
    if r != "zero":
        raise DomainError("the limit oracle is only defined for r = 'zero'")
    _check_s(params)
    ms = [int(m) for m in m_schedule]
    if len(ms) < 2 or any(m2 <= m1 for m1, m2 in zip(ms, ms[1:])):
        raise DomainError("m_schedule must be increasing with at least two entries")
    seq, errs = zip(*(limit_sequence(params, n, m, with_error=True) for m in ms))
    est = richardson(seq, ms)
    # Rounding noise is amplified by the sum of |extrapolation weights|.
    amp = sum(abs(richardson([float(i == j) for j in range(len(ms))], ms)[-1])
              for i in range(len(ms)))
    noise = max(errs) * amp
    if noise > ROUNDING_BUDGET * abs(est[-1]):
        raise ExtrapolationUnstable(
            f"limit sequence loses accuracy to cancellation (noise {noise:.1e}, "
            f"value {est[-1]:.3e})"
        )
    diffs = [abs(x - y) for x, y in zip(est[1:], est)]
    if len(diffs) >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > 1e-12 * abs(est[-1]):
        raise ExtrapolationUnstable(f"Richardson estimates do not contract: {est}")
    return est[-1]
