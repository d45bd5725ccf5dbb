"""Analytic continuation of p+1Fp near z = 1.

Two expansions in powers of ``w = 1 - z`` are provided, both for the
prefactored function ``prod Gamma(a) / prod Gamma(b) * F``:

* non-integer balance ``s``: ``sum g_n(0) w^n + w^s sum g_n(s) w^n``;
* zero balance: ``sum (analytic_n - logpart_n log w) w^n``, whose leading
  terms are ``L - log w``.

The constant ``L`` can be computed from several equivalent series for its
hypergeometric part ``B``; they are exposed under descriptive names so they
can be cross-checked against each other.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import coefficients as cf
from . import gamma as gm
from .errors import (
    ConvergenceCondition,
    DomainError,
    IntegerExponent,
    NoConvergence,
    NotImplementedIntegerS,
    RepresentationInapplicable,
    TruncationInsufficient,
)
from .series import (
    DEFAULT_MAX_TERMS,
    DEFAULT_TOL,
    EvalResult,
    ParameterSet,
    balance,
    continue_2f1,
    eval_direct,
)
from .summation import sum_with_tail, term_block

DEFAULT_N = 12
MAX_N = 160
DIRECT_RADIUS = 0.5

B_REPRESENTATIONS = (
    "recurrence",
    "saalschutz_alt",
    "hypergeometric_4f3",
    "nested_gauss",
    "split_series",
)

_K_START = 256
_K_MAX = 4096
_SPLIT_MAX_TERMS = 1 << 14


def _check_z(z):
    if not 0.0 < z < 1.0:
        raise DomainError(f"expansion about z=1 needs 0 < z < 1, got {z}")


def _check_not_terminating(params):
    if params.terminating_degree() is not None:
        raise DomainError("series terminates; evaluate it directly")
    for x in params.a:
        if gm.is_pole(x):
            raise DomainError(f"a={x} is a pole of the Gamma prefactor")


# ---------------------------------------------------------------------------
# non-integer s


@dataclass(frozen=True)
class ContinuationExpansion:
    params: ParameterSet
    s: float
    N: int
    g0: Tuple[float, ...]
    gs: Tuple[float, ...]
    g0_err: Tuple[float, ...] = field(default=(), compare=False)
    tol: float = DEFAULT_TOL

    def to_dict(self):
        return {
            "a": list(self.params.a),
            "b": list(self.params.b),
            "s": self.s,
            "N": self.N,
            "g0": list(self.g0),
            "gs": list(self.gs),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d, tol=DEFAULT_TOL):
        params = ParameterSet(d["a"], d["b"])
        return cls(params, float(d["s"]), int(d["N"]), tuple(d["g0"]), tuple(d["gs"]), tol=tol)


def _check_balance_for_continuation(params):
    info = balance(params)
    if info.is_integer:
        if info.integer_value == 0:
            raise IntegerExponent("s = 0: use the zero-balanced expansion")
        raise NotImplementedIntegerS(
            f"s={info.integer_value}: integer balance other than zero needs "
            "logarithmic terms of higher order, which are not implemented"
        )
    return info.s


def build_expansion(params, N=DEFAULT_N, tol=DEFAULT_TOL):
    """Coefficients g_n(0), g_n(s) for n = 0..N."""
    if not 2 <= params.p <= 6:
        raise DomainError(f"continuation needs p in 2..6, got p={params.p}")
    if N < 0:
        raise DomainError("N must be nonnegative")
    s = _check_balance_for_continuation(params)
    _check_not_terminating(params)
    cp = cf.canonical(params)
    for n in range(N + 1):
        cf._check_zero_condition(cp, n)
    g0, errs = cf.g_zero_values(cp, N, tol)
    gs = cf.g_s_values(cp, N)
    return ContinuationExpansion(
        params, s, N, tuple(float(v) for v in g0), tuple(float(v) for v in gs),
        tuple(float(e) for e in errs), tol,
    )


def _horner_terms(coeffs, w):
    return np.asarray(coeffs, dtype=float) * w ** np.arange(len(coeffs))


def eval_continued(expansion, z, tol=None):
    """Value of p+1Fp at ``z`` from a :class:`ContinuationExpansion`.

    The error estimate is the size of the last retained order plus the
    propagated coefficient errors."""
    z = float(z)
    _check_z(z)
    tol = expansion.tol if tol is None else tol
    w = 1.0 - z
    s = expansion.s
    t0 = _horner_terms(expansion.g0, w)
    ts = _horner_terms(expansion.gs, w) * w**s
    pref_value = math.fsum(np.concatenate([t0, ts]))
    trunc = abs(t0[-1]) + abs(ts[-1])
    coef_err = 0.0
    if expansion.g0_err:
        coef_err = math.fsum(np.abs(_horner_terms(expansion.g0_err, w)))
    rounding = np.finfo(float).eps * (math.fsum(np.abs(t0)) + math.fsum(np.abs(ts)))
    pref = expansion.params.prefactor()
    value = pref_value / pref
    err = (trunc + coef_err + rounding) / abs(pref)
    if trunc > tol * abs(pref_value):
        raise TruncationInsufficient(
            f"order N={expansion.N} contributes {trunc:.2e} at z={z}; increase N"
        )
    return EvalResult(value, err, 2 * (expansion.N + 1), "continuation")


def order_for(z, tol=DEFAULT_TOL):
    """Truncation order to try first at ``z`` for target ``tol``."""
    w = 1.0 - float(z)
    if w <= 0.0:
        return DEFAULT_N
    need = math.ceil(math.log(tol) / math.log(w)) + 4 if w < 1.0 else MAX_N
    return int(min(max(DEFAULT_N, need), MAX_N))


def _adaptive(build, evaluate, params, z, tol):
    N = order_for(z, tol)
    while True:
        exp = build(params, N, tol)
        try:
            return evaluate(exp, z, tol)
        except TruncationInsufficient:
            if N >= MAX_N:
                raise
            N = min(MAX_N, int(N * 1.5) + 1)


def continued_value(params, z, tol=DEFAULT_TOL):
    """eval_continued with the truncation order raised until it suffices."""
    z = float(z)
    _check_z(z)
    return _adaptive(build_expansion, eval_continued, params, z, tol)


# ---------------------------------------------------------------------------
# zero balance


@dataclass(frozen=True)
class ZeroBalancedExpansion:
    """Coefficients of the prefactored function: ``analytic[n]`` multiplies
    ``w^n`` and ``logpart[n]`` multiplies ``-log(w) w^n``."""

    params: ParameterSet
    N: int
    analytic: Tuple[float, ...]
    logpart: Tuple[float, ...]
    analytic_err: Tuple[float, ...] = field(default=(), compare=False)
    tol: float = DEFAULT_TOL

    def to_dict(self):
        return {
            "a": list(self.params.a),
            "b": list(self.params.b),
            "s": 0.0,
            "N": self.N,
            "analytic": list(self.analytic),
            "logpart": list(self.logpart),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d, tol=DEFAULT_TOL):
        params = ParameterSet(d["a"], d["b"])
        return cls(params, int(d["N"]), tuple(d["analytic"]), tuple(d["logpart"]), tol=tol)


def _check_zero_balance(params):
    info = balance(params)
    if not (info.is_integer and info.integer_value == 0):
        raise DomainError(f"zero-balanced expansion needs s = 0, got s={info.s}")


def _tail_series(table, a1, a2, n, exponents, tol):
    """sum_{k>n} (k-n-1)! k! (a1)_n (a2)_n / ((a1)_k (a2)_k n!) * A_k/k!."""
    if min(exponents) <= 0.0:
        raise ConvergenceCondition(f"tail needs a_j + n > 0, exponents {exponents}")
    k_max = _K_MAX if table.max_length is None else min(_K_MAX, table.max_length)
    K = min(max(_K_START, 2 * (n + 1)), k_max)
    while True:
        k = np.arange(n + 1, K, dtype=float)
        ratio = (k[:-1] - n) * (k[:-1] + 1.0) / ((a1 + k[:-1]) * (a2 + k[:-1]))
        w = np.empty(len(k))
        w[0] = (n + 1.0) / ((a1 + n) * (a2 + n))
        w[1:] = w[0] * np.cumprod(ratio)
        terms = w * table.normalized(K)[n + 1 :]
        value, err = sum_with_tail(terms, exponents, k_start=n + 1)
        if err <= tol * max(abs(value), 1.0) or K >= k_max:
            break
        K *= 2
    if not err <= max(tol, 1e-8) * max(abs(value), 1.0):
        raise NoConvergence(f"tail series error {err:.3g} after {K} terms")
    return value, err


def build_zero_balanced(params, N=DEFAULT_N, tol=DEFAULT_TOL):
    """Coefficients of the logarithmic expansion of a zero-balanced series."""
    _check_zero_balance(params)
    if params.p < 1 or N < 0:
        raise DomainError("need p >= 1 and N >= 0")
    _check_not_terminating(params)
    cp = cf.canonical(params)
    a1, a2 = cp.a[0], cp.a[1]
    rest = cp.a[2:]
    for n in range(N + 1):
        bad = [x for x in rest if not x + n > 0.0]
        if bad:
            raise ConvergenceCondition(
                f"zero-balanced expansion needs a_j + n > 0 for j >= 3 (n={n}, offending {bad})"
            )
    table = cf.shared_table(cp.a, cp.b)
    At = table.normalized(N + 1)
    psi1 = [gm.digamma(1.0 + i) for i in range(N + 1)]
    analytic, logpart, errs = [], [], []
    head = 1.0  # (a1)_n (a2)_n / (n!)^2
    for n in range(N + 1):
        if n:
            head *= (a1 + n - 1) * (a2 + n - 1) / (n * n)
        k = np.arange(n + 1)
        # (-n)_k k! / ((a1)_k (a2)_k)
        wk = np.ones(n + 1)
        if n:
            kk = k[:-1].astype(float)
            wk[1:] = np.cumprod((kk - n) * (kk + 1.0) / ((a1 + kk) * (a2 + kk)))
        base = wk * At[: n + 1]
        weights = np.array(psi1)[n - k] + psi1[n] - gm.digamma(a1 + n) - gm.digamma(a2 + n)
        fin = math.fsum(base * weights)
        logc = math.fsum(base)
        if rest:
            tail, terr = _tail_series(table, a1, a2, n, [x + n for x in rest], tol)
        else:
            tail, terr = 0.0, 0.0
        sign = -1.0 if n % 2 else 1.0
        # the tail carries (a1)_n (a2)_n / n! already; head has an extra 1/n!
        analytic.append(head * fin + sign * tail)
        logpart.append(head * logc)
        errs.append(terr)
    return ZeroBalancedExpansion(params, N, tuple(analytic), tuple(logpart), tuple(errs), tol)


def eval_zero_balanced(expansion, z, tol=None):
    z = float(z)
    _check_z(z)
    tol = expansion.tol if tol is None else tol
    w = 1.0 - z
    lw = math.log1p(-z)
    terms = _horner_terms(expansion.analytic, w) - _horner_terms(expansion.logpart, w) * lw
    pref_value = math.fsum(terms)
    trunc = abs(terms[-1])
    coef_err = 0.0
    if expansion.analytic_err:
        coef_err = math.fsum(np.abs(_horner_terms(expansion.analytic_err, w)))
    rounding = np.finfo(float).eps * math.fsum(np.abs(terms))
    pref = expansion.params.prefactor()
    if trunc > tol * abs(pref_value):
        raise TruncationInsufficient(
            f"order N={expansion.N} contributes {trunc:.2e} at z={z}; increase N"
        )
    err = (trunc + coef_err + rounding) / abs(pref)
    return EvalResult(pref_value / pref, err, expansion.N + 1, "zero_balanced")


def zero_balanced_value(params, z, tol=DEFAULT_TOL):
    """eval_zero_balanced with the truncation order raised until it suffices."""
    z = float(z)
    _check_z(z)
    return _adaptive(build_zero_balanced, eval_zero_balanced, params, z, tol)


# ---------------------------------------------------------------------------
# L(p) and B(p)


def _unit_value(a, b, tol):
    return eval_direct(ParameterSet(a, b), 1.0, tol, max_terms=1 << 20).value


def _b_table(cp, rep, tol):
    table = cf.shared_table(cp.a, cp.b, rep)
    value, _ = _tail_series(table, cp.a[0], cp.a[1], 0, list(cp.a[2:]), tol)
    return value


def _b_4f3(a1, a2, x, y, tol):
    """x y / (a1 a2) 4F3(x+1, y+1, 1, 1; a1+1, a2+1, 2; 1)."""
    if x == 0.0 or y == 0.0:
        return 0.0
    return x * y / (a1 * a2) * _unit_value([x + 1, y + 1, 1.0, 1.0], [a1 + 1, a2 + 1, 2.0], tol)


def _ell_series(first_term, ratio_fn, inner_fn, exponent, tol):
    """sum_l t_l F_l where t_{l+1}/t_l = ratio_fn(l) and F_l = inner_fn(l);
    the products decay like l^(-1-exponent)."""
    K = _K_START // 2
    cache = []
    t = first_term
    weights = []
    while True:
        while len(cache) < K:
            l = len(cache)
            if l:
                t *= ratio_fn(l - 1)
            weights.append(t)
            cache.append(inner_fn(l))
        terms = np.array(weights[:K]) * np.array(cache[:K])
        value, err = sum_with_tail(terms, [exponent])
        if err <= tol * max(abs(value), 1.0) or K >= _K_MAX // 2:
            break
        K *= 2
    if not err <= max(tol, 1e-8) * max(abs(value), 1.0):
        raise NoConvergence(f"outer series error {err:.3g} after {K} terms")
    return value


def _b_nested_gauss(cp, tol):
    a, b = cp.a, cp.b
    p = cp.p
    a1, a2 = a[0], a[1]
    # 0-based: a[j-1] is a_j, b[j-1] is b_j
    sigma2 = math.fsum(b[1:p]) - math.fsum(a[2 : p + 1])
    total = [_b_4f3(a1, a2, b[0] - a[2], sigma2, tol)]
    for k in range(3, p + 1):
        x = b[k - 2] - a[k]
        sig = math.fsum(b[k - 1 : p]) - math.fsum(a[k : p + 1])
        tau = sig + b[k - 2]
        if x == 0.0 or sig == 0.0:
            continue
        pre = x * sig * gm.gamma_fraction(list(a[:k]), list(b[: k - 2]) + [tau + 1.0])
        num = list(a[:k])
        den = list(b[: k - 2])

        def inner(l, num=num, den=den, tau=tau):
            return _unit_value(num, den + [tau + 1.0 + l], tol)

        def ratio(l, x=x, sig=sig, tau=tau):
            return (x + 1 + l) * (sig + 1 + l) / ((l + 2.0) * (tau + 1 + l))

        total.append(pre * _ell_series(1.0, ratio, inner, a[k], tol))
    return math.fsum(total)


def _b_split_series(cp, tol):
    a1, a2, a3, a4 = cp.a
    b1, b2, b3 = cp.b
    c = b2 + b3 - a3 - a4
    first = _b_4f3(a1, a2, b1 - a3, c, tol)
    x, y = b2 - a4, b3 - a4
    if x == 0.0 or y == 0.0:
        return first

    def inner(l):
        return _split_inner(a1, a2, a3, b1, c, l + 1, tol)

    def ratio(l):
        k = l + 1
        return (x + k) * (y + k) * k / ((k + 1.0) * (a1 + k) * (a2 + k))

    second = _ell_series(x * y / (a1 * a2), ratio, inner, a4, tol)
    return first + second


def _split_inner(a1, a2, a3, b1, c, k, tol):
    """3F2(b1-a3, c+k, k; a1+k, a2+k; 1).

    Its balance is a3, so the literal series crawls.  Thomae's relation
    moves k into the denominator: the new series has balance k and for
    large k its terms vanish within a few dozen steps."""
    pre = gm.gamma_fraction([a1 + k, a2 + k, a3], [float(k), a3 + c + k, b1])
    num, den = [a1, a2, a3], [a3 + c + k, b1]
    if k < 4:
        return pre * _unit_value(num, den, tol)
    blocks = []
    first, start = 1.0, 0
    while start < _SPLIT_MAX_TERMS:
        t = term_block(num, den, 1.0, first, start, 65)
        blocks.append(t[:-1])
        first, start = t[-1], start + 64
        total = math.fsum(np.concatenate(blocks))
        # terms fall off like j^(-1-k) once j is large, so the rest is
        # below t_j j / (k - 1)
        if abs(first) * (start + 1.0) / (k - 1.0) <= 0.1 * tol * abs(total):
            return pre * total
    return pre * _unit_value(num, den, tol)


def _applicable(rep, p):
    return {
        "recurrence": p >= 1,
        "saalschutz_alt": p in (3, 4),
        "hypergeometric_4f3": p == 2,
        "nested_gauss": p >= 2,
        "split_series": p == 3,
    }[rep]


def applicable_representations(params):
    return [r for r in B_REPRESENTATIONS if _applicable(r, params.p)]


def constant_B(params, rep="recurrence", tol=DEFAULT_TOL):
    """The series part B of the constant L."""
    if rep not in B_REPRESENTATIONS:
        raise DomainError(f"unknown representation {rep!r}; choose from {B_REPRESENTATIONS}")
    if not _applicable(rep, params.p):
        raise RepresentationInapplicable(f"representation {rep!r} does not apply to p={params.p}")
    _check_zero_balance(params)
    _check_not_terminating(params)
    cp = cf.canonical(params)
    bad = [x for x in cp.a[2:] if not x > 0.0]
    if bad:
        raise ConvergenceCondition(f"B needs a_j > 0 for j >= 3, offending {bad}")
    if cp.p == 1:
        return 0.0
    if rep in ("recurrence", "saalschutz_alt"):
        return _b_table(cp, rep, tol)
    if rep == "hypergeometric_4f3":
        a1, a2, a3 = cp.a
        b1, b2 = cp.b
        return _b_4f3(a1, a2, b1 - a3, b2 - a3, tol)
    if rep == "nested_gauss":
        return _b_nested_gauss(cp, tol)
    return _b_split_series(cp, tol)


def constant_L(params, rep="recurrence", tol=DEFAULT_TOL):
    """L = 2 psi(1) - psi(a1) - psi(a2) + B, the constant in ``L - log(1-z)``."""
    B = constant_B(params, rep, tol)
    cp = cf.canonical(params)
    return 2 * gm.digamma(1.0) - gm.digamma(cp.a[0]) - gm.digamma(cp.a[1]) + B


@dataclass(frozen=True)
class LConsensus:
    values: dict
    max_deviation: float

    @property
    def value(self):
        return self.values["recurrence"]


def constant_L_all(params, tol=DEFAULT_TOL):
    """L from every applicable representation and the largest pairwise gap."""
    values = {rep: constant_L(params, rep, tol) for rep in applicable_representations(params)}
    vs = list(values.values())
    dev = max((abs(x - y) for x in vs for y in vs), default=0.0)
    return LConsensus(values, dev)


def leading_zero_balanced(params, z, rep="recurrence", tol=DEFAULT_TOL):
    """``L - log(1-z)``: the two leading terms of the prefactored function."""
    z = float(z)
    _check_z(z)
    return constant_L(params, rep, tol) - math.log1p(-z)


# ---------------------------------------------------------------------------
# method selection


def select_method(params, z):
    """Pick an evaluation route for real ``z``.  Returns (method, warning)."""
    z = float(z)
    if abs(z) <= DIRECT_RADIUS or params.terminating_degree() is not None:
        return "direct", None
    if DIRECT_RADIUS < z < 1.0:
        info = balance(params)
        if not info.is_integer:
            return "continuation", None
        if info.integer_value == 0:
            return "zero_balanced", None
        return "direct", (
            f"integer balance s={info.integer_value} has no expansion about z=1 here; "
            "summing the power series directly"
        )
    return "direct", None


def evaluate(params, z, method="auto", tol=DEFAULT_TOL, max_terms=None):
    """Evaluate p+1Fp at real ``z``.  Returns (EvalResult, warnings)."""
    max_terms = DEFAULT_MAX_TERMS if max_terms is None else max_terms
    warnings = []
    if method == "auto":
        method, warn = select_method(params, z)
        if warn:
            warnings.append(warn)
    if method == "direct":
        return eval_direct(params, z, tol, max_terms), warnings
    if method == "continuation":
        if params.p == 1:
            return continue_2f1(params.a[0], params.a[1], params.b[0], z, tol), warnings
        return continued_value(params, z, tol), warnings
    if method in ("zero_balanced", "zero-balanced"):
        return zero_balanced_value(params, z, tol), warnings
    raise DomainError(f"unknown method {method!r}")


__all__ = [
    "B_REPRESENTATIONS",
    "ContinuationExpansion",
    "LConsensus",
    "ZeroBalancedExpansion",
    "applicable_representations",
    "build_expansion",
    "build_zero_balanced",
    "constant_B",
    "constant_L",
    "constant_L_all",
    "continued_value",
    "eval_continued",
    "eval_zero_balanced",
    "evaluate",
    "leading_zero_balanced",
    "order_for",
    "select_method",
    "zero_balanced_value",
]
