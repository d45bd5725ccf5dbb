"""Partial sums of zero-balanced series at unit argument.

With ``s = 0`` the terms ``t_k = prod Gamma(a_j+k) / (prod Gamma(b_j+k) k!)``
behave like ``1/k``, so the partial sums grow like ``log m``.  The constant
in that growth coincides with the constant ``L`` of the expansion about
``z = 1``; :func:`script_L` approaches it from the series side.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import gamma as gm
from .continuation import _check_zero_balance, constant_L
from .errors import DomainError, PoleError
from .series import DEFAULT_TOL

_CHUNK = 1 << 16


def _terms(params, m):
    """Yield consecutive blocks of t_0 .. t_{m-1} (forward recurrence)."""
    for x in params.a:
        if gm.is_pole(x):
            raise PoleError(f"Gamma({x!r}) is infinite")
    first = params.prefactor()
    start = 0
    while start < m:
        count = min(_CHUNK, m - start)
        k = np.arange(start, start + count - 1, dtype=float)
        ratio = np.ones(len(k))
        for x in params.a:
            ratio *= x + k
        for y in params.b:
            ratio /= y + k
        ratio /= k + 1.0
        block = np.empty(count)
        block[0] = first
        block[1:] = first * np.cumprod(ratio)
        yield start, block
        # carry the recurrence into the next block
        kl = float(start + count - 1)
        nxt = block[-1]
        for x in params.a:
            nxt *= x + kl
        for y in params.b:
            nxt /= y + kl
        first = nxt / (kl + 1.0)
        start += count


def _check_m(m):
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    return int(m)


def partial_sum(params, m):
    """sum_{k<m} prod Gamma(a_j+k) / (prod Gamma(b_j+k) Gamma(1+k))."""
    m = _check_m(m)
    _check_zero_balance(params)
    return math.fsum(np.concatenate([blk for _, blk in _terms(params, m)]))


def partial_sum_brute(params, m):
    """Same sum with every term from log-gamma values (slow reference)."""
    m = _check_m(m)
    out = []
    for k in range(m):
        num = [x + k for x in params.a]
        den = [y + k for y in params.b] + [k + 1.0]
        out.append(gm.gamma_fraction(num, den))
    return math.fsum(out)


def script_L(params, m_cut, with_error=False):
    """sum_{k<m_cut} (t_k - 1/(k+1)).  The summands are O(k^-2), so the
    truncation error is O(1/m_cut); ``with_error=True`` also returns an
    estimate of it taken from the last summand."""
    m = _check_m(m_cut)
    _check_zero_balance(params)
    parts = []
    last = 0.0
    for start, blk in _terms(params, m):
        k = np.arange(start, start + len(blk), dtype=float)
        d = blk - 1.0 / (k + 1.0)
        parts.append(d)
        last = d[-1]
    value = math.fsum(np.concatenate(parts))
    if with_error:
        # d_k ~ c / k^2  =>  sum_{k >= m} d_k ~ c / m ~ m d_{m-1}
        return value, abs(last) * m
    return value


@dataclass(frozen=True)
class PartialSumReport:
    m: int
    sum: float
    asymptotic: float
    defect: float


def asymptotic_partial_sum(params, m, L=None, rep="recurrence", tol=DEFAULT_TOL):
    """Partial sum, its leading form ``L - psi(1) + log m`` and the defect."""
    m = _check_m(m)
    if L is None:
        L = constant_L(params, rep, tol)
    total = partial_sum(params, m)
    asym = L - gm.digamma(1.0) + math.log(m)
    defect = total - asym
    if not math.isfinite(defect):
        raise DomainError("defect is not finite")
    return PartialSumReport(m, total, asym, defect)


def defect_slope(params, ms=(100, 1000, 10000, 100000), L=None, rep="recurrence"):
    """Least-squares slope of log|defect| against log m."""
    if L is None:
        L = constant_L(params, rep)
    x = np.log(np.asarray(ms, dtype=float))
    y = np.log([abs(asymptotic_partial_sum(params, m, L).defect) for m in ms])
    return float(np.polyfit(x, y, 1)[0])
