"""Series accumulation kernels.

Partial sums go through :func:`math.fsum` (exactly rounded).  Series whose
terms decay only algebraically, ``t_k ~ sum_j C_j k^(-1-e_j) (1 + c/k + ...)``
with known exponents ``e_j``, get their tail from a least-squares fit of the
terms against that asymptotic basis; each basis column is then summed to
infinity with the Hurwitz zeta function.
"""

import math

import numpy as np
from scipy.special import zeta

from .errors import ConvergenceCondition

# Exponents closer than this are treated as coincident (log-resonant).
_RESONANCE_TOL = 1e-7
# Beyond this decay power the tail is bounded instead of fitted.
_STEEP = 20.0
_FIT_ROWS = 400


def fsum(values):
    return math.fsum(values)


def pairwise_sum(values):
    """Pairwise (numpy) summation.

    Much faster than :func:`math.fsum` on long arrays; the error grows only
    like ``log2(n) * eps * sum |t|``, fine for same-sign algebraic tails."""
    return float(np.sum(values))


def term_block(num, den, z, first_term, first_index, count):
    """Terms ``t_{first_index} .. t_{first_index+count-1}`` of the series
    with ratio ``prod(num+k) / prod(den+k) * z / (k+1)``.
    """
    k = np.arange(first_index, first_index + count - 1, dtype=float)
    ratio = np.full(k.shape, float(z))
    for a in num:
        ratio *= a + k
    for b in den:
        ratio /= b + k
    ratio /= k + 1.0
    out = np.empty(count)
    out[0] = first_term
    if count > 1:
        out[1:] = first_term * np.cumprod(ratio)
    return out


def _basis(exponents, window):
    """Decay powers ``sigma`` with log multiplicities for the tail model."""
    emin = min(exponents)
    sigmas = []
    for e in exponents:
        i = 0
        while e + i <= emin + window + 1e-12:
            sigmas.append(1.0 + e + i)
            i += 1
    sigmas.sort()
    cols = []
    for sg in sigmas:
        mult = sum(1 for c in cols if abs(c[0] - sg) < _RESONANCE_TOL)
        cols.append((sg, min(mult, 2)))
    return cols


def _log_zeta(sigma, q, power):
    """sum_{k>=q} k^-sigma log(k)^power for power in {0, 1, 2}."""
    if power == 0:
        return zeta(sigma, q)
    # d/dsigma of the Hurwitz zeta, by central differences in sigma.
    h = 1e-4
    if power == 1:
        return -(zeta(sigma + h, q) - zeta(sigma - h, q)) / (2 * h)
    return (zeta(sigma + h, q) - 2 * zeta(sigma, q) + zeta(sigma - h, q)) / h**2


def algebraic_tail(terms, exponents, k_start=0, window=4.0, fit_fraction=8):
    """Estimate ``sum_{k >= k_start+len(terms)} t_k`` from the given terms.

    ``terms[i]`` is ``t_{k_start+i}``.  Returns ``(tail, error_estimate)``.
    """
    exponents = [float(e) for e in exponents]
    if not exponents or min(exponents) <= 0.0:
        raise ConvergenceCondition(f"tail exponents {exponents} must be positive")
    terms = np.asarray(terms, dtype=float)
    n = len(terms)
    end = k_start + n
    emin = min(exponents)
    if emin >= _STEEP:
        if not np.any(terms):
            return 0.0, 0.0
        # Fast decay: bound the tail by the integral of |t_end| (end/k)^(1+e).
        return 0.0, abs(terms[-1]) * end / emin

    def fit(win, lo, hi=n):
        lo = max(lo, 1 - k_start)
        idx = np.arange(lo, hi)
        if len(idx) > _FIT_ROWS:
            # The model is smooth in log k, so log-spaced rows carry the same
            # information as all of them at a fraction of the cost.
            pick = np.unique(np.geomspace(lo + 1, hi, _FIT_ROWS).astype(int) - 1)
            idx = pick[pick >= lo]
        ks = (k_start + idx).astype(float)
        data = terms[idx]
        if not np.any(data):
            return 0.0
        cols = _basis(exponents, win)
        x = ks / end
        mat = np.empty((len(ks), len(cols)))
        for c, (sg, mult) in enumerate(cols):
            mat[:, c] = x ** (-sg) * np.log(ks) ** mult
        scale = np.linalg.norm(mat, axis=0)
        coef, *_ = np.linalg.lstsq(mat / scale, data, rcond=1e-15)
        coef = coef / scale
        tail = 0.0
        for ci, (sg, mult) in zip(coef, cols):
            tail += ci * end**sg * _log_zeta(sg, end, mult)
        return tail

    lo = n // fit_fraction
    tail = fit(window, lo)
    # A smaller basis tests truncation of the model; dropping the last rows
    # tests noise in them (long coefficient tables lose digits).
    alt = fit(window - 1.0, lo)
    early = fit(window, lo, n - n // 4)
    return tail, max(abs(tail - alt), abs(tail - early))


def sum_with_tail(terms, exponents, k_start=0, **kw):
    """Partial sum plus fitted algebraic tail: ``(value, error_estimate)``."""
    head = pairwise_sum(terms)
    tail, err = algebraic_tail(terms, exponents, k_start=k_start, **kw)
    return head + tail, err
