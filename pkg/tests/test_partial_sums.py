import math

import mpmath as mp
import pytest

from hypercont import continuation as ct
from hypercont import partial_sums as ps
from hypercont.errors import DomainError, PoleError
from hypercont.series import ParameterSet
from hypercont.verify import draw_zero_balanced

from conftest import rel

SYM = ParameterSet((0.5, 0.5, 0.5), (0.75, 0.75))


def test_first_terms():
    pre = SYM.prefactor()
    assert ps.partial_sum(SYM, 1) == pytest.approx(pre, rel=1e-15)
    ratio = 0.5**3 / 0.75**2
    assert ps.partial_sum(SYM, 2) == pytest.approx(pre * (1 + ratio), rel=1e-15)


def test_partial_sum_against_mpmath():
    a = [mp.mpf(x) for x in SYM.a]
    b = [mp.mpf(y) for y in SYM.b]
    ref = mp.fsum(
        mp.fprod(mp.gamma(x + k) for x in a) / (mp.fprod(mp.gamma(y + k) for y in b) * mp.factorial(k))
        for k in range(1000)
    )
    assert rel(ps.partial_sum(SYM, 1000), ref) < 1e-13


def test_recurrence_matches_per_term_log_gamma(rng):
    params = draw_zero_balanced(rng, 3)
    assert rel(ps.partial_sum(params, 10**4), ps.partial_sum_brute(params, 10**4)) < 1e-11


def test_blocks_join_seamlessly():
    # the recurrence is carried across the chunk boundary
    m = ps._CHUNK + 5
    assert rel(ps.partial_sum(SYM, m), ps.partial_sum_brute(SYM, m)) < 1e-11


def test_rejects_bad_input():
    with pytest.raises(DomainError):
        ps.partial_sum(SYM, 0)
    with pytest.raises(DomainError):
        ps.partial_sum(SYM, 2.5)
    with pytest.raises(DomainError):
        ps.partial_sum(ParameterSet((0.5, 0.5, 0.5), (0.75, 0.8)), 10)
    with pytest.raises(PoleError):
        ps.partial_sum(ParameterSet((-1.0, 0.5, 1.0), (0.75, -0.25)), 10)


def test_script_L_stabilizes():
    d1 = abs(ps.script_L(SYM, 1000) - ps.script_L(SYM, 2000))
    d2 = abs(ps.script_L(SYM, 2000) - ps.script_L(SYM, 4000))
    assert d2 / d1 == pytest.approx(0.5, abs=0.05)


def test_script_L_error_estimate_covers_truncation():
    L = ct.constant_L(SYM)
    value, err = ps.script_L(SYM, 10**4, with_error=True)
    assert abs(value - L) <= 2 * err
    assert err < 1e-3


@pytest.mark.parametrize("p", [2, 3, 4])
def test_script_L_equals_constant_L(rng, p):
    params = draw_zero_balanced(rng, p, a_range=(0.6, 2.0))
    L = ct.constant_L(params)
    assert abs(ps.script_L(params, 10**6) - L) <= 1e-5 * max(1.0, abs(L))


def test_script_L_trivial_case():
    # b1 = a3 leaves a 2F1 and the constant is 2 psi(1) - psi(a1) - psi(a2)
    a1, a2 = 0.4, 0.9
    params = ParameterSet((a1, a2, 1.7), (1.7, a1 + a2))
    ref = 2 * mp.digamma(1) - mp.digamma(a1) - mp.digamma(a2)
    assert abs(ps.script_L(params, 10**6) - float(ref)) < 1e-6


def test_script_L_matches_each_B3_representation(rng):
    params = draw_zero_balanced(rng, 3, a_range=(0.6, 2.0))
    sl = ps.script_L(params, 10**6)
    for rep in ct.applicable_representations(params):
        assert abs(sl - ct.constant_L(params, rep)) <= 1e-5 * max(1.0, abs(sl))


def test_defect_halves():
    L = ct.constant_L(SYM)
    d = [ps.asymptotic_partial_sum(SYM, m, L).defect for m in (2000, 4000)]
    assert d[1] / d[0] == pytest.approx(0.5, abs=0.02)


def test_report_fields():
    r = ps.asymptotic_partial_sum(SYM, 100)
    assert r.m == 100
    assert r.defect == r.sum - r.asymptotic
    assert math.isfinite(r.defect)
    assert r.asymptotic == pytest.approx(ct.constant_L(SYM) + 0.5772156649015329 + math.log(100))


def test_defect_is_order_one_over_m(ramanujan):
    m = 10**4
    r = ps.asymptotic_partial_sum(ramanujan, m)
    assert abs(r.defect) < 10 / m * abs(r.asymptotic)


def test_harmonic_identity():
    # sum_{k<m} 1/(k+1) + psi(1) - log m -> 1/(2m), with psi(1) = -gamma
    for m in (100, 1000):
        h = math.fsum(1.0 / (k + 1) for k in range(m))
        gap = h - 0.5772156649015329 - math.log(m)
        assert gap == pytest.approx(0.5 / m, rel=1e-2)


def test_defect_slope():
    assert ps.defect_slope(SYM) == pytest.approx(-1.0, abs=0.15)
