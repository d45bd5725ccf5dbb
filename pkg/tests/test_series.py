import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercont import dd
from hypercont import series as sr
from hypercont.errors import DomainError, IntegerExponent, NoConvergence
from hypercont.series import ParameterSet

from conftest import mp_hyper, rel

param = st.floats(min_value=0.1, max_value=4.0)


def test_parameter_set_validation():
    with pytest.raises(DomainError):
        ParameterSet((1.0,), (2.0,))
    with pytest.raises(DomainError):
        ParameterSet((1.0, 2.0, 3.0), (2.0, -1.0))
    with pytest.raises(DomainError):
        ParameterSet((1.0,) * 9, (2.0,) * 8)
    with pytest.raises(DomainError):
        ParameterSet((math.nan, 1.0), (2.0,))


def test_balance_and_integer_detection():
    info = sr.balance(ParameterSet((0.5, 0.5, 0.5), (1.0, 1.0)))
    assert info.s == 0.5 and not info.is_integer
    info = sr.balance(ParameterSet((0.25, 0.5, 0.75), (0.5, 1.0)))
    assert info.is_integer and info.integer_value == 0


def test_log_example():
    # 2F1(1, 1; 2; z) = -log(1-z)/z
    r = sr.eval_direct(ParameterSet((1.0, 1.0), (2.0,)), 0.5)
    assert r.value == pytest.approx(2 * math.log(2), rel=1e-14)
    assert r.method == "direct"
    assert r.abs_err_estimate < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(param, min_size=3, max_size=4), st.lists(param, min_size=2, max_size=3),
       st.floats(min_value=-0.95, max_value=0.95))
def test_direct_matches_mpmath(a, b, z):
    if len(a) != len(b) + 1:
        a = a[: len(b) + 1] if len(a) > len(b) else a + [0.7]
    params = ParameterSet(a, b)
    ref = mp_hyper(params, z)
    r = sr.eval_direct(params, z)
    # alternating terms can cancel; the estimate must then cover the loss
    assert abs(r.value - float(ref)) <= max(1e-11 * max(1.0, abs(float(ref))), r.abs_err_estimate)


def test_direct_at_unit_argument():
    params = ParameterSet((0.5, 0.5, 0.5), (1.0, 1.2))
    r = sr.eval_direct(params, 1.0, 1e-12, max_terms=1 << 20)
    assert rel(r.value, mp_hyper(params, 1)) < 1e-10


def test_direct_at_minus_one():
    params = ParameterSet((0.5, 0.5, 0.5), (1.0, 1.0))
    r = sr.eval_direct(params, -1.0)
    assert rel(r.value, mp_hyper(params, -1)) < 1e-11


def test_terminating_series_any_z():
    params = ParameterSet((-3.0, 0.5, 0.5), (1.0, 1.2))
    for z in (0.3, 1.0, 7.0, -40.0):
        r = sr.eval_direct(params, z)
        assert r.value == pytest.approx(float(mp_hyper(params, z)), rel=1e-14)
        assert r.terms_used == 4 + 3


def test_direct_domain_errors():
    params = ParameterSet((0.5, 0.5, 0.5), (1.0, 0.2))
    with pytest.raises(DomainError):
        sr.eval_direct(params, 1.0)
    with pytest.raises(DomainError):
        sr.eval_direct(params, 1.5)
    with pytest.raises(NoConvergence):
        sr.eval_direct(ParameterSet((0.5, 0.5, 0.5), (1.0, 1.0)), 0.999, max_terms=100)


def test_cancelling_pairs_are_dropped():
    a, b = ParameterSet((0.5, 1.5, 2.0), (1.5, 3.0)).reduced()
    assert a == [0.5, 2.0] and b == [3.0]


@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.3, 2.0))
def test_gauss_sum(a1, a2, gap):
    b1 = a1 + a2 + gap
    assert rel(sr.gauss_sum(a1, a2, b1), mp.hyp2f1(a1, a2, b1, 1)) < 1e-12


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.5, 4.0), st.integers(0, 20))
def test_saalschutz_closed_form_vs_brute(a1, a2, b1, m):
    s1 = b1 - a1 - a2
    if abs(s1 - round(s1)) < 1e-3 and round(s1) <= 0:
        return
    closed = sr.saalschutz_sum(a1, a2, b1, m)
    # when b1 - a1 is a small integer the sum vanishes and the double-double
    # brute force leaves a residue relative to sum |t|
    _, mag = dd.terminating([a1, a2, -float(m)], [b1, 1.0 - b1 + a1 + a2 - m], m, with_abs=True)
    assert abs(sr.saalschutz_brute(a1, a2, b1, m) - closed) <= 1e-12 * abs(closed) + 1e-28 * mag


def test_terminating_sum_against_mpmath():
    num, den = [1.3, -0.4, -9.0], [2.1, 0.35]
    assert rel(sr.terminating_sum(num, den), mp.hyper(num, den, 1)) < 1e-14
    assert rel(sr.terminating_sum(num, den, 0.4), mp.hyper(num, den, 0.4)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.5, 4.0), st.floats(0.55, 0.95))
def test_continue_2f1_matches_mpmath(a1, a2, b1, z):
    s1 = b1 - a1 - a2
    if abs(s1 - round(s1)) < 0.02:
        return
    r = sr.continue_2f1(a1, a2, b1, z)
    assert rel(r.value, mp.hyp2f1(a1, a2, b1, z)) < 1e-10
    assert r.method == "continuation"


def test_continue_2f1_rejects_integer_exponent():
    with pytest.raises(IntegerExponent):
        sr.continue_2f1(0.5, 0.5, 2.0, 0.7)


def test_zero_balanced_2f1_leading_term():
    a1, a2, z = 0.3, 0.6, 1 - 1e-6
    ref = mp.hyp2f1(a1, a2, a1 + a2, z)
    # remainder is O((1-z) log(1-z))
    assert rel(sr.zero_balanced_2f1(a1, a2, z), ref) < 1e-4


@settings(max_examples=100, deadline=None)
@given(param, param, param, param, st.sampled_from([0.1, 0.5, 0.9, -0.5]))
def test_cancelled_pair_gives_same_value(a1, a2, b1, c, z):
    # a shared numerator and denominator parameter cancels out of the series
    full = sr.eval_direct(ParameterSet((a1, a2, c), (b1, c)), z).value
    reduced = sr.eval_direct(ParameterSet((a1, a2), (b1,)), z).value
    assert rel(full, reduced) < 1e-12
