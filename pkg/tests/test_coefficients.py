import math

import mpmath as mp
import numpy as np
import pytest

from hypercont import coefficients as cf
from hypercont.errors import (
    ConvergenceCondition,
    DomainError,
    ExtrapolationUnstable,
    IntegerExponent,
)
from hypercont.series import ParameterSet
from hypercont.verify import draw_params, draw_zero_balanced

from conftest import mp_hyper, mp_prefactor, mp_s, rel


def mp_a_coeff(params, k):
    """A_k for p = 2, 3, 4 from the finite sums, in 40 digits."""
    a = [mp.mpf(x) for x in params.a]
    b = [mp.mpf(y) for y in params.b]
    p = params.p
    if p == 2:
        return mp.rf(b[1] - a[2], k) * mp.rf(b[0] - a[2], k) / mp.factorial(k)
    if p == 3:
        x = b[2] + b[1] - a[3] - a[2]
        inner = mp.hyper([b[2] - a[3], b[1] - a[3], -k], [x, 1 + a[2] - b[0] - k], 1)
        return mp.rf(x, k) * mp.rf(b[0] - a[2], k) / mp.factorial(k) * inner
    x = b[3] + b[2] + b[1] - a[4] - a[3] - a[2]
    y = b[3] + b[2] - a[4] - a[3]
    total = mp.fsum(
        mp.rf(y, l) * mp.rf(b[1] - a[3], l) * mp.rf(-k, l)
        / (mp.rf(x, l) * mp.rf(1 + a[2] - b[0] - k, l) * mp.factorial(l))
        * mp.hyper([b[3] - a[4], b[2] - a[4], -l], [y, 1 + a[3] - b[1] - l], 1)
        for l in range(k + 1)
    )
    return mp.rf(x, k) * mp.rf(b[0] - a[2], k) / mp.factorial(k) * total


@pytest.mark.parametrize("p", [2, 3, 4])
def test_a_coeff_matches_mpmath(rng, p):
    for _ in range(4):
        params = draw_params(rng, p)
        for k in (0, 1, 5, 12):
            ref = mp_a_coeff(params, k)
            assert abs(cf.a_coeff(params, k) - float(ref)) <= 1e-12 * max(abs(float(ref)), 1e-300)


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
def test_a0_is_one(rng, p):
    params = draw_params(rng, p)
    assert cf.a_coeff(params, 0) == 1.0
    assert cf.CoefficientTable(params)[0] == 1.0


@pytest.mark.parametrize("p", [2, 3, 4])
def test_general_form_reduces_to_special(rng, p):
    params = draw_params(rng, p)
    for k in range(16):
        assert rel(cf.a_coeff(params, k, general=True), cf.a_coeff(params, k)) < 1e-12


@pytest.mark.parametrize("p", [3, 4])
def test_alternate_representation_identity(rng, p):
    params = draw_params(rng, p)
    for k in range(13):
        assert rel(cf.a_coeff(params, k, "saalschutz_alt"), cf.a_coeff(params, k)) < 1e-10


@pytest.mark.parametrize("p", [2, 3, 4, 5])
@pytest.mark.parametrize("rep", ["recurrence", "saalschutz_alt"])
def test_table_matches_literal(rng, p, rep):
    if rep == "saalschutz_alt" and p not in (3, 4):
        with pytest.raises(DomainError):
            cf.CoefficientTable(draw_params(rng, p), rep)
        return
    params = draw_params(rng, p)
    table = cf.CoefficientTable(params, rep)
    for k in range(12):
        lit = cf.a_coeff(params, k, rep)
        assert abs(table[k] - lit) <= 1e-9 * max(1.0, abs(lit))


def test_table_growth_keeps_prefix(rng):
    table = cf.CoefficientTable(draw_params(rng, 3))
    head = table.normalized(16).copy()
    table.normalized(300)
    assert np.array_equal(table.normalized(16), head)


def test_p4_alternate_table_is_capped(rng):
    table = cf.CoefficientTable(draw_params(rng, 4), "saalschutz_alt")
    with pytest.raises(DomainError):
        table.normalized(1000)


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
def test_g0_s_is_gamma_of_minus_s(rng, p):
    for _ in range(10):
        params = draw_params(rng, p, s_range=(-3.9, 3.9))
        ref = mp.gamma(-mp_s(params))
        assert rel(cf.g_n(params, "s", 0).value, ref) < 1e-12


def test_g_n_needs_non_integer_s():
    params = ParameterSet((0.5, 0.5, 0.5), (1.0, 1.5))
    with pytest.raises(IntegerExponent):
        cf.g_n(params, "zero", 0)
    with pytest.raises(DomainError):
        cf.g_n(ParameterSet((0.5, 0.5, 0.5), (1.2, 1.5)), "bogus", 0)


def test_g_n_convergence_condition():
    # a3 + n > 0 is checked after sorting, so one negative a_j is harmless
    assert math.isfinite(cf.g_n(ParameterSet((-0.6, 0.8, 1.1), (1.3, 0.45)), "zero", 0).value)
    params = ParameterSet((-0.6, -0.45, -0.3), (1.3, 0.45))
    with pytest.raises(ConvergenceCondition):
        cf.g_n(params, "zero", 0)


@pytest.mark.parametrize("p", [2, 3])
def test_generalized_gauss_matches_mpmath(rng, p):
    for _ in range(3):
        params = draw_params(rng, p, a_range=(0.3, 2.0), s_range=(0.3, 1.5))
        # mpmath's unit-argument sum is slow; 20 digits is plenty here
        with mp.workdps(20):
            ref = mp_hyper(params, 1)
        assert rel(cf.generalized_gauss(params), ref) < 1e-10


def test_generalized_gauss_domain():
    with pytest.raises(DomainError):
        cf.generalized_gauss(ParameterSet((0.5, 0.5, 0.5), (1.0, 0.2)))


def test_g0_zero_is_prefactored_unit_sum(rng):
    # for s > 0 the coefficient of w^0 is the prefactored value at z = 1
    params = draw_params(rng, 3, a_range=(0.5, 2.0), s_range=(0.5, 2.5))
    with mp.workdps(20):
        ref = mp_prefactor(params) * mp_hyper(params, 1)
    assert rel(cf.g_n(params, "zero", 0).value, ref) < 1e-10


def test_raising_retry_for_many_parameters():
    # raising every low a_j drives s strongly negative for p = 5; the
    # evaluator must fall back to fewer raises rather than give up
    params = ParameterSet((0.31, 0.42, 0.55, 0.63, 0.7, 0.8), (0.9, 0.6, 0.75, 0.5, 0.95))
    vals, _ = cf.g_zero_values(cf.canonical(params), 3)
    assert all(math.isfinite(v) for v in vals)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_closed_forms_agree_with_g_n(rng, p):
    params = draw_params(rng, p, a_range=(0.5, 2.5), s_range=(-0.9, 3.9))
    for n in range(5):
        for r in cf.R_VALUES:
            c, g = cf.g_n_closed(params, r, n), cf.g_n(params, r, n)
            # g_n(0) can be small after cancellation; allow the reported errors
            assert abs(c.value - g.value) <= max(1e-9 * abs(g.value), 2 * (c.abs_err + g.abs_err))


def test_coefficient_error_estimate_is_honest():
    params = ParameterSet(
        (0.9673057958417801, 1.5662860045957805, 1.896886558145623, 2.343848969615283,
         0.6435381174793962),
        (0.6496891261311725, 0.5364606727344505, 0.8867348859350055, 8.73544683464556),
    )
    with mp.workdps(25):
        ref = float(mp_prefactor(params) * mp_hyper(params, 1))
    for g in (cf.g_n(params, "zero", 0), cf.g_n_closed(params, "zero", 0)):
        assert abs(g.value - ref) <= 2 * g.abs_err


def test_closed_forms_only_for_small_p(rng):
    with pytest.raises(DomainError):
        cf.g_n_closed(draw_params(rng, 5), "zero", 0)


@pytest.mark.parametrize("kind", cf.TRANSFORM_KINDS)
def test_transformations_against_mpmath(rng, kind):
    p = cf.TRANSFORM_KINDS.index(kind) + 2
    for _ in range(3):
        params = draw_params(rng, p, s_range=(-3.9, 3.9))
        s = mp_s(params)
        for m in (0, 4, 11):
            a = [mp.mpf(x) for x in params.a] + [-m]
            b = [mp.mpf(y) for y in params.b] + [1 - s - m]
            ref = mp.hyper(a, b, 1) / mp.fprod(mp.gamma(mp.mpf(y)) for y in params.b)
            assert rel(cf.transform_lhs(kind, params, m), ref) < 1e-12
            assert rel(cf.transform_saalschutzian(kind, params, m), ref) < 1e-10


def test_transformation_validation(rng):
    with pytest.raises(DomainError):
        cf.transform_lhs("4F3", draw_params(rng, 3), 3)
    with pytest.raises(DomainError):
        cf.transform_lhs("7F6", draw_params(rng, 2), 3)


def test_limit_oracle_matches_closed_form(rng):
    for p in (2, 3):
        params = draw_params(rng, p, a_range=(0.5, 2.5), s_range=(-0.9, 3.9))
        for n in range(3):
            est = cf.limit_oracle_g_n(params, "zero", n)
            assert rel(est, cf.g_n_closed(params, "zero", n).value) < 1e-5


def test_limit_oracle_refuses_unstable_cases():
    # strongly negative s: the terminating sums cancel below binary64 noise
    params = ParameterSet((1.9, 2.3, 2.1), (1.1, 1.6))
    with pytest.raises(ExtrapolationUnstable):
        cf.limit_oracle_g_n(params, "zero", 2)
    with pytest.raises(DomainError):
        cf.limit_oracle_g_n(params, "s", 0)
    with pytest.raises(DomainError):
        cf.limit_oracle_g_n(params, "zero", 0, m_schedule=(64,))


def test_richardson_is_exact_for_polynomials_in_inverse_m():
    ms = [8, 16, 32, 64]
    vals = [2.0 + 3.0 / m - 5.0 / m**2 + 1.0 / m**3 for m in ms]
    assert cf.richardson(vals, ms)[-1] == pytest.approx(2.0, rel=1e-12)


def test_zero_balanced_draws_have_zero_balance(rng):
    params = draw_zero_balanced(rng, 3)
    assert abs(params.s) < 1e-12
