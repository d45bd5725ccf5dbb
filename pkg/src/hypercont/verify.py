"""Self-verification suite behind ``hypercont verify``.

Each check draws random parameters, evaluates the same quantity two
independent ways and records the worst relative disagreement.  Draws come
from a fixed 64-bit linear congruential generator so that a seed gives the
same parameters on every platform:

    x_{i+1} = (6364136223846793005 * x_i + 1442695040888963407) mod 2**64
    u_i     = (x_i >> 11) / 2**53              (uniform on [0, 1))

The state starts at the seed and is stepped once before the first draw.
"""

import math
import time
from dataclasses import dataclass

from . import coefficients as cf
from . import continuation as ct
from . import gamma as gm
from . import partial_sums as ps
from . import series as sr
from .errors import HypercontError
from .series import ParameterSet

_MUL = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1

DEFAULT_SEED = 42


class LCG:
    def __init__(self, seed=DEFAULT_SEED):
        self.state = int(seed) & _MASK

    def random(self):
        self.state = (_MUL * self.state + _INC) & _MASK
        return (self.state >> 11) / float(1 << 53)

    def uniform(self, lo, hi):
        return lo + (hi - lo) * self.random()

    def randint(self, lo, hi):
        """Integer in [lo, hi]."""
        return lo + int(self.random() * (hi - lo + 1))


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    draws: int
    seconds: float = 0.0
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "draws": self.draws,
            "seconds": self.seconds,
            "detail": self.detail,
        }


def rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def _non_integer_s(params):
    s = params.s
    return abs(s - round(s)) > 0.05


def draw_params(rng, p, a_range=(0.3, 2.5), b_range=(0.5, 3.5), s_range=None):
    """Random parameter set; with ``s_range`` the last b is adjusted so
    that s falls in that range (redrawn if that makes b_p too small)."""
    while True:
        a = [rng.uniform(*a_range) for _ in range(p + 1)]
        b = [rng.uniform(*b_range) for _ in range(p)]
        if s_range is not None:
            target = rng.uniform(*s_range)
            b[-1] += target - (math.fsum(b) - math.fsum(a))
            if b[-1] < 0.2:
                continue
        params = ParameterSet(a, b)
        if s_range is None and not _non_integer_s(params):
            continue
        return params


def draw_zero_balanced(rng, p, a_range=(0.3, 2.0), b_range=(0.5, 2.5)):
    while True:
        a = [rng.uniform(*a_range) for _ in range(p + 1)]
        b = [rng.uniform(*b_range) for _ in range(p - 1)]
        last = math.fsum(a) - math.fsum(b)
        if last < 0.3:
            continue
        return ParameterSet(a, b + [last])


# ---------------------------------------------------------------------------
# checks: each returns (worst, draws)


def _gamma_checks(rng, n):
    worst = 0.0
    for _ in range(n):
        x = rng.uniform(0.01, 50.0)
        d = gm.digamma(x + 1) - gm.digamma(x) - 1 / x
        worst = max(worst, abs(d) / (1 + abs(gm.digamma(x))))
    return worst, n


def _pochhammer_split(rng, n):
    worst = 0.0
    for _ in range(n):
        lam = rng.uniform(0.1, 5.0)
        m, k = rng.randint(0, 30), rng.randint(0, 30)
        whole = gm.pochhammer(lam, m + k)
        worst = max(worst, rel(gm.pochhammer(lam, m) * gm.pochhammer(lam + m, k), whole))
    return worst, n


def _gauss_vs_direct(rng, n):
    worst = 0.0
    for _ in range(n):
        a1, a2 = rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)
        b1 = a1 + a2 + rng.uniform(0.3, 2.0)
        direct = sr.eval_direct(ParameterSet((a1, a2), (b1,)), 1.0, 1e-12, max_terms=1 << 20)
        worst = max(worst, rel(direct.value, sr.gauss_sum(a1, a2, b1)))
    return worst, n


def _saalschutz_brute(rng, n):
    worst = 0.0
    for _ in range(n):
        a1, a2, b1 = rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0), rng.uniform(0.5, 4.0)
        if gm.is_pole(b1 - a1 - a2, 1e-3):
            continue
        m = rng.randint(0, 20)
        worst = max(worst, rel(sr.saalschutz_brute(a1, a2, b1, m), sr.saalschutz_sum(a1, a2, b1, m)))
    return worst, n


def _continue_2f1(rng, n):
    worst = 0.0
    for _ in range(n):
        a1, a2, b1 = rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.5, 4.0)
        s1 = b1 - a1 - a2
        if abs(s1 - round(s1)) < 0.05:
            continue
        for z in (0.55, 0.7, 0.85):
            c = sr.continue_2f1(a1, a2, b1, z).value
            d = sr.eval_direct(ParameterSet((a1, a2), (b1,)), z).value
            worst = max(worst, rel(c, d))
    return worst, n


def _a_representations(rng, n):
    worst = 0.0
    for i in range(n):
        p = 3 + i % 2
        params = draw_params(rng, p)
        for k in range(13):
            worst = max(worst, rel(cf.a_coeff(params, k, "saalschutz_alt"), cf.a_coeff(params, k)))
    return worst, n


def _a_general_reduction(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_params(rng, 2 + i % 3)
        for k in range(16):
            worst = max(worst, rel(cf.a_coeff(params, k, general=True), cf.a_coeff(params, k)))
    return worst, n


def _g0_gamma(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_params(rng, 2 + i % 5, s_range=(-3.9, 3.9))
        if not _non_integer_s(params):
            continue
        worst = max(worst, rel(cf.g_n(params, "s", 0).value, gm.gamma(-params.s)))
    return worst, n


def _transformations(rng, n):
    worst = 0.0
    for i in range(n):
        kind = cf.TRANSFORM_KINDS[i % 3]
        params = draw_params(rng, 2 + i % 3, s_range=(-3.9, 3.9))
        if gm.is_pole(params.s, 1e-3):
            continue
        for m in range(16):
            worst = max(worst, rel(cf.transform_saalschutzian(kind, params, m),
                                   cf.transform_lhs(kind, params, m)))
    return worst, n


def _g_closed(rng, n):
    worst = 0.0
    for i in range(n):
        p = 2 + i % 3
        params = draw_params(rng, p, a_range=(0.5, 2.5))
        for nn in range(3 if p == 4 else 5):
            for r in cf.R_VALUES:
                c, g = cf.g_n_closed(params, r, nn), cf.g_n(params, r, nn)
                # g_n(0) can be small after cancellation, so only the gap
                # beyond both reported errors counts
                gap = abs(c.value - g.value) - 2 * (c.abs_err + g.abs_err)
                worst = max(worst, max(gap, 0.0) / max(abs(g.value), 1e-300))
    return worst, n


def _overlap(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_params(rng, 2 + i % 3, a_range=(0.3, 2.5))
        for z in (0.55, 0.75, 0.9):
            c = ct.continued_value(params, z, 1e-12).value
            d = sr.eval_direct(params, z).value
            worst = max(worst, rel(c, d))
    return worst, n


def _zero_overlap(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_zero_balanced(rng, 2 + i % 3)
        for z in (0.9, 0.99):
            c = ct.zero_balanced_value(params, z, 1e-12).value
            d = sr.eval_direct(params, z, 1e-13, max_terms=1 << 16).value
            worst = max(worst, rel(c, d))
    return worst, n


def _log_normalization(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_zero_balanced(rng, 2 + i % 3)
        exp = ct.build_zero_balanced(params, 4)
        worst = max(worst, abs(exp.logpart[0] - 1.0))
    return worst, n


def _b_consensus(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_zero_balanced(rng, 3 + i % 2, a_range=(0.6, 2.0))
        res = ct.constant_L_all(params, 1e-12)
        worst = max(worst, res.max_deviation / max(1.0, abs(res.value)))
    return worst, n


def _script_L(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_zero_balanced(rng, 2 + i % 3, a_range=(0.5, 2.0))
        L = ct.constant_L(params)
        worst = max(worst, abs(ps.script_L(params, 10**6) - L) / max(1.0, abs(L)))
    return worst, n


def _partial_brute(rng, n):
    worst = 0.0
    for i in range(n):
        params = draw_zero_balanced(rng, 2 + i % 3)
        worst = max(worst, rel(ps.partial_sum(params, 10**4), ps.partial_sum_brute(params, 10**4)))
    return worst, n


# name -> (function, tolerance, draws)
SUITES = {
    "gamma": {
        "digamma_recurrence": (_gamma_checks, 1e-11, 200),
        "pochhammer_split": (_pochhammer_split, 1e-12, 200),
    },
    "series": {
        "gauss_sum_vs_direct": (_gauss_vs_direct, 5e-9, 20),
        "saalschutz_brute_force": (_saalschutz_brute, 1e-12, 100),
        "continue_2f1_vs_direct": (_continue_2f1, 1e-10, 50),
    },
    "identities": {
        "a_coeff_representations": (_a_representations, 1e-10, 10),
        "a_coeff_general_form": (_a_general_reduction, 1e-12, 9),
        "g0_s_equals_gamma": (_g0_gamma, 1e-12, 50),
        "saalschutz_transformations": (_transformations, 1e-10, 12),
        "g_n_closed_forms": (_g_closed, 1e-9, 3),
    },
    "overlap": {
        "continuation_vs_direct": (_overlap, 1e-9, 9),
        "zero_balanced_vs_direct": (_zero_overlap, 1e-9, 6),
    },
    "constants": {
        "log_coefficient_normalization": (_log_normalization, 1e-12, 6),
        "b_representation_consensus": (_b_consensus, 1e-9, 2),
        "script_L_equals_L": (_script_L, 1e-5, 3),
        "partial_sum_brute_force": (_partial_brute, 1e-11, 3),
    },
}


def suite_names():
    return list(SUITES) + ["all"]


def run_suite(name="all", seed=DEFAULT_SEED, scale=1.0):
    """Run one suite (or all of them).  Every check gets its own generator,
    seeded from ``seed`` and its position, so checks are independent."""
    if name == "all":
        chosen = [(s, c) for s in SUITES for c in SUITES[s].items()]
    elif name in SUITES:
        chosen = [(name, c) for c in SUITES[name].items()]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {suite_names()}")
    results = []
    for idx, (suite, (check, (fn, tol, draws))) in enumerate(chosen):
        rng = LCG(seed + 7919 * idx)
        count = max(1, int(round(draws * scale)))
        t0 = time.perf_counter()
        try:
            worst, used = fn(rng, count)
            worst = float(worst)
            ok = bool(worst <= tol)
            detail = ""
        except HypercontError as exc:
            worst, used, ok = math.inf, count, False
            detail = f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(f"{suite}.{check}", ok, worst, tol, used,
                                   time.perf_counter() - t0, detail))
    return results
