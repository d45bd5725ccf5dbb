import mpmath as mp
import pytest

from hypercont.series import ParameterSet
from hypercont.verify import LCG

mp.mp.dps = 40


def mp_hyper(params, z):
    """p+1Fp(z) in 40-digit arithmetic."""
    return mp.hyper([mp.mpf(x) for x in params.a], [mp.mpf(y) for y in params.b], mp.mpf(z))


def mp_prefactor(params):
    num = mp.fprod(mp.gamma(mp.mpf(x)) for x in params.a)
    return num / mp.fprod(mp.gamma(mp.mpf(y)) for y in params.b)


def mp_s(params):
    return mp.fsum(mp.mpf(y) for y in params.b) - mp.fsum(mp.mpf(x) for x in params.a)


def rel(x, ref):
    ref = float(ref)
    return abs(float(x) - ref) / max(abs(ref), 1e-300)


@pytest.fixture
def rng():
    return LCG(20241)


@pytest.fixture
def ramanujan():
    return ParameterSet((0.3, 0.5, 0.7), (0.6, 0.9))
