from __future__ import annotations

import cmath
import math

import mpmath
import pytest
from scipy.special import eval_genlaguerre

from toa.errors import SeriesDivergence
from toa.special import SpecialFunctionConfig, gamma, kummer_phi, laguerre_general, rgamma, tricomi_u

mpmath.mp.dps = 30


def _ref(x):
    return complex(x)


def test_phi_at_zero():
    assert kummer_phi(0.3, 1.7, 0) == 1
    assert kummer_phi(1.25 + 1j, 1.5, 0) == 1


@pytest.mark.parametrize("z", [0.5, -3.0, 2 + 1j, -20 + 4j, 15j, 40.0])
def test_phi_exponential_identity(z):
    assert kummer_phi(1, 1, z) == pytest.approx(cmath.exp(z), rel=1e-12)


def test_phi_known_value():
    assert kummer_phi(1, 2, 2) == pytest.approx((math.exp(2) - 1) / 2, rel=1e-14)
    assert abs(kummer_phi(1, 2, 2) - 3.19453) < 1e-5


ARGS = [
    (1.25, 1.5, 0.3 + 0.2j), (0.25, 1.5, -4 + 2j), (1.25, 1.5, 12 - 30j), (0.25, 1.5, -60 + 10j),
    (1.25, 1.5, 100 + 5j), (-0.25, 0.5, 7 - 7j), (0.75, 0.5, -25j), (1.25, 1.5, 400 - 100j),
]


@pytest.mark.parametrize("a,b,z", ARGS)
def test_phi_against_mpmath(a, b, z):
    ref = _ref(mpmath.hyp1f1(a, b, z))
    assert kummer_phi(a, b, z) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("z", [0.5, -2 + 3j, 6j, -8.0, 5 - 5j])
def test_phi_series_vs_kummer(z):
    s = kummer_phi(1.25, 1.5, z, method="series")
    k = kummer_phi(1.25, 1.5, z, method="kummer")
    assert abs(s - k) <= 1e-12 * abs(s)


def test_phi_series_divergence():
    cfg = SpecialFunctionConfig(max_terms=10)
    with pytest.raises(SeriesDivergence):
        kummer_phi(1.25, 1.5, 50.0, cfg, method="series")


def test_phi_unknown_method():
    with pytest.raises(ValueError):
        kummer_phi(1, 2, 1.0, method="nope")


def test_config_invariants():
    with pytest.raises(ValueError):
        SpecialFunctionConfig(series_tolerance=0)
    with pytest.raises(ValueError):
        SpecialFunctionConfig(max_terms=5)


@pytest.mark.parametrize("z", [0.25, 0.5, 0.75, 1.25, 1.5, -0.5, 3.3, 0.25 + 2j, -2.5 - 1j, 30.0])
def test_gamma_against_mpmath(z):
    assert gamma(z) == pytest.approx(_ref(mpmath.gamma(z)), rel=1e-13)


def test_gamma_poles():
    with pytest.raises(ValueError):
        gamma(-2)
    assert rgamma(0) == 0
    assert rgamma(-3) == 0


def test_laguerre_degree_zero():
    for a, z in [(0.3, 2.0), (-0.5, 1 + 1j), (2.0, -7.0)]:
        assert laguerre_general(0, a, z) == pytest.approx(1.0, rel=1e-14)


def test_laguerre_degree_one():
    for z in [0.0, 2.0, -1 + 3j]:
        assert laguerre_general(1, 0, z) == pytest.approx(1 - z, rel=1e-14, abs=1e-15)


def test_laguerre_quarter_at_zero():
    ref = _ref(mpmath.gamma(0.75) / (mpmath.gamma(1.25) * mpmath.gamma(0.5)))
    assert laguerre_general(0.25, -0.5, 0) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("n,a,z", [(2, 0.5, 1.3), (3, 0.5, -2.0), (4, 1.0, 7.5), (5, -0.5, 0.2)])
def test_laguerre_integer_degree(n, a, z):
    assert laguerre_general(n, a, z) == pytest.approx(eval_genlaguerre(n, a, z), rel=1e-12)


@pytest.mark.parametrize("z", [0.5 + 0.5j, -3 + 2j, 10 - 8j, -15 + 1j, 30j, 150 + 20j])
def test_laguerre_against_mpmath(z):
    ref = _ref(mpmath.laguerre(0.25, -0.5, z))
    assert laguerre_general(0.25, -0.5, z) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("z", [0.3 + 0.1j, 2 - 1j, 8 + 10j, 14 - 6j, 40 + 3j, 200 - 50j, -5 + 5j])
def test_tricomi_against_mpmath(z):
    ref = _ref(mpmath.hyperu(0.75, 0.5, z))
    assert tricomi_u(0.75, 0.5, z) == pytest.approx(ref, rel=1e-10)


def test_tricomi_singular_at_zero():
    with pytest.raises(ValueError):
        tricomi_u(0.75, 0.5, 0)
