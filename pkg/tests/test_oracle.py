from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import erfc

from toa.core import GaussianPacket, MomentumGrid, MomentumState, discretize
from toa.errors import NoConvergence
from toa.oracle import OracleConfig, dense_projection, gaussian_tail_mass, romberg, trapezoid_sequence
from toa.spectral import project


def test_disjoint_support_is_zero():
    st = discretize(GaussianPacket(0.0, -20.0, 0.5), MomentumGrid(-36.0, -4.0, 2048))
    assert abs(dense_projection(st, 0.3, 1, 1.0)) <= OracleConfig().abs_tolerance


def test_lattice_agreement(ref_state):
    worst = 0.0
    peak = 0.0
    pairs = []
    for X in (-3.0, 1.0, 5.0):
        for T in np.linspace(-0.1, 0.8, 4):
            fast = project(ref_state, T, 1, X)
            pairs.append((fast, dense_projection(ref_state, T, 1, X)))
            peak = max(peak, abs(fast))
    for fast, ref in pairs:
        if abs(ref) > 1e-6 * peak:
            worst = max(worst, abs(fast - ref) / abs(ref))
    assert worst <= 1e-8


def test_trapezoid_error_quarters():
    # smooth non-periodic integrand: the trapezoid error falls by 4 per halving
    seq = trapezoid_sequence(lambda k: np.exp(k) * np.sin(3 * k), 1.0, 2.0, n0=8, levels=5)
    exact = (np.exp(2) * (np.sin(6) - 3 * np.cos(6)) - np.exp(1) * (np.sin(3) - 3 * np.cos(3))) / 10
    err = [abs(s - exact) for s in seq]
    for a, b in zip(err, err[1:]):
        assert a / b == pytest.approx(4.0, rel=0.05)


def test_romberg_polynomial():
    assert romberg(lambda x: x ** 5, 0.0, 2.0) == pytest.approx(64 / 6, rel=1e-13)
    assert romberg(lambda x: x, 1.0, 1.0) == 0


def test_romberg_no_convergence():
    cfg = OracleConfig(refinement_levels=2, initial_panels=1)
    with pytest.raises(NoConvergence):
        romberg(lambda x: np.cos(400 * x), 0.0, 3.0, cfg)


def test_config_invariants():
    with pytest.raises(ValueError):
        OracleConfig(refinement_levels=1)
    with pytest.raises(ValueError):
        OracleConfig(abs_tolerance=0)


def test_tail_mass():
    p = GaussianPacket(-5.0, 20.0, 0.5)
    assert gaussian_tail_mass(p, 20.0) == 0.5
    assert gaussian_tail_mass(p, math.inf) == 1.0
    val = gaussian_tail_mass(p, 0.0)
    assert val == pytest.approx(0.5 * erfc(10 * math.sqrt(2)), rel=1e-14)
    assert 0 < val < 1e-62


def test_oracle_uses_spline_without_amplitude(ref_state):
    bare = MomentumState(ref_state.grid, ref_state.psi, ref_state.params)
    a = dense_projection(bare, 0.3, 1, 1.0)
    b = dense_projection(ref_state, 0.3, 1, 1.0)
    assert abs(a - b) <= 1e-8 * abs(b)
