from __future__ import annotations

import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from toa.analytic import analytic_amplitude, analytic_density, approx_amplitude, approx_density
from toa.core import GaussianPacket, MomentumGrid, PhysicalParams, discretize, gaussian_position_wavefunction
from toa.current import current_density
from toa.oracle import dense_projection
from toa.spectral import project


def _eps_phase(T, eps=1e-3):
    # the regulated amplitude carries exp(i hbar T eps^2 / 2m) relative to the eps -> 0 limit
    return np.exp(0.5j * np.asarray(T) * eps * eps)


def test_matches_spectral_at_peak(ref_packet, ref_state):
    exact = abs(analytic_amplitude(ref_packet, 0.3, 1.0, 1)) ** 2
    spectral = abs(project(ref_state, 0.3, 1, 1.0)) ** 2
    assert spectral == pytest.approx(exact, rel=1e-6)


def test_amplitude_phase_matches_spectral(ref_packet, ref_state):
    T = np.linspace(0.2, 0.4, 7)
    exact = analytic_amplitude(ref_packet, T, 1.0, 1) * _eps_phase(T)
    fast = project(ref_state, T, 1, 1.0)
    assert np.max(np.abs(fast - exact) / np.abs(exact)) <= 1e-6


def test_minus_branch_exponentially_small(ref_packet):
    for T in (-0.1, 0.0, 0.3, 0.8):
        assert abs(analytic_amplitude(ref_packet, T, 1.0, -1)) < 1e-20


def _mp_amplitude(p, T, X, sign):
    """Direct high-precision quadrature of the eps -> 0 overlap on the sign's half-line."""
    mpmath.mp.dps = 40
    d2 = mpmath.mpf(p.delta) ** 2
    root = 1 if sign > 0 else -1j

    def f(q):
        k = sign * q
        psi = (2 * d2 / mpmath.pi) ** 0.25 * mpmath.exp(-(k - p.k0) ** 2 * d2 - 1j * k * p.x0)
        return root * mpmath.sqrt(q) * mpmath.exp(-0.5j * T * k * k + 1j * k * X) * psi

    return complex(mpmath.quad(f, [0, 1, 3, 6, 12, mpmath.inf]) / mpmath.sqrt(2 * mpmath.pi))


@pytest.mark.parametrize("p,T,X", [
    (GaussianPacket(-2.0, 1.5, 1.0), 0.7, 0.5),
    (GaussianPacket(-2.0, 1.5, 1.0), 2.0, 1.0),
    (GaussianPacket(1.0, -1.0, 0.8), 0.4, 0.0),
    (GaussianPacket(-1.0, 2.5, 0.6), 1.1, 1.5),
])
@pytest.mark.parametrize("sign", [1, -1])
def test_both_signs_against_high_precision(p, T, X, sign):
    ref = _mp_amplitude(p, T, X, sign)
    val = analytic_amplitude(p, T, X, sign)
    assert abs(val - ref) <= 1e-9 * abs(ref)


def test_literal_form_agrees_on_dominant_branch(ref_packet):
    p = GaussianPacket(-2.0, 3.0, 0.7)
    for T in (0.0, 0.5, 1.2):
        a = analytic_amplitude(p, T, 1.0, 1, stable=True)
        b = analytic_amplitude(p, T, 1.0, 1, stable=False)
        assert abs(a - b) <= 1e-10 * abs(a)


def test_rest_packet_scaling_against_oracle():
    # k0 = 0, X = x0, T = 0: amplitude scales as 1/delta. The regulated
    # amplitude differs from the eps -> 0 form by O(eps^1.5), so eps is tiny.
    vals = {}
    for delta in (0.5, 1.0):
        p = GaussianPacket(0.0, 0.0, delta, PhysicalParams(epsilon=1e-10))
        st = discretize(p, MomentumGrid(-10 / delta, 10 / delta, 4001))
        ref = dense_projection(st, 0.0, 1, 0.0)
        val = analytic_amplitude(p, 0.0, 0.0, 1)
        assert abs(val - ref) <= 1e-6 * abs(ref)
        vals[delta] = val
    assert abs(vals[1.0] / vals[0.5]) == pytest.approx(0.5, rel=1e-12)


def test_density_sums_signs(ref_packet):
    T = np.array([0.25, 0.3])
    ref = np.abs(analytic_amplitude(ref_packet, T, 1.0, 1)) ** 2 + np.abs(
        analytic_amplitude(ref_packet, T, 1.0, -1)) ** 2
    assert np.allclose(analytic_density(ref_packet, T, 1.0), ref, rtol=1e-15)


def test_large_k0_delta_does_not_overflow():
    p = GaussianPacket(-5.0, 200.0, 0.5)
    val = analytic_amplitude(p, 0.03, 1.0, 1)
    assert math.isfinite(abs(val)) and abs(val) > 0


# -- first-order forms -----------------------------------------------------------

def _peak_rel_dev(p, X=1.0):
    T = (X - p.x0) / p.k0
    exact = analytic_amplitude(p, T, X, 1)
    return abs(approx_amplitude(p, T, X) - exact) / abs(exact)


def test_approx_deviation_size(ref_packet):
    dev = _peak_rel_dev(ref_packet)
    assert 1e-4 < dev < 5e-2


def test_approx_deviation_second_order():
    base = GaussianPacket(-5.0, 20.0, 0.5)
    doubled = GaussianPacket(-5.0, 40.0, 0.5)
    slope = math.log(_peak_rel_dev(doubled) / _peak_rel_dev(base)) / math.log(2.0)
    assert slope == pytest.approx(-2.0, abs=0.3)


def test_approx_correction_factor_on_trajectory(ref_packet):
    p = ref_packet
    T = 0.3
    a = p.delta ** 2 + 0.5j * T
    lead = (math.sqrt(p.k0) * (p.delta ** 2 / math.pi) ** 0.25 * 2 ** -0.25 / np.sqrt(a)
            * np.exp(1j * (p.k0 * 6.0 - T * p.k0 ** 2 / 2)))
    assert approx_amplitude(p, T, 1.0) == pytest.approx(lead, rel=1e-14)


def test_approx_modulus_velocity_relation(ref_packet):
    lhs = abs(approx_amplitude(ref_packet, 0.3, 1.0)) ** 2
    rhs = ref_packet.k0 * abs(gaussian_position_wavefunction(ref_packet, 1.0, 0.3)) ** 2
    assert lhs == pytest.approx(rhs, rel=0.05)


def test_approx_density_peak(ref_packet):
    T = np.linspace(-0.1, 0.8, 9001)
    assert T[np.argmax(approx_density(ref_packet, T, 1.0))] == pytest.approx(0.3, abs=2e-3)


def test_approx_density_integral(ref_packet):
    val, _ = quad(lambda t: approx_density(ref_packet, t, 1.0), -2, 3, points=[0.3], limit=200)
    assert val == pytest.approx(1.0, abs=1 / (ref_packet.k0 * ref_packet.delta))


def test_approx_density_is_current(ref_packet):
    T = np.linspace(-0.1, 0.8, 451)
    for X in (-3.0, 1.0, 5.0):
        a = approx_density(ref_packet, T, X)
        j = current_density(ref_packet, X, T)
        assert np.max(np.abs(a - j)) <= 1e-12 * max(1.0, a.max())


def test_approx_warns_outside_regime():
    p = GaussianPacket(-5.0, 2.0, 0.5)
    with pytest.warns(RuntimeWarning):
        approx_amplitude(p, 0.1, 0.0)
    with pytest.warns(RuntimeWarning):
        approx_density(p, 0.1, 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        approx_density(GaussianPacket(-5.0, 20.0, 0.5), 0.1, 0.0)
