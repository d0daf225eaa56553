from __future__ import annotations

import math

import numpy as np
import pytest

from toa.core import GaussianPacket, MomentumGrid, MomentumState, PhysicalParams, discretize
from toa.spectral import Regulator
from toa.uncertainty import (
    UncertaintyReport,
    commutator_defect,
    defect_expectation,
    energy_spread,
    time_energy_product,
)

R01 = Regulator(0.1)


def test_defect_examples():
    assert commutator_defect(R01, 2.0) == 0.0
    assert commutator_defect(R01, 0.0) == 1.0
    assert commutator_defect(R01, 0.05) == pytest.approx(0.75, rel=1e-14)
    assert commutator_defect(R01, -0.05) == pytest.approx(0.75, rel=1e-14)


def test_defect_support():
    k = np.concatenate([np.linspace(-5, -0.1000001, 50), np.linspace(0.1000001, 5, 50)])
    assert np.all(commutator_defect(R01, k) == 0)
    inner = np.linspace(-0.1, 0.1, 101)
    assert np.all((commutator_defect(R01, inner) >= 0) & (commutator_defect(R01, inner) <= 1))


def test_supported_away_state_bound(ref_state):
    rep = time_energy_product(ref_state, 1.0)
    assert rep.defect_expectation == 0.0
    assert rep.robertson_bound == 0.5


def test_reference_product(ref_packet):
    rep = time_energy_product(ref_packet, 1.0)
    assert rep.product >= 0.5 * (1 - 1e-10)
    assert rep.holds()
    assert rep.delta_T >= 0 and rep.delta_E >= 0
    assert set(rep.as_dict()) == {"delta_T", "delta_E", "product", "robertson_bound", "defect_expectation"}


def test_energy_spread_gaussian(ref_state):
    # for a Gaussian in k: Var(k^2/2) = k0^2 s^2 + s^4 / 2, with s = 1/(2 delta)
    s = 1.0
    expected = math.sqrt(400 * s * s + 0.5 * s ** 4)
    assert energy_spread(ref_state) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0, 2.0])
def test_delta_sweep(delta):
    p = GaussianPacket(-5.0, 10.0 / delta, delta)
    rep = time_energy_product(p, 1.0)
    assert rep.product / 0.5 >= 1.0


def test_defect_expectation_shrinks_with_epsilon():
    p = GaussianPacket(0.0, 0.0, 1.0)
    st = discretize(p, MomentumGrid(-8.0, 8.0, 2001))
    vals = [defect_expectation(st, Regulator(eps)) for eps in (0.5, 0.1, 0.02, 0.004)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # |psi(0)|^2 * (4/3) eps for small eps
    assert vals[-1] == pytest.approx(4 / 3 * 0.004 * math.sqrt(2 / math.pi), rel=1e-4)


def test_report_holds_tolerance():
    rep = UncertaintyReport(1.0, 0.5, 0.5, 0.5 + 1e-12, 0.0)
    assert rep.holds()
    assert not UncertaintyReport(1.0, 0.4, 0.4, 0.5, 0.0).holds()


def test_params_must_match(ref_state):
    with pytest.raises(ValueError):
        time_energy_product(ref_state, 1.0, params=PhysicalParams(hbar=2.0))
