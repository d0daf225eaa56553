"""Closed-form arrival amplitudes for Gaussian packets and their first-order forms.

With a = delta^2 + i hbar T / 2m, b = 2 delta^2 k0 + i (X - x0) and
z = b^2 / 4a the exact amplitudes (eps -> 0) are

    <T,+;X|psi> = P a^(-5/4) e^(-delta^2 k0^2) { b Phi(5/4, 3/2, z) + sqrt(pi a) e^z L(1/4, -1/2, -z) }
    <T,-;X|psi> = -i P a^(-5/4) e^(-delta^2 k0^2) { -b Phi(5/4, 3/2, z) + sqrt(pi a) e^z L(1/4, -1/2, -z) }

with P = sqrt(hbar/m) (delta^2 / 2^5 pi^3)^(1/4) Gamma(5/4). For a right
mover the braces of the minus amplitude nearly cancel; the stable evaluation
rewrites that branch through Tricomi's U, and folds e^(-delta^2 k0^2) into
the exponent of the dominant branch so large k0 delta cannot overflow.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np

from .core import GaussianPacket
from .special import DEFAULT_CONFIG, SpecialFunctionConfig, gamma, kummer_phi, laguerre_general, tricomi_u

_G54 = gamma(1.25).real


def _scalar_amplitude(p: GaussianPacket, T: float, X: float, sign: int,
                      cfg: SpecialFunctionConfig, stable: bool) -> complex:
    hbar, m, d2, k0 = p.params.hbar, p.params.mass, p.delta ** 2, p.k0
    a = d2 + 0.5j * hbar * T / m
    b = 2 * d2 * k0 + 1j * (X - p.x0)
    z = b * b / (4 * a)
    pref = (math.sqrt(hbar / m) * (d2 / (2 ** 5 * math.pi ** 3)) ** 0.25 * _G54
            * cmath.exp(-1.25 * cmath.log(a)))
    outer = 1 if sign > 0 else -1j
    root_pi_a = cmath.sqrt(math.pi * a)

    if not stable:
        braces = (sign * b * kummer_phi(1.25, 1.5, z, cfg)
                  + root_pi_a * cmath.exp(z) * laguerre_general(0.25, -0.5, -z, cfg))
        return pref * outer * math.exp(-d2 * k0 * k0) * braces

    w = b / (2 * cmath.sqrt(a))
    dominant = 1 if w.real >= 0 else -1
    if sign == dominant or abs(z) < 1:
        # Kummer: Phi(5/4, 3/2, z) = e^z Phi(1/4, 3/2, -z).
        braces = (sign * b * kummer_phi(0.25, 1.5, -z, cfg)
                  + root_pi_a * laguerre_general(0.25, -0.5, -z, cfg))
        return pref * outer * cmath.exp(z - d2 * k0 * k0) * braces
    # Recessive branch: the braces equal sqrt(pi a) U(3/4, 1/2, z) / (2^(3/2) Gamma(5/4)).
    braces = root_pi_a * tricomi_u(0.75, 0.5, z, cfg) / (2 ** 1.5 * _G54)
    return pref * outer * math.exp(-d2 * k0 * k0) * braces


def analytic_amplitude(p: GaussianPacket, T, X: float, sign=1,
                       cfg: SpecialFunctionConfig = DEFAULT_CONFIG, stable: bool = True):
    """Closed-form <T, sign; X | psi> for a Gaussian packet with eps -> 0.

    ``stable=False`` evaluates the displayed formula literally; it loses all
    accuracy on the exponentially small branch and overflows for large
    k0 * delta. ``T`` may be a scalar or an array.
    """
    s = 1 if sign in (1, "+") else -1
    if np.ndim(T) == 0:
        return _scalar_amplitude(p, float(T), X, s, cfg, stable)
    T = np.asarray(T, dtype=float)
    out = np.array([_scalar_amplitude(p, t, X, s, cfg, stable) for t in T.ravel()])
    return out.reshape(T.shape)


def analytic_density(p: GaussianPacket, T, X: float, cfg: SpecialFunctionConfig = DEFAULT_CONFIG):
    """|<T,+;X|psi>|^2 + |<T,-;X|psi>|^2 from the closed forms."""
    return (np.abs(analytic_amplitude(p, T, X, 1, cfg)) ** 2
            + np.abs(analytic_amplitude(p, T, X, -1, cfg)) ** 2)


def _check_regime(p: GaussianPacket):
    if abs(p.k0) * p.delta < 5:
        warnings.warn(f"k0*delta = {p.k0 * p.delta:g}: the first-order form needs k0*delta >> 1",
                      RuntimeWarning, stacklevel=3)


def approx_amplitude(p: GaussianPacket, T, X: float):
    """First-order (in 1/(k0 delta)) right-mover amplitude.

    sqrt(hbar k0/m) (delta^2/pi)^(1/4) 2^(-1/4) a^(-1/2) exp(i k0 D - i hbar T k0^2/2m)
    exp(-c^2 / 4a) (1 + i c / (4 k0 a)), with D = X - x0 and c = D - hbar T k0/m.
    """
    _check_regime(p)
    hbar, m, d2, k0 = p.params.hbar, p.params.mass, p.delta ** 2, p.k0
    T = np.asarray(T, dtype=float)
    a = d2 + 0.5j * hbar * T / m
    D = X - p.x0
    c = D - hbar * T * k0 / m
    val = (math.sqrt(hbar * k0 / m) * (d2 / math.pi) ** 0.25 * 2 ** -0.25 / np.sqrt(a)
           * np.exp(1j * (k0 * D - hbar * T * k0 * k0 / (2 * m)) - c * c / (4 * a))
           * (1 + 1j * c / (4 * k0 * a)))
    return val if val.ndim else complex(val)


def approx_density(p: GaussianPacket, T, X: float):
    """First-order arrival density: a Gaussian in T centred on the classical arrival time."""
    _check_regime(p)
    hbar, m, d2, k0 = p.params.hbar, p.params.mass, p.delta ** 2, p.k0
    T = np.asarray(T, dtype=float)
    D = X - p.x0
    var = d2 + T * T * hbar * hbar / (4 * m * m * d2)
    num = k0 * d2 + D * T * hbar / (4 * m * d2)
    val = hbar / (m * math.sqrt(2 * math.pi)) * num / var ** 1.5 * np.exp(
        -((D - k0 * T * hbar / m) ** 2) / (2 * var))
    return val if val.ndim else float(val)
