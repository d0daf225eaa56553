"""Brute-force references for validating the fast paths.

Nothing here calls into the spectral module: eigenstates are written out
inline and integrated with Richardson-extrapolated trapezoid sums in
s = sqrt(|k|) on the region |k| >= eps, which keeps the sqrt(k) factor of the
eigenstates smooth down to the edge (no change of variable to u or Z). The inner
region 0 < |k| < eps uses |k| = eps e^v, in which the logarithmic phase of
the eigenstates becomes linear and the integrand decays like e^(v/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import erfc

from .core import GaussianPacket, MomentumState
from .errors import NoConvergence


@dataclass(frozen=True)
class OracleConfig:
    refinement_levels: int = 6
    abs_tolerance: float = 1e-12
    initial_panels: int = 1024

    def __post_init__(self):
        if self.refinement_levels < 2:
            raise ValueError("refinement_levels must be at least 2")
        if not self.abs_tolerance > 0:
            raise ValueError("abs_tolerance must be positive")
        if self.initial_panels < 1:
            raise ValueError("initial_panels must be positive")


def trapezoid_sequence(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                       n0: int = 16, levels: int = 6) -> List[complex]:
    """Trapezoid sums with n0, 2 n0, 4 n0, ... panels, reusing previous nodes."""
    h = (b - a) / n0
    x = np.linspace(a, b, n0 + 1)
    fx = f(x)
    total = h * (np.sum(fx) - 0.5 * (fx[0] + fx[-1]))
    out = [total]
    n = n0
    for _ in range(levels):
        mid = a + h * (np.arange(n) + 0.5)
        total = 0.5 * total + 0.5 * h * np.sum(f(mid))
        h *= 0.5
        n *= 2
        out.append(total)
    return out


def romberg(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
            cfg: OracleConfig = OracleConfig()) -> complex:
    """Romberg integration; raises NoConvergence if the diagonal never settles."""
    if a == b:
        return 0j
    seq = trapezoid_sequence(f, a, b, cfg.initial_panels, cfg.refinement_levels)
    prev_row = [seq[0]]
    prev_best = seq[0]
    for j in range(1, len(seq)):
        row = [seq[j]]
        for m in range(1, j + 1):
            factor = 4.0 ** m
            row.append((factor * row[m - 1] - prev_row[m - 1]) / (factor - 1))
        best = row[-1]
        change = abs(best - prev_best)
        if change < cfg.abs_tolerance:
            return complex(best)
        prev_row, prev_best = row, best
    raise NoConvergence(
        f"Romberg on [{a:g}, {b:g}] changed by {change:.3g} at the last level "
        f"(tolerance {cfg.abs_tolerance:g})")


def _amplitude_function(state: MomentumState):
    if state.amplitude is not None:
        return state.amplitude
    g = state.grid
    re = CubicSpline(g.nodes, state.psi.real)
    im = CubicSpline(g.nodes, state.psi.imag)
    return lambda k: re(k) + 1j * im(k)


def dense_projection(state: MomentumState, T: float, sign: int, X: float = 0.0,
                     r=None, cfg: OracleConfig = OracleConfig()) -> complex:
    """Reference value of <T, sign; X | psi> by Romberg quadrature in k.

    ``r`` is anything with an ``epsilon`` attribute; the state's own
    epsilon is used when omitted.
    """
    hbar, m = state.params.hbar, state.params.mass
    eps = r.epsilon if r is not None else state.params.epsilon
    s = 1 if sign in (1, "+") else -1
    psi = _amplitude_function(state)
    pref = math.sqrt(hbar / (2 * math.pi * m))
    # Principal sqrt of 1/f: real on k > 0, i * real on k < 0. Conjugated below.
    root_phase = 1.0 if s > 0 else -1j

    def outer(r):
        # q = r^2, dq = 2 r dr, sqrt(q) = r.
        k = s * r * r
        phase = -hbar * T * (k * k - eps * eps) / (2 * m) + k * X
        return pref * root_phase * 2 * r * r * np.exp(1j * phase) * psi(k)

    def inner(v):
        # q = eps e^v, dq = q dv, sqrt(1/f) = eps / sqrt(q).
        q = eps * np.exp(v)
        k = s * q
        phase = -hbar * T * eps * eps * v / m + k * X
        return pref * root_phase * eps * np.sqrt(q) * np.exp(1j * phase) * psi(k)

    g = state.grid
    q_lo, q_hi = sorted((s * g.k_min, s * g.k_max))
    total = 0j
    a, b = max(q_lo, eps), q_hi
    if b > a:
        total += romberg(outer, math.sqrt(a), math.sqrt(b), cfg)
    a, b = max(q_lo, 0.0), min(q_hi, eps)
    if b > a:
        v_hi = math.log(b / eps)
        # e^(v/2) has fallen below 1e-17 at the default depth.
        v_lo = math.log(a / eps) if a > 0 else v_hi - 80.0
        total += romberg(inner, v_lo, v_hi, cfg)
    return total


def gaussian_tail_mass(p: GaussianPacket, k_cut: float) -> float:
    """Probability of k < k_cut for the packet, 0.5 * erfc(sqrt(2) delta (k0 - k_cut))."""
    return 0.5 * float(erfc(math.sqrt(2) * p.delta * (p.k0 - k_cut)))
