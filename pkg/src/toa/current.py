"""Probability current through a detector and its relation to arrival densities.

States are either :class:`GaussianPacket` (closed-form wavefunction) or
:class:`MomentumState` (Fourier synthesis on the momentum grid); both expose
``wavefunction``, ``wavefunction_dx`` and ``params``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, simpson
from scipy.special import erfc

from .core import GaussianPacket, MomentumState, PhysicalParams, as_state, simpson_weights
from .errors import PhaseUnderresolved, UnsupportedState
from .spectral import PHASE_LIMIT, Regulator, arrival_density

LEFT_MASS_LIMIT = 1e-8


def _params(state, params: Optional[PhysicalParams]) -> PhysicalParams:
    if params is not None and params != state.params:
        raise ValueError("params must match the state's own params")
    return state.params


def current_density(state, X: float, T, params: Optional[PhysicalParams] = None):
    """j_X(T) = (hbar/m) Im(conj(psi) dpsi/dx) at x = X, t = T."""
    params = _params(state, params)
    psi = state.wavefunction(X, T)
    dpsi = state.wavefunction_dx(X, T)
    j = params.hbar / params.mass * np.imag(np.conj(psi) * dpsi)
    return j if np.ndim(j) else float(j)


def flux_window(state, X: float, t1: float, t2: float,
                params: Optional[PhysicalParams] = None) -> float:
    """Integral of j_X over [t1, t2] by adaptive quadrature."""
    _params(state, params)
    if t2 < t1:
        raise ValueError("flux_window needs t1 <= t2")
    if t1 == t2:
        return 0.0
    val, _ = quad(lambda t: current_density(state, X, t), t1, t2,
                  epsabs=1e-13, epsrel=1e-12, limit=400)
    return float(val)


def _moments(state) -> Tuple[float, float]:
    """(<x0>, <k>) of either kind of state."""
    if isinstance(state, GaussianPacket):
        return state.x0, state.k0
    return state.mean_x0(), state.mean_k()


def _spread_x(state, t: float) -> float:
    if isinstance(state, GaussianPacket):
        return state.moments(t).spread_x
    return state.spread_x(t)


def position_cdf(state, X: float, t: float) -> float:
    """Probability of finding the particle left of X at time t.

    Closed form (erfc) for Gaussian packets; Simpson quadrature of the
    synthesized density for grid states.
    """
    if isinstance(state, GaussianPacket):
        mom = state.moments(t)
        return 0.5 * float(erfc((mom.mean_x - X) / (math.sqrt(2) * mom.spread_x)))
    hbar, m = state.params.hbar, state.params.mass
    x0, k = _moments(state)
    mean = x0 + hbar * k * t / m
    lo = mean - 20 * _spread_x(state, t)
    if X <= lo:
        return 0.0
    k_abs = float(np.max(np.abs(state.k)))
    n = int(math.ceil((X - lo) * 4 * k_abs / math.pi)) + 1
    n += 1 - n % 2
    x = np.linspace(lo, X, max(n, 201))
    rho = np.abs(state.wavefunction(x, t)) ** 2
    return float(simpson(rho, x=x))


def arrival_window(state, X: float, n_sigma: float = 10.0) -> Tuple[float, float]:
    """[T* - n sigma_T, T* + n sigma_T] around the classical arrival time.

    sigma_T is estimated as m sigma_x(T*) / (hbar <k>).
    """
    hbar, m = state.params.hbar, state.params.mass
    x0, k = _moments(state)
    if k == 0:
        raise UnsupportedState("no arrival window for a state with zero mean momentum")
    t_star = m * (X - x0) / (hbar * k)
    sigma = m * _spread_x(state, t_star) / (hbar * abs(k))
    return t_star - n_sigma * sigma, t_star + n_sigma * sigma


def _left_mass(state) -> float:
    if isinstance(state, GaussianPacket):
        return 0.5 * float(erfc(math.sqrt(2) * state.delta * state.k0))
    return state.mass(-1)


def _check_right_mover(state):
    left = _left_mass(state)
    if left > LEFT_MASS_LIMIT:
        raise UnsupportedState(f"left-moving mass {left:.3g} exceeds {LEFT_MASS_LIMIT:g}")
    if isinstance(state, MomentumState):
        # psi must vanish at least like k^2 at small k: |psi| (k_ref/k)^2 stays
        # negligible below k_ref/4.
        k_ref = state.mean_k()
        low = (state.k > 0) & (state.k < 0.25 * k_ref)
        if np.any(low):
            ratio = np.abs(state.psi[low]) * (k_ref / state.k[low]) ** 2
            if ratio.max() > 1e-6 * np.abs(state.psi).max():
                raise UnsupportedState("psi(k) does not vanish like k^2 near k = 0")


def mean_arrival_from_current(state, X: float, params: Optional[PhysicalParams] = None,
                              n_sigma: float = 10.0) -> float:
    """<T> = integral of T j_X(T) dT over a wide window around the classical arrival."""
    _params(state, params)
    _check_right_mover(state)
    t1, t2 = arrival_window(state, X, n_sigma)
    val, _ = quad(lambda t: t * current_density(state, X, t), t1, t2,
                  epsabs=1e-14, epsrel=1e-12, limit=400, points=[0.5 * (t1 + t2)])
    return float(val)


def symmetric_ordering_expectation(state, X: float, params: Optional[PhysicalParams] = None) -> float:
    """(m/hbar) Re integral_0^inf conj(psi) (X/k - (i/k) dpsi/dk) dk.

    The derivative comes from :meth:`MomentumState.dpsi`.
    """
    if isinstance(state, GaussianPacket):
        state = as_state(state)
    _params(state, params)
    _check_right_mover(state)
    hbar, m = state.params.hbar, state.params.mass
    pos = state.k > 0
    k = state.k[pos]
    if k.size < 3:
        raise UnsupportedState("too few grid nodes on k > 0")
    psi = state.psi[pos]
    dpsi = state.dpsi()[pos]
    w = simpson_weights(k.size, state.grid.step)
    integrand = np.conj(psi) * (X * psi - 1j * dpsi) / k
    return float(m / hbar * np.real(np.dot(w, integrand)))


def _translated(state, X: float):
    """Grid state with the detector moved to the origin."""
    st = as_state(state)
    return st if X == 0 else st.translated(X)


def _double_integral(st: MomentumState, T: float, kernel_width: float = 0.0) -> float:
    """(hbar/4 pi m) Re sum (sqrt k - sqrt k')^2 A(k) conj(A(k')) sinc(w (k^2 - k'^2)).

    A(k) = exp(-i hbar T k^2 / 2m) psi(k); ``kernel_width`` is hbar dT / 2m.
    Nodes whose amplitude is negligible are dropped.
    """
    hbar, m = st.params.hbar, st.params.mass
    keep = np.abs(st.psi) >= 1e-10 * np.abs(st.psi).max()
    k = st.k[keep]
    a = (st.grid.weights() * st.psi)[keep] * np.exp(-0.5j * hbar * T * k * k / m)
    k2 = k * k
    one_sided = bool(np.all(k > 0))
    if one_sided:
        # Real symmetric kernel: Re(a K conj(a)) = Re(a) K Re(a) + Im(a) K Im(a).
        root = np.sqrt(k)
        vec = np.stack([a.real, a.imag])
    else:
        root = np.where(k < 0, 1j * np.sqrt(np.abs(k)), np.sqrt(np.abs(k)) + 0j)
    total = 0.0
    block = max(1, (1 << 21) // k.size)
    for start in range(0, k.size, block):
        sl = slice(start, start + block)
        kern = (root[sl, None] - root[None, :]) ** 2
        if kernel_width:
            x = kernel_width * (k2[sl, None] - k2[None, :])
            with np.errstate(invalid="ignore", divide="ignore"):
                sinc = np.where(x == 0, 1.0, np.sin(x) / x)
            kern = kern * sinc
        if one_sided:
            total += float(np.sum(vec[:, sl] * (vec @ kern.T)))
        else:
            total += (a[sl] @ kern @ np.conj(a)).real
    return float(hbar / (4 * math.pi * m) * total)


def discrepancy(state, T, params: Optional[PhysicalParams] = None, route: str = "direct",
                X: float = 0.0, r: Optional[Regulator] = None):
    """d_X(T) = j_X(T) - (pi_plus(T; X) - pi_minus(T; X)).

    ``route="direct"`` subtracts the two computed quantities; ``route="double"``
    evaluates the equivalent double integral over k, k' of the translated state.
    """
    _params(state, params)
    if route == "direct":
        j = current_density(state, X, T)
        plus, minus, _ = arrival_density(as_state(state), T, X, r)
        d = j - (plus - minus)
        return d if np.ndim(d) else float(d)
    if route == "double":
        st = _translated(state, X)
        vals = [_double_integral(st, float(t)) for t in np.atleast_1d(T)]
        return float(vals[0]) if np.ndim(T) == 0 else np.array(vals).reshape(np.shape(T))
    raise ValueError(f"unknown route {route!r}")


def smoothed_discrepancy(state, T, deltaT: float, params: Optional[PhysicalParams] = None,
                         route: str = "sinc", X: float = 0.0, r: Optional[Regulator] = None,
                         n_avg: int = 2001):
    """Window average (1/2 dT) integral_{T-dT}^{T+dT} d_X(T') dT'.

    ``route="sinc"`` uses the double integral with the sinc kernel;
    ``route="average"`` integrates the direct discrepancy over the window
    with Simpson's rule on ``n_avg`` points.
    """
    _params(state, params)
    if not deltaT >= 0:
        raise ValueError("deltaT must be non-negative")
    if deltaT == 0:
        return discrepancy(state, T, route="direct", X=X, r=r)
    if route == "sinc":
        st = _translated(state, X)
        hbar, m = st.params.hbar, st.params.mass
        t_abs = float(np.max(np.abs(np.atleast_1d(T))))
        phase = st.grid.step * hbar * (t_abs + deltaT) * st.support_k_max() / m
        if phase > PHASE_LIMIT:
            raise PhaseUnderresolved(
                f"grid step {st.grid.step:.4g} gives {phase:.3g} rad per node for the sinc kernel")
        width = hbar * deltaT / (2 * m)
        vals = [_double_integral(st, float(t), width) for t in np.atleast_1d(T)]
        return float(vals[0]) if np.ndim(T) == 0 else np.array(vals).reshape(np.shape(T))
    if route == "average":
        vals = []
        for t in np.atleast_1d(T):
            tt = np.linspace(t - deltaT, t + deltaT, n_avg)
            d = discrepancy(state, tt, route="direct", X=X, r=r)
            vals.append(simpson(d, x=tt) / (2 * deltaT))
        return float(vals[0]) if np.ndim(T) == 0 else np.array(vals).reshape(np.shape(T))
    raise ValueError(f"unknown route {route!r}")


def running_average(T: np.ndarray, values: np.ndarray, deltaT: float, query: np.ndarray) -> np.ndarray:
    """Window averages of tabulated values via the cumulative trapezoid integral."""
    cum = cumulative_trapezoid(values, T, initial=0.0)
    hi = np.interp(query + deltaT, T, cum)
    lo = np.interp(query - deltaT, T, cum)
    return (hi - lo) / (2 * deltaT)


@dataclass(frozen=True, eq=False)
class CurrentComparison:
    """Current, arrival densities and their discrepancy on a time grid."""

    X: float
    T_grid: np.ndarray
    j: np.ndarray
    pi_plus: np.ndarray
    pi_minus: np.ndarray
    d: np.ndarray
    dP_smoothed: Optional[np.ndarray] = None
    window: Optional[float] = None

    def __post_init__(self):
        n = len(self.T_grid)
        for name in ("j", "pi_plus", "pi_minus", "d"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has the wrong length")
        if (self.dP_smoothed is None) != (self.window is None):
            raise ValueError("dP_smoothed is present exactly when a window is given")
        if self.dP_smoothed is not None and len(self.dP_smoothed) != n:
            raise ValueError("dP_smoothed has the wrong length")

    @property
    def pi_diff(self) -> np.ndarray:
        return self.pi_plus - self.pi_minus

    def max_relative_gap(self) -> float:
        """max |j - (pi_plus - pi_minus)| / max pi_plus."""
        return float(np.max(np.abs(self.d)) / np.max(self.pi_plus))


def compare_current(state, X: float, T_grid, window: Optional[float] = None,
                    r: Optional[Regulator] = None, step: Optional[float] = None,
                    grid_state: Optional[MomentumState] = None) -> CurrentComparison:
    """Tabulate j, pi_plus, pi_minus and d on ``T_grid``.

    The current comes from ``state`` and the arrival densities from
    ``grid_state`` (default: ``state`` on its default grid). With ``window``
    the smoothed discrepancy is added, averaged over [T - window, T + window]
    from d tabulated on a grid of spacing ``step`` (default: a fifth of the
    narrower of the output spacing and the window).
    """
    T_grid = np.asarray(T_grid, dtype=float)
    grid_state = grid_state if grid_state is not None else as_state(state)
    j = np.asarray(current_density(state, X, T_grid), dtype=float).reshape(T_grid.shape)
    plus, minus, _ = arrival_density(grid_state, T_grid, X, r)
    d = j - (plus - minus)
    dP = None
    if window is not None:
        if window < 0:
            raise ValueError("window must be non-negative")
        if window == 0:
            dP = d.copy()
        else:
            spacing = np.min(np.diff(T_grid)) if T_grid.size > 1 else window
            h = step or min(spacing, window) / 5
            lo, hi = T_grid.min() - window, T_grid.max() + window
            fine = np.linspace(lo, hi, int(math.ceil((hi - lo) / h)) + 1)
            plus_f, minus_f, _ = arrival_density(grid_state, fine, X, r)
            d_fine = current_density(state, X, fine) - (plus_f - minus_f)
            dP = running_average(fine, d_fine, window, T_grid)
    return CurrentComparison(X, T_grid, j, plus, minus, d, dP, window)
