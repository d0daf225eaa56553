"""Regulated time-of-arrival eigenstates, projections and arrival densities.

The regulated operator replaces 1/k by a bounded odd function f_eps. Its
eigenstates for eigenvalue T and detector X are, on each half-line,

    g(k) = sqrt(hbar / 2 pi m) * (1/f_eps(k))^(1/2) * exp(i hbar T Z(k) / m) * exp(-i k X)

with Z(k) the integral of 1/f_eps from sign*eps to k and the principal square
root (so the negative half-line carries a factor i). The amplitude for arrival
at time T is the inner product of g with the state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .core import SUPPORT_THRESHOLD, MomentumState, PhysicalParams, as_state, simpson_weights
from .errors import CoincidentEigenvalues, NonpositiveMomentum, PhaseUnderresolved, WrongHalfLine

PHASE_LIMIT = 0.5
# Inner region |k| < eps in v = ln(|k|/eps): depth of the v range and panel width.
INNER_DEPTH = 80.0
INNER_PANEL = 2.0
# Largest phase change of an inner eigenstate across one 16-point panel.
INNER_PHASE_LIMIT = 10.0
# Grid steps above max(eps, 0) handled in s = sqrt(|k|), where sqrt(|k|) is not smooth enough for Simpson.
EDGE_STEPS = 64
_BLOCK = 1 << 21
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class RegulatorKind(enum.Enum):
    PIECEWISE_LINEAR = "piecewise_linear"


@dataclass(frozen=True)
class Regulator:
    """f_eps(k) = 1/k outside [-eps, eps] and k/eps^2 inside."""

    epsilon: float = 1e-3
    kind: RegulatorKind = RegulatorKind.PIECEWISE_LINEAR

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if self.kind is not RegulatorKind.PIECEWISE_LINEAR:
            raise ValueError(f"unsupported regulator kind {self.kind!r}")

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "Regulator":
        return cls(params.epsilon)


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def regulator_value(r: Regulator, k):
    k = np.asarray(k, dtype=float)
    eps = r.epsilon
    outside = np.abs(k) > eps
    safe = np.where(outside, k, 1.0)
    out = np.where(outside, 1.0 / safe, k / eps ** 2)
    return out if out.ndim else float(out)


def _z_unchecked(eps: float, k: np.ndarray) -> np.ndarray:
    ak = np.abs(k)
    inner = ak < eps
    safe = np.where(inner, np.maximum(ak, np.finfo(float).tiny), eps)
    return np.where(inner, eps ** 2 * np.log(safe / eps), 0.5 * (k * k - eps ** 2))


def z_coordinate(r: Regulator, sign, k):
    """Z(k) = integral from sign*eps to k of dk'/f_eps(k') on the sign's half-line."""
    s = _sign(sign)
    k = np.asarray(k, dtype=float)
    if np.any(s * k <= 0):
        raise WrongHalfLine(f"z_coordinate with sign {s:+d} needs sign*k > 0")
    out = _z_unchecked(r.epsilon, k)
    return out if out.ndim else float(out)


def _sqrt_inverse_regulator(eps: float, k: np.ndarray) -> np.ndarray:
    """Principal square root of 1/f_eps; i*sqrt(|1/f|) on k < 0, zero at k = 0."""
    ak = np.abs(k)
    mag = np.where(ak > eps, np.sqrt(ak), eps / np.sqrt(np.where(ak > 0, ak, 1.0)))
    mag = np.where(ak > 0, mag, 0.0)
    return np.where(k < 0, 1j * mag, mag + 0j)


@dataclass(frozen=True)
class ToaEigenstate:
    """Eigenstate |T, sign; X> of the regulated operator."""

    T: float
    sign: int = 1
    X: float = 0.0
    epsilon: float = 1e-3
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sign", _sign(self.sign))
        Regulator(self.epsilon)

    @classmethod
    def of(cls, T, sign, X, r: Regulator, params: PhysicalParams = PhysicalParams()):
        return cls(T, sign, X, r.epsilon, params.hbar, params.mass)

    @property
    def regulator(self) -> Regulator:
        return Regulator(self.epsilon)

    def __call__(self, k):
        return eigenstate_value(self, k)


def eigenstate_value(e: ToaEigenstate, k):
    k = np.asarray(k, dtype=float)
    support = e.sign * k > 0
    ks = np.where(support, k, e.sign * 1.0)
    z = _z_unchecked(e.epsilon, ks)
    phase = e.hbar * e.T * z / e.mass - ks * e.X
    val = (math.sqrt(e.hbar / (2 * math.pi * e.mass))
           * _sqrt_inverse_regulator(e.epsilon, ks) * np.exp(1j * phase))
    out = np.where(support, val, 0j)
    return out if out.ndim else complex(out)


def unregulated_overlap_defect(T, T_prime) -> complex:
    """Non-delta part -i / (pi (T - T')) of <T|T'> for the unregulated operator."""
    if T == T_prime:
        raise CoincidentEigenvalues("the overlap defect needs T != T'")
    return -1j / (math.pi * (T - T_prime))


# ---------------------------------------------------------------------------
# projections


@dataclass(frozen=True, eq=False)
class _HalfLineRule:
    """T-independent pieces of the projection integral on one half-line.

    amplitude(T) = pref * (exp(i hbar T eps^2 / 2m) * sum(c_out * exp(-i hbar T u / m))
                          + sum(c_in * exp(-i hbar T z_in / m)))
    """

    u: np.ndarray
    c_out: np.ndarray
    z_in: np.ndarray
    c_in: np.ndarray
    k_max: float
    step: float


def interpolate_amplitude(state: MomentumState, k: np.ndarray) -> np.ndarray:
    """psi off the grid: the exact amplitude when known, else a cubic spline."""
    if state.amplitude is not None:
        return np.asarray(state.amplitude(k), dtype=complex)
    g = state.grid
    re = CubicSpline(g.nodes, state.psi.real)(k)
    im = CubicSpline(g.nodes, state.psi.imag)(k)
    return re + 1j * im


def gauss_legendre(lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """16-point Gauss-Legendre nodes and weights on [lo, hi]."""
    half = 0.5 * (hi - lo)
    return lo + half * (_GL_NODES + 1), half * _GL_WEIGHTS


def inner_nodes(lo: float, hi: float, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes q in (lo, hi] within (0, eps] and weights for dq.

    q = eps e^v makes the phase of the inner eigenstates linear in v and the
    weight dq = q dv decay exponentially toward q = 0.
    """
    v_hi = math.log(hi / eps)
    v_lo = math.log(lo / eps) if lo > 0 else v_hi - INNER_DEPTH
    n = max(1, int(math.ceil((v_hi - v_lo) / INNER_PANEL)))
    edges = np.linspace(v_lo, v_hi, n + 1)
    v = np.concatenate([gauss_legendre(a, b)[0] for a, b in zip(edges[:-1], edges[1:])])
    w = np.concatenate([gauss_legendre(a, b)[1] for a, b in zip(edges[:-1], edges[1:])])
    q = eps * np.exp(v)
    return q, w * q


def edge_nodes(lo: float, hi: float, step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes q in [lo, hi] and dq weights, composite Gauss-Legendre in s = sqrt(q).

    Panels are uniform in s and no wider than about two grid steps in q.
    """
    s_lo, s_hi = math.sqrt(lo), math.sqrt(hi)
    n = max(4, int(math.ceil((hi - lo) / step)))
    edges = np.linspace(s_lo, s_hi, n + 1)
    parts = [gauss_legendre(a, b) for a, b in zip(edges[:-1], edges[1:])]
    sn = np.concatenate([p[0] for p in parts])
    w = np.concatenate([p[1] for p in parts])
    return sn * sn, 2 * sn * w


def _half_line_rule(state: MomentumState, sign: int, X: float, r: Regulator) -> _HalfLineRule:
    eps = r.epsilon
    g = state.grid
    # Work in q = sign * k so that the half-line is q > 0.
    q = sign * g.nodes
    psi = state.psi
    if sign < 0:
        q, psi = q[::-1], psi[::-1]
    q_lo, q_hi = q[0], q[-1]

    out_q, out_w, out_psi = [], [], []
    if q_hi > eps:
        i0 = int(np.searchsorted(q, max(eps, EDGE_STEPS * g.step), side="left"))
        count = q.size - i0
        if count >= 2:
            out_q.append(q[i0:])
            out_w.append(simpson_weights(count, g.step))
            out_psi.append(psi[i0:])
        start = max(eps, q_lo)
        stop = q[i0] if count >= 2 else q_hi
        if stop > start:
            nodes, w = edge_nodes(start, stop, g.step)
            out_q.append(nodes)
            out_w.append(w)
            out_psi.append(interpolate_amplitude(state, sign * nodes))
    in_q, in_w, in_psi = [], [], []
    lo, hi = max(0.0, q_lo), min(eps, q_hi)
    if hi > lo:
        qn, wn = inner_nodes(lo, hi, eps)
        in_q.append(qn)
        in_w.append(wn)
        in_psi.append(interpolate_amplitude(state, sign * qn))

    def cat(parts):
        return np.concatenate(parts) if parts else np.zeros(0)

    qo, wo, po = cat(out_q), cat(out_w), cat(out_psi)
    qi, wi, pi_ = cat(in_q), cat(in_w), cat(in_psi)
    ko, ki = sign * qo, sign * qi
    mag = np.abs(po)
    live = mag >= SUPPORT_THRESHOLD * np.abs(state.psi).max()
    c_out = wo * np.conj(_sqrt_inverse_regulator(eps, ko)) * po * np.exp(1j * ko * X)
    c_in = wi * np.conj(_sqrt_inverse_regulator(eps, ki)) * pi_ * np.exp(1j * ki * X)
    return _HalfLineRule(
        u=0.5 * qo * qo, c_out=c_out, z_in=_z_unchecked(eps, ki), c_in=c_in,
        k_max=float(qo[live].max()) if np.any(live) else 0.0, step=g.step)


def _check_phase(rule: _HalfLineRule, T: np.ndarray, eps: float, params: PhysicalParams):
    if T.size == 0:
        return
    t_abs = float(np.max(np.abs(T)))
    if rule.z_in.size:
        inner = INNER_PANEL * params.hbar * t_abs * eps ** 2 / params.mass
        if inner > INNER_PHASE_LIMIT:
            raise PhaseUnderresolved(
                f"inner eigenstates turn {inner:.3g} rad per panel at |T|={t_abs:g}, eps={eps:g} "
                f"(limit {INNER_PHASE_LIMIT})")
    if rule.u.size == 0:
        return
    phase = rule.step * params.hbar * t_abs * rule.k_max / params.mass
    if phase > PHASE_LIMIT:
        raise PhaseUnderresolved(
            f"grid step {rule.step:.4g} gives {phase:.3g} rad per node at |T|={t_abs:g}, "
            f"k_max={rule.k_max:g} (limit {PHASE_LIMIT}); refine the momentum grid")


def _evaluate(rule: _HalfLineRule, T: np.ndarray, r: Regulator, params: PhysicalParams) -> np.ndarray:
    c = params.hbar / params.mass
    out = np.zeros(T.size, dtype=complex)
    if rule.u.size:
        block = max(1, _BLOCK // rule.u.size)
        for start in range(0, T.size, block):
            t = T[start:start + block]
            out[start:start + block] = np.exp(-1j * c * np.outer(t, rule.u)) @ rule.c_out
        out *= np.exp(0.5j * c * T * r.epsilon ** 2)
    if rule.z_in.size:
        out += np.exp(-1j * c * np.outer(T, rule.z_in)) @ rule.c_in
    return out * math.sqrt(params.hbar / (2 * math.pi * params.mass))


def project(state, T, sign, X: float = 0.0, r: Optional[Regulator] = None):
    """<T, sign; X | psi>; ``T`` may be a scalar or an array.

    Raises PhaseUnderresolved when the grid step violates the phase guard
    step * hbar * |T| * k_max / m <= 0.5, with k_max the largest |k| on the
    sign's half-line where |psi| is not negligible.
    """
    state = as_state(state)
    params = state.params
    r = r or Regulator.from_params(params)
    s = _sign(sign)
    T_arr = np.atleast_1d(np.asarray(T, dtype=float))
    rule = _half_line_rule(state, s, X, r)
    _check_phase(rule, T_arr, r.epsilon, params)
    amp = _evaluate(rule, T_arr.ravel(), r, params).reshape(T_arr.shape)
    return complex(amp[0]) if np.ndim(T) == 0 else amp.reshape(np.shape(T))


def arrival_density(state, T, X: float = 0.0, r: Optional[Regulator] = None):
    """(pi_plus, pi_minus, pi_total) at time(s) ``T`` for a detector at ``X``."""
    plus = np.abs(project(state, T, 1, X, r)) ** 2
    minus = np.abs(project(state, T, -1, X, r)) ** 2
    return plus, minus, plus + minus


@dataclass(frozen=True, eq=False)
class ArrivalDensity:
    """Arrival densities sampled on an ordered time grid for one detector."""

    X: float
    T: np.ndarray
    pi_plus: np.ndarray
    pi_minus: np.ndarray
    pi_total: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("T", "pi_plus", "pi_minus"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.T.shape == self.pi_plus.shape == self.pi_minus.shape):
            raise ValueError("T, pi_plus and pi_minus must have equal shapes")
        object.__setattr__(self, "pi_total", self.pi_plus + self.pi_minus)

    @property
    def rows(self):
        return list(zip(self.T.tolist(), self.pi_plus.tolist(),
                        self.pi_minus.tolist(), self.pi_total.tolist()))

    def _integral(self, y) -> float:
        if self.T.size < 2:
            return 0.0
        return float(simpson(y, x=self.T))

    def total(self) -> float:
        return self._integral(self.pi_total)

    def peak_time(self) -> float:
        return float(self.T[int(np.argmax(self.pi_total))])

    def mean(self) -> float:
        return self._integral(self.T * self.pi_total) / self.total()

    def std(self) -> float:
        mu = self.mean()
        var = self._integral((self.T - mu) ** 2 * self.pi_total) / self.total()
        return math.sqrt(max(var, 0.0))


def density_sweep(state, T_grid, X: float = 0.0, r: Optional[Regulator] = None) -> ArrivalDensity:
    T_grid = np.asarray(T_grid, dtype=float)
    if np.any(np.diff(T_grid) < 0):
        raise ValueError("T_grid must be ordered")
    plus, minus, _ = arrival_density(state, T_grid, X, r)
    return ArrivalDensity(X, T_grid, plus, minus)


def total_arrival_probability(state, X: float = 0.0, r: Optional[Regulator] = None,
                              T_window: Tuple[float, float] = (-1.0, 2.0), n_t: int = 3001) -> float:
    """Integral of pi_total over ``T_window`` (Simpson on ``n_t`` points)."""
    t1, t2 = T_window
    if t2 < t1:
        raise ValueError("T_window must be ordered")
    if t1 == t2:
        return 0.0
    return density_sweep(state, np.linspace(t1, t2, n_t), X, r).total()


# ---------------------------------------------------------------------------
# Gram matrices


@dataclass(frozen=True)
class GramGrid:
    """Discretization of an overlap integral: Gaussian window width and node spacing.

    For the regulated operator both are measured in the Z coordinate; for the
    unregulated one the window acts on u = k^2/2 and the spacing is in k.
    """

    window: float = 10.0
    spacing: float = 0.05

    def refine(self) -> "GramGrid":
        return GramGrid(2 * self.window, 0.5 * self.spacing)


def _k_from_z(eps: float, sign: int, z: np.ndarray) -> np.ndarray:
    q = np.where(z >= 0, np.sqrt(2 * np.maximum(z, 0) + eps ** 2),
                 eps * np.exp(np.minimum(z, 0) / eps ** 2))
    return sign * q


def gram_matrix(r: Regulator, T_list: Sequence[float], sign=1, X: float = 0.0,
                grid: GramGrid = GramGrid(), other_sign=None,
                params: PhysicalParams = PhysicalParams()) -> np.ndarray:
    """Discretized overlaps <T_a, sign; X | T_b, other_sign; X>.

    Nodes are uniform in Z on [-6w, 6w] (w the window width), mapped back to
    k, with weight dZ * |f_eps(k)| * exp(-(Z/w)^2). The window turns
    delta(T - T') into a Gaussian of width 2/w, so off-diagonal entries vanish
    under refinement. Opposite signs have disjoint supports and give zero.
    """
    T_list = np.asarray(T_list, dtype=float)
    if np.unique(T_list).size != T_list.size:
        raise CoincidentEigenvalues("T_list entries must be distinct")
    s = _sign(sign)
    s2 = s if other_sign is None else _sign(other_sign)
    eps = r.epsilon
    if 6 * grid.window / eps ** 2 > 700:
        raise ValueError("window too wide for this epsilon: inner nodes underflow")
    n = int(round(12 * grid.window / grid.spacing)) + 1
    z = np.linspace(-6 * grid.window, 6 * grid.window, n)
    k = _k_from_z(eps, s, z)
    w = grid.spacing * np.abs(regulator_value(r, k)) * np.exp(-(z / grid.window) ** 2)
    w[0] *= 0.5
    w[-1] *= 0.5
    rows = np.array([eigenstate_value(ToaEigenstate.of(T, s, X, r, params), k) for T in T_list])
    cols = np.array([eigenstate_value(ToaEigenstate.of(T, s2, X, r, params), k) for T in T_list])
    return (np.conj(rows) * w) @ cols.T


def unregulated_eigenstate_value(T: float, X: float, k, params: PhysicalParams = PhysicalParams()):
    """Eigenstate of the unregulated operator, sqrt(hbar k / 2 pi m) exp(i hbar T k^2/2m - i k X).

    The square root is principal (i sqrt|k| for k < 0) and the left half-line
    coefficient is i times the right one, so that the eigenvalue
    relation holds across k = 0.
    """
    k = np.asarray(k, dtype=float)
    root = np.where(k < 0, 1j * np.sqrt(np.abs(k)), np.sqrt(np.abs(k)) + 0j)
    alpha = np.where(k < 0, 1j, 1.0)
    return (math.sqrt(params.hbar / (2 * math.pi * params.mass)) * alpha * root
            * np.exp(1j * (params.hbar * T * k * k / (2 * params.mass) - k * X)))


def unregulated_gram(T_list: Sequence[float], grid: GramGrid = GramGrid(600.0, 0.005),
                     X: float = 0.0, params: PhysicalParams = PhysicalParams()) -> np.ndarray:
    """Windowed overlaps of unregulated eigenstates on a uniform k grid.

    The window exp(-(u/w)^2), u = k^2/2, makes the integral finite; the grid
    spans |k| <= sqrt(12 w). Off-diagonal entries approach -i/(pi (T_a - T_b))
    with a relative correction of order 1/(w (T_a - T_b))^2.
    """
    T_list = np.asarray(T_list, dtype=float)
    k_edge = math.sqrt(12 * grid.window)
    n = 2 * int(math.ceil(k_edge / grid.spacing)) + 1
    k = np.linspace(-k_edge, k_edge, n)
    w = simpson_weights(n, k[1] - k[0]) * np.exp(-(0.5 * k * k / grid.window) ** 2)
    g = np.array([unregulated_eigenstate_value(T, X, k, params) for T in T_list])
    return (np.conj(g) * w) @ g.T


# ---------------------------------------------------------------------------
# time representation


def momentum_position_overlap(k, x: float, t: float, params: PhysicalParams = PhysicalParams()):
    """<k | x, t> = sqrt(hbar / 2 pi) exp(i hbar t k^2 / 2m - i k x)."""
    k = np.asarray(k, dtype=float)
    val = math.sqrt(params.hbar / (2 * math.pi)) * np.exp(
        1j * (params.hbar * t * k * k / (2 * params.mass) - k * x))
    return val if val.ndim else complex(val)


def time_rep_factor(k, params: PhysicalParams = PhysicalParams()):
    """sqrt(k/m), the factor relating TOA eigenstates to position eigenstates at time T."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise NonpositiveMomentum("time_rep_factor needs k > 0")
    val = np.sqrt(k / params.mass)
    return val if val.ndim else float(val)
