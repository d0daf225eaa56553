"""Physical parameters, momentum grids, state containers and Gaussian packets.

Conventions
-----------
States are Heisenberg-picture momentum amplitudes psi(k) with
``x0 -> i d/dk`` and ``p0 -> hbar k``. The Schroedinger wavefunction at time
``t`` is recovered as

    psi(x, t) = (2 pi)^(-1/2) * integral dk psi(k) exp(i k x - i hbar k^2 t / 2m).

Default units are hbar = m = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy.special import erfc

from .errors import GridTooNarrow, NotNormalized

NORM_TOLERANCE = 1e-6
# Amplitudes below this fraction of the peak count as outside the support.
SUPPORT_THRESHOLD = 1e-12

# Points per synthesis block; bounds the (points x nodes) work matrix.
_BLOCK = 1 << 21


@dataclass(frozen=True)
class PhysicalParams:
    """Planck constant, particle mass and regulator scale epsilon (1/length)."""

    hbar: float = 1.0
    mass: float = 1.0
    epsilon: float = 1e-3

    def __post_init__(self):
        for name in ("hbar", "mass", "epsilon"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for ``n`` equally spaced nodes.

    For even ``n`` the last interval is closed with the three-point
    end correction ``h * (-1, 8, 5) / 12``.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if n == 2:
        return np.array([0.5 * h, 0.5 * h])
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 1
    w[0:m:2] = 2.0
    w[1:m:2] = 4.0
    w[0] = w[m - 1] = 1.0
    w[:m] *= h / 3.0
    if m != n:
        w[n - 3] += -h / 12.0
        w[n - 2] += 8.0 * h / 12.0
        w[n - 1] += 5.0 * h / 12.0
    return w


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    """Uniform momentum grid ``k_min .. k_max`` with ``n`` nodes."""

    k_min: float
    k_max: float
    n: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.k_min < self.k_max:
            raise ValueError(f"k_min must be < k_max, got {self.k_min} >= {self.k_max}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        nodes = np.linspace(self.k_min, self.k_max, self.n)
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def step(self) -> float:
        return (self.k_max - self.k_min) / (self.n - 1)

    def weights(self) -> np.ndarray:
        return simpson_weights(self.n, self.step)

    def integrate(self, values: np.ndarray) -> complex:
        return np.dot(self.weights(), values)


@dataclass(frozen=True, eq=False)
class MomentumState:
    """Complex amplitude psi(k) sampled on a :class:`MomentumGrid`.

    ``amplitude`` optionally holds the exact function the samples were taken
    from (already rescaled by the grid normalization); the dense-quadrature
    oracle uses it to evaluate psi off the grid. The state is zero outside
    ``[grid.k_min, grid.k_max]``.
    """

    grid: MomentumGrid
    psi: np.ndarray
    params: PhysicalParams = PhysicalParams()
    amplitude: Optional[Callable[[np.ndarray], np.ndarray]] = None
    truncation_mass: float = 0.0

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.shape != (self.grid.n,):
            raise ValueError(f"psi has shape {psi.shape}, grid has {self.grid.n} nodes")
        if not np.all(np.isfinite(psi)):
            raise ValueError("psi contains non-finite amplitudes")
        psi.flags.writeable = False
        object.__setattr__(self, "psi", psi)
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NotNormalized(f"state norm is {norm:.12g}, expected 1 within {NORM_TOLERANCE:g}")

    @classmethod
    def from_function(cls, fn, grid: MomentumGrid, params: PhysicalParams = PhysicalParams(),
                      normalize: bool = True, truncation_mass: float = 0.0) -> "MomentumState":
        """Sample ``fn`` on ``grid``; rescale to unit norm when ``normalize``."""
        samples = np.asarray(fn(grid.nodes), dtype=complex)
        scale = 1.0
        if normalize:
            norm = float(np.dot(grid.weights(), np.abs(samples) ** 2))
            if norm <= 0:
                raise NotNormalized("cannot normalize a state with zero norm on the grid")
            scale = 1.0 / math.sqrt(norm)

        def exact(k, _fn=fn, _scale=scale):
            return _scale * np.asarray(_fn(np.asarray(k, dtype=float)), dtype=complex)

        return cls(grid, samples * scale, params, exact, truncation_mass)

    @property
    def k(self) -> np.ndarray:
        return self.grid.nodes

    def norm(self) -> float:
        return float(np.dot(self.grid.weights(), np.abs(self.psi) ** 2))

    def expectation(self, values: np.ndarray) -> float:
        """Integral of ``values * |psi|^2`` over the grid."""
        return float(np.real(np.dot(self.grid.weights(), values * np.abs(self.psi) ** 2)))

    def mass(self, sign: int) -> float:
        """Probability carried by ``sign * k > 0``."""
        return self.expectation((sign * self.k > 0).astype(float))

    def support_k_max(self, rel: float = SUPPORT_THRESHOLD) -> float:
        """Largest |k| at which |psi| is at least ``rel`` times its maximum."""
        mag = np.abs(self.psi)
        keep = mag >= rel * mag.max()
        return float(np.max(np.abs(self.k[keep])))

    def mean_k(self) -> float:
        return self.expectation(self.k)

    def spread_k(self) -> float:
        mean = self.mean_k()
        return math.sqrt(max(self.expectation((self.k - mean) ** 2), 0.0))

    def dpsi(self) -> np.ndarray:
        """dpsi/dk at the nodes: Richardson-refined central differences of the
        exact amplitude when known, else fourth-order differences of the samples."""
        if self.amplitude is not None:
            return richardson_derivative(self.amplitude, self.k, 4 * self.grid.step)
        return _derivative(self.psi, self.grid.step)

    def mean_x0(self) -> float:
        """<x0> = integral conj(psi) i dpsi/dk."""
        dpsi = self.dpsi()
        return float(np.real(np.dot(self.grid.weights(), np.conj(self.psi) * 1j * dpsi)))

    def spread_x(self, t: float = 0.0) -> float:
        """Position spread at time ``t`` from the momentum-space operator x(t)."""
        c = self.params.hbar * t / self.params.mass
        xpsi = 1j * self.dpsi() + c * self.k * self.psi
        w = self.grid.weights()
        mean = float(np.real(np.dot(w, np.conj(self.psi) * xpsi)))
        second = float(np.real(np.dot(w, np.abs(xpsi) ** 2)))
        return math.sqrt(max(second - mean * mean, 0.0))

    def translated(self, X: float) -> "MomentumState":
        """State multiplied by exp(i k X): a detector at X becomes a detector at 0."""
        phase = np.exp(1j * self.k * X)
        exact = None
        if self.amplitude is not None:
            def exact(k, _f=self.amplitude):
                k = np.asarray(k, dtype=float)
                return _f(k) * np.exp(1j * k * X)
        return MomentumState(self.grid, self.psi * phase, self.params, exact, self.truncation_mass)

    def wavefunction(self, x, t) -> np.ndarray:
        """psi(x, t) by Fourier synthesis on the grid."""
        return _synthesize(self, x, t, derivative=False)

    def wavefunction_dx(self, x, t) -> np.ndarray:
        """d psi / dx by spectral differentiation (multiplier i k)."""
        return _synthesize(self, x, t, derivative=True)


def richardson_derivative(f, k: np.ndarray, h0: float, levels: int = 6) -> np.ndarray:
    """Central differences of ``f`` at h0, h0/2, ... with Richardson extrapolation."""
    table = []
    h = h0
    for j in range(levels):
        row = [(f(k + h) - f(k - h)) / (2 * h)]
        for m in range(1, j + 1):
            factor = 4.0 ** m
            row.append((factor * row[m - 1] - table[j - 1][m - 1]) / (factor - 1))
        table.append(row)
        if j > 0 and np.max(np.abs(row[-1] - table[j - 1][-1])) <= 1e-12 * np.max(np.abs(row[-1])):
            break
        h *= 0.5
    return table[-1][-1]


def _derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order centered differences, second order at the two edge pairs."""
    d = np.gradient(values, h, edge_order=2)
    if values.size >= 5:
        d[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)
    return d


def _synthesize(state: MomentumState, x, t, derivative: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(x.shape, t.shape)
    xs = np.broadcast_to(x, shape).ravel()
    ts = np.broadcast_to(t, shape).ravel()
    k = state.k
    coef = state.grid.weights() * state.psi / math.sqrt(2 * math.pi)
    if derivative:
        coef = coef * 1j * k
    c = state.params.hbar / (2 * state.params.mass)
    out = np.empty(xs.size, dtype=complex)
    block = max(1, _BLOCK // k.size)
    for start in range(0, xs.size, block):
        sl = slice(start, start + block)
        phase = np.outer(xs[sl], k) - np.outer(ts[sl], c * k * k)
        out[sl] = np.exp(1j * phase) @ coef
    return out.reshape(shape)


class Never(enum.Enum):
    """Arrival-time outcome for a particle that never reaches the detector."""

    NEVER = "never"

    def __repr__(self):
        return "NEVER"


NEVER = Never.NEVER
ArrivalTime = Union[float, Never]


def is_detected(t: ArrivalTime) -> bool:
    return t is not NEVER


@dataclass(frozen=True)
class ClassicalState:
    x0: float
    p0: float


def classical_arrival_time(s: ClassicalState, X: float,
                           params: PhysicalParams = PhysicalParams()) -> ArrivalTime:
    """Time at which the free trajectory x0 + p0 t / m passes X.

    Returns :data:`NEVER` for a particle at rest away from the detector.
    """
    if s.p0 == 0:
        return 0.0 if X == s.x0 else NEVER
    return params.mass * (X - s.x0) / s.p0


@dataclass(frozen=True)
class GaussianPacket:
    """Free Gaussian packet centred at x0 with mean wavenumber k0 and width delta.

    The closed forms assume nothing about the regime, but the packet only
    describes a well localized particle with a definite direction of motion
    when ``|x0| >> delta`` and ``|k0| delta >> 1`` (see :attr:`well_localized`).
    """

    x0: float
    k0: float
    delta: float
    params: PhysicalParams = PhysicalParams()

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        if not (math.isfinite(self.x0) and math.isfinite(self.k0)):
            raise ValueError("x0 and k0 must be finite")

    @property
    def well_localized(self) -> bool:
        return abs(self.x0) >= 5 * self.delta and abs(self.k0) * self.delta >= 5

    def momentum_amplitude(self, k):
        return gaussian_momentum_amplitude(self, k)

    def wavefunction(self, x, t):
        return gaussian_position_wavefunction(self, x, t)

    def wavefunction_dx(self, x, t):
        return gaussian_position_derivative(self, x, t)

    def moments(self, t: float = 0.0) -> "Moments":
        return gaussian_moments(self, t)


def gaussian_momentum_amplitude(p: GaussianPacket, k):
    """(2 delta^2/pi)^(1/4) exp(-(k-k0)^2 delta^2 - i k x0)."""
    k = np.asarray(k, dtype=float)
    d2 = p.delta ** 2
    return (2 * d2 / math.pi) ** 0.25 * np.exp(-((k - p.k0) ** 2) * d2 - 1j * k * p.x0)


def _gaussian_xt(p: GaussianPacket, x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    d2 = p.delta ** 2
    a = d2 + 0.5j * p.params.hbar * t / p.params.mass
    b = 2 * d2 * p.k0 + 1j * (x - p.x0)
    # exp(-k0^2 d^2) is folded into the exponent so large k0*delta cannot overflow.
    psi = (d2 / (2 * math.pi)) ** 0.25 / np.sqrt(a) * np.exp(b * b / (4 * a) - p.k0 ** 2 * d2)
    return psi, a, b


def gaussian_position_wavefunction(p: GaussianPacket, x, t):
    """Closed-form Schroedinger wavefunction psi(x, t) of the packet."""
    return _gaussian_xt(p, x, t)[0]


def gaussian_position_derivative(p: GaussianPacket, x, t):
    psi, a, b = _gaussian_xt(p, x, t)
    return psi * 1j * b / (2 * a)


class Moments(NamedTuple):
    mean_x: float
    mean_p: float
    spread_x: float
    spread_p: float


def gaussian_moments(p: GaussianPacket, t: float = 0.0) -> Moments:
    hbar, m, d = p.params.hbar, p.params.mass, p.delta
    return Moments(
        mean_x=p.x0 + hbar * p.k0 * t / m,
        mean_p=hbar * p.k0,
        spread_x=d * math.sqrt(1 + t * t * hbar * hbar / (4 * d ** 4 * m * m)),
        spread_p=hbar / (2 * d),
    )


def _outside_mass(p: GaussianPacket, k_min: float, k_max: float) -> float:
    s = math.sqrt(2) * p.delta
    return 0.5 * float(erfc(s * (p.k0 - k_min))) + 0.5 * float(erfc(s * (k_max - p.k0)))


def discretize(p: GaussianPacket, grid: MomentumGrid) -> MomentumState:
    """Sample the packet on ``grid`` and renormalize there.

    The grid has to reach at least 6/delta to either side of k0; 8/delta
    is recommended. The probability left outside the grid is recorded as
    ``truncation_mass``.
    """
    reach = 6.0 / p.delta
    if grid.k_min > p.k0 - reach or grid.k_max < p.k0 + reach:
        raise GridTooNarrow(
            f"grid [{grid.k_min:g}, {grid.k_max:g}] does not cover k0 +/- 6/delta = "
            f"[{p.k0 - reach:g}, {p.k0 + reach:g}]")
    return MomentumState.from_function(
        p.momentum_amplitude, grid, p.params,
        truncation_mass=_outside_mass(p, grid.k_min, grid.k_max))


def default_grid(p: GaussianPacket, n: int = 4096, reach: float = 8.0) -> MomentumGrid:
    """Grid over k0 +/- reach/delta, clipped at epsilon for clearly right-moving packets."""
    lo = p.k0 - reach / p.delta
    hi = p.k0 + reach / p.delta
    if p.k0 - 6.0 / p.delta > p.params.epsilon:
        lo = max(lo, p.params.epsilon)
    return MomentumGrid(lo, hi, n)


def as_state(obj, n: int = 4096) -> MomentumState:
    """Return ``obj`` as a :class:`MomentumState`, discretizing packets on their default grid."""
    if isinstance(obj, MomentumState):
        return obj
    if isinstance(obj, GaussianPacket):
        return discretize(obj, default_grid(obj, n))
    raise TypeError(f"expected MomentumState or GaussianPacket, got {type(obj).__name__}")
