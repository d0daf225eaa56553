"""Command-line front end.

Subcommands: density, position-density, current-compare, uncertainty, validate.
Settings come from built-in defaults, then an optional JSON file (--config),
then flags. CSV numbers carry 17 significant digits; leading ``#`` lines hold
the resolved configuration.

Exit codes: 0 success, 1 a validate check failed, 2 bad configuration,
3 momentum grid too coarse for the requested times.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .core import GaussianPacket, MomentumGrid, MomentumState, PhysicalParams, default_grid, discretize
from .errors import PhaseUnderresolved, ToaError
from .spectral import Regulator, density_sweep

EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_PHASE = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    x0: float = -5.0
    k0: float = 20.0
    delta: float = 0.5
    hbar: float = 1.0
    mass: float = 1.0
    epsilon: float = 1e-3
    k_min: Optional[float] = None
    k_max: Optional[float] = None
    n_k: int = 4096
    t_min: float = -0.1
    t_max: float = 0.8
    n_t: int = 451
    detectors: Optional[List[float]] = None
    window: Optional[float] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n_x: int = 2001
    times: List[float] = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    state: Optional[dict] = None

    def validate(self):
        for name in ("x0", "k0", "delta", "hbar", "mass", "epsilon", "t_min", "t_max"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        for name in ("delta", "hbar", "mass", "epsilon"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("n_k", "n_t", "n_x"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be at least 2")
        if self.t_min > self.t_max:
            raise ConfigError("t_min must not exceed t_max")
        if (self.k_min is None) != (self.k_max is None):
            raise ConfigError("give both k_min and k_max or neither")
        if self.k_min is not None and not self.k_min < self.k_max:
            raise ConfigError("k_min must be below k_max")
        if self.x_min is not None and self.x_max is not None and not self.x_min < self.x_max:
            raise ConfigError("x_min must be below x_max")
        if self.detectors is not None and len(self.detectors) == 0:
            raise ConfigError("detectors must not be empty")
        if self.window is not None and not self.window >= 0:
            raise ConfigError("window must be non-negative")

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(self.hbar, self.mass, self.epsilon)

    @property
    def packet(self) -> GaussianPacket:
        return GaussianPacket(self.x0, self.k0, self.delta, self.params)

    def grid(self) -> MomentumGrid:
        if self.k_min is None:
            return default_grid(self.packet, self.n_k)
        return MomentumGrid(self.k_min, self.k_max, self.n_k)

    def momentum_state(self) -> MomentumState:
        if self.state is not None:
            return _state_from_dict(self.state, self.params)
        return discretize(self.packet, self.grid())

    def time_grid(self) -> np.ndarray:
        if self.t_min == self.t_max:
            return np.array([self.t_min])
        return np.linspace(self.t_min, self.t_max, self.n_t)

    def detector_list(self, default: Sequence[float]) -> List[float]:
        return list(default) if self.detectors is None else list(self.detectors)


DEFAULT_DETECTORS = (-5.0, -3.0, -1.0, 1.0, 3.0, 5.0)


def _state_from_dict(d: dict, params: PhysicalParams) -> MomentumState:
    try:
        grid = MomentumGrid(float(d["k_min"]), float(d["k_max"]), len(d["psi_re"]))
        psi = np.asarray(d["psi_re"], dtype=float) + 1j * np.asarray(d.get("psi_im", [0.0] * grid.n), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"state needs k_min, k_max, psi_re and optional psi_im ({exc})") from exc
    return MomentumState(grid, psi, params)


# ---------------------------------------------------------------------------
# argument parsing


def _float_list(text: str) -> List[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list: {text!r}")
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"invalid number list: {text!r}")
    return values


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"number must be finite: {text!r}")
    return v


def _count(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: {text!r}")


# flag name -> (RunConfig field, type)
_FLAGS = {
    "--x0": ("x0", _finite), "--k0": ("k0", _finite), "--delta": ("delta", _finite),
    "--hbar": ("hbar", _finite), "--mass": ("mass", _finite), "--epsilon": ("epsilon", _finite),
    "--kmin": ("k_min", _finite), "--kmax": ("k_max", _finite), "--nk": ("n_k", _count),
    "--tmin": ("t_min", _finite), "--tmax": ("t_max", _finite), "--nt": ("n_t", _count),
    "--detectors": ("detectors", _float_list), "--window": ("window", _finite),
    "--xmin": ("x_min", _finite), "--xmax": ("x_max", _finite), "--nx": ("n_x", _count),
    "--times": ("times", _float_list),
}

COMMANDS = ("density", "position-density", "current-compare", "uncertainty", "validate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toa", description="Time-of-arrival densities for free quantum particles.")
    parser.add_argument("command", choices=COMMANDS)
    for flag, (dest, kind) in _FLAGS.items():
        parser.add_argument(flag, dest=dest, type=kind, default=None)
    parser.add_argument("--config", default=None, help="JSON file with RunConfig fields")
    parser.add_argument("--output", default=None, help="write to this file instead of stdout")
    parser.add_argument("--list", action="store_true", help="validate: list check names only")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    for dest, _ in _FLAGS.values():
        v = getattr(args, dest)
        if v is not None:
            values[dest] = v
    try:
        cfg = RunConfig(**values)
        for name in ("n_k", "n_t", "n_x"):
            if int(getattr(cfg, name)) != getattr(cfg, name):
                raise ConfigError(f"{name} must be an integer")
            setattr(cfg, name, int(getattr(cfg, name)))
        for name in ("x0", "k0", "delta", "hbar", "mass", "epsilon", "t_min", "t_max"):
            setattr(cfg, name, float(getattr(cfg, name)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def _fmt(v) -> str:
    return "%.17g" % v


def _config_json(cfg: RunConfig) -> str:
    d = asdict(cfg)
    if d["state"] is not None:
        d["state"] = {"k_min": d["state"].get("k_min"), "k_max": d["state"].get("k_max"),
                      "n": len(d["state"].get("psi_re", []))}
    return json.dumps(d, sort_keys=True)


def _csv(command: str, cfg: RunConfig, header: Sequence[str], rows) -> str:
    out = io.StringIO()
    out.write(f"# toa {command}\n")
    out.write(f"# config {_config_json(cfg)}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_density(cfg: RunConfig) -> str:
    state = cfg.momentum_state()
    r = Regulator(cfg.epsilon)
    T = cfg.time_grid()
    rows = []
    for X in cfg.detector_list(DEFAULT_DETECTORS):
        dens = density_sweep(state, T, X, r)
        rows.extend((X,) + row for row in dens.rows)
    return _csv("density", cfg, ("X", "T", "pi_plus", "pi_minus", "pi_total"), rows)


def cmd_position_density(cfg: RunConfig) -> str:
    times = list(cfg.times)
    if cfg.state is not None:
        source = cfg.momentum_state()
        x0, k, spread = source.mean_x0(), source.mean_k(), source.spread_x
    else:
        source = cfg.packet
        x0, k = cfg.x0, cfg.k0
        spread = lambda t: source.moments(t).spread_x  # noqa: E731
    v = cfg.hbar * k / cfg.mass
    lo = cfg.x_min if cfg.x_min is not None else min(x0 + v * t - 8 * spread(t) for t in times)
    hi = cfg.x_max if cfg.x_max is not None else max(x0 + v * t + 8 * spread(t) for t in times)
    if not lo < hi:
        raise ConfigError("x_min must be below x_max")
    x = np.linspace(lo, hi, cfg.n_x)
    rows = []
    for t in times:
        rho = np.abs(source.wavefunction(x, t)) ** 2
        rows.extend(zip([t] * x.size, x, rho))
    return _csv("position-density", cfg, ("t", "x", "rho"), rows)


def _single_detector(cfg: RunConfig) -> float:
    dets = cfg.detector_list((1.0,))
    if len(dets) != 1:
        raise ConfigError("this command takes exactly one detector")
    return dets[0]


def cmd_current_compare(cfg: RunConfig) -> str:
    from .current import compare_current

    X = _single_detector(cfg)
    state = cfg.momentum_state()
    # The packet's closed-form current is exact; explicit states use synthesis.
    source = state if cfg.state is not None else cfg.packet
    comp = compare_current(source, X, cfg.time_grid(), cfg.window, Regulator(cfg.epsilon),
                           grid_state=state)
    header = ["T", "j", "pi_plus", "pi_minus", "d"]
    cols = [comp.T_grid, comp.j, comp.pi_plus, comp.pi_minus, comp.d]
    if comp.dP_smoothed is not None:
        header.append("dP_smoothed")
        cols.append(comp.dP_smoothed)
    return _csv("current-compare", cfg, header, zip(*cols))


def cmd_uncertainty(cfg: RunConfig) -> str:
    from .uncertainty import time_energy_product

    X = _single_detector(cfg)
    rep = time_energy_product(cfg.momentum_state(), X, Regulator(cfg.epsilon))
    return json.dumps(rep.as_dict(), indent=2) + "\n"


# validate ------------------------------------------------------------------


def _check_projection(cfg: RunConfig) -> Tuple[float, float]:
    from .oracle import dense_projection
    from .spectral import project

    state = cfg.momentum_state()
    r = Regulator(cfg.epsilon)
    worst = 0.0
    peak = 0.0
    samples = []
    for X in cfg.detector_list(DEFAULT_DETECTORS)[:3]:
        for T in np.linspace(cfg.t_min, cfg.t_max, 5):
            fast = project(state, T, 1, X, r)
            samples.append((fast, dense_projection(state, T, 1, X, r)))
            peak = max(peak, abs(fast))
    for fast, ref in samples:
        if abs(ref) > 1e-3 * peak:
            worst = max(worst, abs(fast - ref) / abs(ref))
    return worst, 1e-8


def _check_routes(cfg: RunConfig) -> Tuple[float, float]:
    from .analytic import analytic_amplitude
    from .spectral import arrival_density

    state = cfg.momentum_state()
    r = Regulator(cfg.epsilon)
    worst = 0.0
    for X in cfg.detector_list(DEFAULT_DETECTORS):
        T = np.linspace(cfg.t_min, cfg.t_max, 10)
        spectral = arrival_density(state, T, X, r)[0]
        exact = np.abs(analytic_amplitude(cfg.packet, T, X, 1)) ** 2
        big = exact > 1e-6 * exact.max()
        worst = max(worst, float(np.max(np.abs(spectral[big] - exact[big]) / exact[big])))
    return worst, 1e-6


def _check_flux(cfg: RunConfig) -> Tuple[float, float]:
    from .current import flux_window, position_cdf

    p = cfg.packet
    worst = 0.0
    X = cfg.detector_list(DEFAULT_DETECTORS)[0]
    for t1, t2 in ((cfg.t_min, cfg.t_max), (0.0, 0.5 * (cfg.t_min + cfg.t_max))):
        t1, t2 = min(t1, t2), max(t1, t2)
        lhs = flux_window(p, X, t1, t2)
        rhs = position_cdf(p, X, t1) - position_cdf(p, X, t2)
        worst = max(worst, abs(lhs - rhs))
    return worst, 1e-6


def _check_epsilon(cfg: RunConfig) -> Tuple[float, float]:
    from .spectral import arrival_density

    state = cfg.momentum_state()
    T = cfg.time_grid()
    worst = 0.0
    for X in cfg.detector_list(DEFAULT_DETECTORS):
        a = arrival_density(state, T, X, Regulator(cfg.epsilon))[2]
        b = arrival_density(state, T, X, Regulator(cfg.epsilon * 10))[2]
        big = a > 1e-12 * a.max()
        worst = max(worst, float(np.max(np.abs(a[big] - b[big]) / a[big])))
    return worst, 1e-10


CHECKS: List[Tuple[str, Callable[[RunConfig], Tuple[float, float]]]] = [
    ("projection-vs-oracle", _check_projection),
    ("spectral-vs-closed-form", _check_routes),
    ("flux-conservation", _check_flux),
    ("epsilon-independence", _check_epsilon),
]


def cmd_validate(cfg: RunConfig) -> Tuple[str, bool]:
    lines = []
    ok = True
    for name, check in CHECKS:
        try:
            err, tol = check(cfg)
            passed = err <= tol
            lines.append(f"{'PASS' if passed else 'FAIL'} {name} error={err:.3e} tolerance={tol:.1e}")
        except ToaError as exc:
            passed = False
            lines.append(f"FAIL {name} {type(exc).__name__}: {exc}")
        ok = ok and passed
    return "\n".join(lines) + "\n", ok


# ---------------------------------------------------------------------------


def _emit(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate" and args.list:
        sys.stdout.write("\n".join(name for name, _ in CHECKS) + "\n")
        return 0
    try:
        cfg = resolve_config(args)
        if args.command == "validate":
            text, ok = cmd_validate(cfg)
            _emit(text, args.output)
            return 0 if ok else EXIT_FAIL
        handler = {
            "density": cmd_density,
            "position-density": cmd_position_density,
            "current-compare": cmd_current_compare,
            "uncertainty": cmd_uncertainty,
        }[args.command]
        _emit(handler(cfg), args.output)
        return 0
    except PhaseUnderresolved as exc:
        print(f"toa: {exc}", file=sys.stderr)
        return EXIT_PHASE
    except (ConfigError, ToaError, ValueError) as exc:
        print(f"toa: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
