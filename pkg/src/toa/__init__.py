"""Arrival-time densities for a free quantum particle from the regulated time-of-arrival operator."""

from __future__ import annotations

from .analytic import analytic_amplitude, analytic_density, approx_amplitude, approx_density
from .core import (
    NEVER,
    ClassicalState,
    GaussianPacket,
    MomentumGrid,
    MomentumState,
    Moments,
    PhysicalParams,
    as_state,
    classical_arrival_time,
    default_grid,
    discretize,
    gaussian_momentum_amplitude,
    gaussian_moments,
    gaussian_position_wavefunction,
    is_detected,
)
from .current import (
    CurrentComparison,
    compare_current,
    current_density,
    discrepancy,
    flux_window,
    mean_arrival_from_current,
    position_cdf,
    smoothed_discrepancy,
    symmetric_ordering_expectation,
)
from .errors import (
    CoincidentEigenvalues,
    GridTooNarrow,
    NoConvergence,
    NonpositiveMomentum,
    NotNormalized,
    PhaseUnderresolved,
    SeriesDivergence,
    ToaError,
    UnsupportedState,
    WrongHalfLine,
)
from .oracle import OracleConfig, dense_projection, gaussian_tail_mass
from .special import SpecialFunctionConfig, gamma, kummer_phi, laguerre_general, tricomi_u
from .spectral import (
    ArrivalDensity,
    GramGrid,
    Regulator,
    ToaEigenstate,
    arrival_density,
    density_sweep,
    eigenstate_value,
    gram_matrix,
    momentum_position_overlap,
    project,
    regulator_value,
    time_rep_factor,
    total_arrival_probability,
    unregulated_gram,
    unregulated_overlap_defect,
    z_coordinate,
)
from .uncertainty import UncertaintyReport, commutator_defect, time_energy_product

__version__ = "0.1.0"
