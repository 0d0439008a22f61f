"""Entanglement temperature of black-hole horizons on a radial lattice.

Discretizes a spherically reduced scalar field on a uniform radial
grid, perturbs the Hamiltonian to second order in an infinitesimal
free-fall time offset, and extracts the entanglement temperature
(energy-slope over entropy-slope across the horizon partition) for
comparison with the analytic horizon temperature f'(1)/4pi.
"""

__version__ = "0.1.0"

from .errors import (
    AssemblyError,
    ConfigError,
    DegenerateSweepError,
    DomainError,
    FitError,
    GridCoarseError,
    InvalidMetricError,
    NotSPDError,
    ReductionError,
    SimulationError,
    SingularFactorError,
    SpectralDomainError,
)
from .gaussian import (
    ChannelSum,
    GroundState,
    ReducedSpectrum,
    channel_entropy,
    entanglement_entropy,
    ground_energy,
    ground_state,
    mode_entropy,
    reduced_spectrum,
    spd_sqrt,
)
from .lattice import (
    ChannelFamily,
    CouplingMatrix,
    LatticeConfig,
    QuadCoeffs,
    assemble,
    assemble_family,
    build_k0,
    first_order_coeffs,
    second_order_coeffs,
)
from .metrics import (
    HawkingTemperature,
    MetricSpec,
    ShiftFactors,
    degeneracy,
    hawking_temperature,
    metric_function,
    shift_factors,
)
from .oracle import GridOracleConfig, brute_force_entropy
from .thermo import (
    AreaLawFit,
    SweepResult,
    TemperatureReport,
    area_law_fit,
    default_eps_list,
    default_partitions,
    epsilon_sweep,
    temperature_report,
)

__all__ = [
    "__version__",
    "AreaLawFit", "AssemblyError", "ChannelFamily", "ChannelSum",
    "ConfigError", "CouplingMatrix", "DegenerateSweepError", "DomainError",
    "FitError", "GridCoarseError", "GridOracleConfig", "GroundState",
    "HawkingTemperature", "InvalidMetricError", "LatticeConfig",
    "MetricSpec", "NotSPDError", "QuadCoeffs", "ReducedSpectrum",
    "ReductionError", "ShiftFactors", "SimulationError",
    "SingularFactorError", "SpectralDomainError", "SweepResult",
    "TemperatureReport", "area_law_fit", "assemble", "assemble_family",
    "brute_force_entropy", "build_k0", "channel_entropy",
    "default_eps_list", "default_partitions", "degeneracy",
    "entanglement_entropy", "epsilon_sweep", "first_order_coeffs",
    "ground_energy", "ground_state", "hawking_temperature",
    "metric_function", "mode_entropy", "reduced_spectrum",
    "second_order_coeffs", "shift_factors", "spd_sqrt",
    "temperature_report",
]
