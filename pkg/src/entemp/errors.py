"""Exception hierarchy shared across the simulator.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numerical failures with 3, regression-check failures with 4.
"""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SimulationError):
    """Invalid run configuration. Collects all violations at once."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(SimulationError):
    """Argument outside the mathematical domain of an operation."""


class InvalidMetricError(SimulationError):
    """Metric parameters violate a metric invariant (e.g. RN with q >= 1)."""


class SingularFactorError(SimulationError):
    """A shift factor is singular at the requested radius."""

    def __init__(self, factor, radius, message=None):
        self.factor = factor
        self.radius = radius
        super().__init__(
            message or f"factor {factor} singular at radius {radius!r}"
        )


class NotSPDError(SimulationError):
    """Matrix expected to be symmetric positive definite is not."""

    def __init__(self, min_eigenvalue, message=None):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            message or f"matrix not SPD, smallest eigenvalue {min_eigenvalue:.6e}"
        )


class AssemblyError(SimulationError):
    """Coupling matrix failed positive definiteness at a requested offset."""

    def __init__(self, eps, min_eigenvalue):
        self.eps = eps
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"K(eps={eps}) not positive definite, "
            f"smallest eigenvalue {min_eigenvalue:.6e}"
        )


class ReductionError(SimulationError):
    """Partial trace of the Gaussian state could not be formed."""


class SpectralDomainError(SimulationError):
    """Reduced-state eigenvalue outside [0, 1) beyond round-off tolerance."""


class DegenerateSweepError(SimulationError):
    """Entropy slope too small to define a temperature."""


class GridCoarseError(SimulationError):
    """Brute-force oracle grid too coarse for the requested state."""


class FitError(SimulationError):
    """Not enough data points for the requested fit."""
