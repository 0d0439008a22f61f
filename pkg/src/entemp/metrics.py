"""Black-hole backgrounds and their time-shift expansion factors.

All radii are dimensionless, rescaled by the outer horizon radius, so a
non-degenerate horizon always sits at r = 1 with f(1) = 0 and f'(1) > 0.
Built-in metric functions:

    flat                 f = 0
    schwarzschild        f = 1 - 1/r
    reissner_nordstrom   f = 1 - (1 + q^2)/r + q^2/r^2,  q = Q/r_h in [0, 1)

An infinitesimal shift eps of the free-fall time coordinate moves the
areal radius and the radial metric component multiplicatively,

    r      ->  r (1 - eps*rad1 - eps^2*rad2)
    (1-f)  ->  (1-f)(1 + eps*lap1 - eps^2*lap2)

with shift factors

    rad1 = sqrt(1-f)/r          rad2 = f'/(4r)
    lap1 = f'/sqrt(1-f)         lap2 = -f'^2/(4(1-f)) + f''/2

evaluated on the constant-time slice.  Their radial derivatives feed the
first and second order couplings of the perturbed lattice Hamiltonian,
so they are computed analytically (lap2' needs f''').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

from .errors import DomainError, InvalidMetricError, SingularFactorError

KINDS = ("flat", "schwarzschild", "reissner_nordstrom", "custom")

# Evaluating factors closer to f = 1 than this counts as singular.
SINGULAR_MARGIN = 1e-12


@dataclass(frozen=True)
class MetricSpec:
    """A spherically symmetric background.

    kind:   one of KINDS
    q:      charge-to-horizon ratio Q/r_h (Reissner-Nordstrom only)
    dim:    angular dimension D of the sphere (D = 2 is 4d space-time)
    custom: exact evaluator r -> (f, f', f'', f''') for kind="custom";
            sampled tables are not accepted, the accuracy contract
            requires closed-form derivatives.
    """

    kind: str = "schwarzschild"
    q: float = 0.0
    dim: int = 2
    custom: Optional[Callable[[float], tuple]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidMetricError(f"unknown metric kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidMetricError("angular dimension must be >= 1")
        if self.kind == "reissner_nordstrom" and not 0.0 <= self.q < 1.0:
            raise InvalidMetricError(
                f"reissner_nordstrom requires 0 <= q < 1 "
                f"(non-degenerate horizon), got q={self.q}"
            )
        if self.kind == "custom" and self.custom is None:
            raise InvalidMetricError("custom metric needs an evaluator")

    @property
    def has_horizon(self) -> bool:
        return self.kind != "flat"


class HawkingTemperature(NamedTuple):
    value: float
    has_horizon: bool


def _derivs(m: MetricSpec, r: float) -> tuple:
    """(f, f', f'', f''') at radius r > 0."""
    if r <= 0.0:
        raise DomainError(f"radius must be positive, got {r}")
    if m.kind == "flat":
        return 0.0, 0.0, 0.0, 0.0
    if m.kind in ("schwarzschild", "reissner_nordstrom"):
        # shared arithmetic so the q=0 charged metric reproduces
        # Schwarzschild bit for bit
        b = m.q * m.q if m.kind == "reissner_nordstrom" else 0.0
        a = 1.0 + b
        return (
            1.0 - a / r + b / r**2,
            a / r**2 - 2.0 * b / r**3,
            -2.0 * a / r**3 + 6.0 * b / r**4,
            6.0 * a / r**4 - 24.0 * b / r**5,
        )
    out = m.custom(r)
    if len(out) != 4:
        raise InvalidMetricError(
            "custom evaluator must return (f, f', f'', f''')"
        )
    return tuple(float(v) for v in out)


def metric_function(m: MetricSpec, r: float) -> tuple:
    """f and its first two radial derivatives at r."""
    return _derivs(m, r)[:3]


def hawking_temperature(m: MetricSpec) -> HawkingTemperature:
    """Semiclassical horizon temperature f'(1)/(4 pi) in units of 1/r_h.

    Flat space has no horizon; the value 0 is returned with the flag
    cleared so callers can distinguish 'cold' from 'no horizon'.
    """
    if not m.has_horizon:
        return HawkingTemperature(0.0, False)
    _, fp, _ = metric_function(m, 1.0)
    return HawkingTemperature(fp / (4.0 * math.pi), True)


@dataclass(frozen=True)
class ShiftFactors:
    """Time-shift expansion factors and their radial derivatives."""

    rad1: float
    rad2: float
    lap1: float
    lap2: float
    drad1: float
    drad2: float
    dlap1: float
    dlap2: float


def shift_factors(m: MetricSpec, r: float) -> ShiftFactors:
    """Evaluate the four shift factors and their derivatives at r.

    Valid wherever f(r) < 1: lap1 divides by sqrt(1-f) and lap2 by
    (1-f), so radii at or beyond f = 1 (inside the inner charged-horizon
    core, where the free-fall congruence turns around) raise
    SingularFactorError instead of being clamped.
    """
    f, fp, fpp, fppp = _derivs(m, r)
    omf = 1.0 - f
    if omf <= SINGULAR_MARGIN:
        which = "lap1" if omf > 0 else "lap1,lap2"
        raise SingularFactorError(which, r, (
            f"f(r)={f:.6g} at r={r:.6g}: sqrt(1-f) and 1/(1-f) "
            f"factors ({which}) are singular"
        ))
    s = math.sqrt(omf)
    rad1 = s / r
    rad2 = fp / (4.0 * r)
    lap1 = fp / s
    lap2 = -fp * fp / (4.0 * omf) + fpp / 2.0
    # chain-rule derivatives; numeric differentiation here would leak
    # noise into the eps-slopes downstream
    drad1 = -fp / (2.0 * r * s) - s / (r * r)
    drad2 = fpp / (4.0 * r) - fp / (4.0 * r * r)
    dlap1 = fpp / s + fp * fp / (2.0 * omf * s)
    dlap2 = -(2.0 * fp * fpp * omf + fp**3) / (4.0 * omf * omf) + fppp / 2.0
    return ShiftFactors(rad1, rad2, lap1, lap2, drad1, drad2, dlap1, dlap2)


def degeneracy(l: int, dim: int) -> int:
    """Number of independent real hyperspherical harmonics at angular
    momentum l on the dim-sphere:

        g(l, D) = (2l + D - 1) (l + D - 2)! / (l! (D - 1)!),  g(0, D) = 1.
    """
    if l < 0:
        raise DomainError(f"angular momentum must be >= 0, got {l}")
    if dim < 1:
        raise DomainError(f"angular dimension must be >= 1, got {dim}")
    if l == 0:
        return 1
    return (
        (2 * l + dim - 1)
        * math.factorial(l + dim - 2)
        // (math.factorial(l) * math.factorial(dim - 1))
    )
