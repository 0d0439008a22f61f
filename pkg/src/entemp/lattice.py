"""Radial-lattice discretization of the shifted scalar-field Hamiltonian.

The field lives on a uniform radial grid of N sites with unit spacing,
Dirichlet boundaries at both ends, and the horizon pinned to the
partition site: site j sits at dimensionless radius r_j = j/n, so grid
spacing is h = 1/n in horizon units.  Per angular channel l the
Hamiltonian is a quadratic form

    K(eps) = K0 + eps K1 + eps^2 K2

in the site amplitudes, with K0 the static (flat-slice) part

    K0_jj     = l(l+D-1)/j^2 + [(j-1/2)^D + (j+1/2)^D]/j^D
    K0_j,j+1  = -(j+1/2)^D / (j^{D/2} (j+1)^{D/2})

(the (j-1/2) term is dropped at j = 1).  K1 and K2 come from expanding
the shifted Hamiltonian density into the canonical quadratic form
c_grad s'^2 + c_mix s s' + c_pot s^2 per site.  With the shift factors
of :mod:`entemp.metrics` (R1=rad1, R2=rad2, P1=lap1, P2=lap2, primes =
radial derivatives), multiplying out the first-order density

    (-D s + 2 r s')(D P1 s - 2 r P1 s' + 2 D r R1' s - r P1' s)/(4 r^2)
        + 2 l(l+D-1) R1 s^2 / r^2

gives the expanded first-order coefficients

    c_grad1 = -P1
    c_mix1  =  D P1 / r + D R1' - P1'/2
    c_pot1  = -D^2 P1/(4 r^2) - D^2 R1'/(2 r) + D P1'/(4 r)
              + 2 l(l+D-1) R1 / r^2

and the second-order density is already in coefficient form:

    c_grad2 =  P1^2 + P2
    c_mix2  = -D (P1^2 + P2)/r + D (R1 R1' - P1 R1' + R2') + P1 P1' + P2'/2
    c_pot2  =  l(l+D-1)(3 R1^2 + 2 R2)/r^2 + D^2 (P1^2 + P2)/(4 r^2)
              + D^2 (P1 - R1) R1'/(2 r) + D^2 R1'^2/4 - D^2 R2'/(2 r)
              - D P1 P1'/(2 r) - D R1' P1'/4 + P1'^2/16 - D P2'/(4 r)

(both validated against a numeric expansion oracle in the test suite).
Radial derivatives use central differences, one-sided at the ends, and
the per-site measure is h = 1/n.  Sites inside the horizon keep the
unperturbed form: there the quadratic truncation of the shift is not
uniformly controlled (the expansion parameter eps*rad1 grows without
bound toward the center) and including them destroys positive
definiteness at sweep-scale offsets.

Two time orientations are supported; they differ only in the sign of
K1.  The default "outgoing" branch makes entropy nondecreasing in eps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import cholesky, LinAlgError

from .errors import AssemblyError, DomainError
from .metrics import MetricSpec, ShiftFactors, shift_factors

MASKS = ("exterior", "all")
BRANCHES = ("outgoing", "ingoing")
SECTORS = ("full", "dilation")


@dataclass(frozen=True)
class LatticeConfig:
    """Lattice geometry for one angular channel.

    N:   total number of sites
    n:   partition index; sites 1..n are traced out and the horizon
         sits at r = n/n = 1
    l:   angular momentum of the channel
    dim: angular dimension D
    """

    N: int
    n: int
    l: int = 0
    dim: int = 2

    def __post_init__(self):
        if self.N < 2:
            raise DomainError(f"need at least 2 sites, got N={self.N}")
        if not 1 <= self.n < self.N:
            raise DomainError(f"partition must satisfy 1 <= n < N, got n={self.n}")
        if self.l < 0:
            raise DomainError(f"angular momentum must be >= 0, got l={self.l}")
        if self.dim < 1:
            raise DomainError(f"angular dimension must be >= 1, got dim={self.dim}")


class QuadCoeffs(NamedTuple):
    """Coefficients of c_grad s'^2 + c_mix s s' + c_pot s^2."""

    grad: float
    mix: float
    pot: float


def first_order_coeffs(m: MetricSpec, cfg: LatticeConfig, r: float) -> QuadCoeffs:
    """First-order density coefficients at radius r (ingoing orientation)."""
    sf = shift_factors(m, r)
    return _first_order(sf, cfg.dim, cfg.l, r)


def second_order_coeffs(m: MetricSpec, cfg: LatticeConfig, r: float) -> QuadCoeffs:
    """Second-order density coefficients at radius r."""
    sf = shift_factors(m, r)
    return _second_order(sf, cfg.dim, cfg.l, r)


def _first_order(sf: ShiftFactors, D: int, l: int, r: float) -> QuadCoeffs:
    L = l * (l + D - 1)
    grad = -sf.lap1
    mix = D * sf.lap1 / r + D * sf.drad1 - sf.dlap1 / 2.0
    pot = (
        -D * D * sf.lap1 / (4.0 * r * r)
        - D * D * sf.drad1 / (2.0 * r)
        + D * sf.dlap1 / (4.0 * r)
        + 2.0 * L * sf.rad1 / (r * r)
    )
    return QuadCoeffs(grad, mix, pot)


def _second_order(sf: ShiftFactors, D: int, l: int, r: float) -> QuadCoeffs:
    L = l * (l + D - 1)
    lap_sq = sf.lap1 * sf.lap1 + sf.lap2
    grad = lap_sq
    mix = (
        -D * lap_sq / r
        + D * (sf.rad1 * sf.drad1 - sf.lap1 * sf.drad1 + sf.drad2)
        + sf.lap1 * sf.dlap1
        + sf.dlap2 / 2.0
    )
    pot = (
        L * (3.0 * sf.rad1 * sf.rad1 + 2.0 * sf.rad2) / (r * r)
        + D * D * lap_sq / (4.0 * r * r)
        + D * D * (sf.lap1 - sf.rad1) * sf.drad1 / (2.0 * r)
        + D * D * sf.drad1 * sf.drad1 / 4.0
        - D * D * sf.drad2 / (2.0 * r)
        - D * sf.lap1 * sf.dlap1 / (2.0 * r)
        - D * sf.drad1 * sf.dlap1 / 4.0
        + sf.dlap1 * sf.dlap1 / 16.0
        - D * sf.dlap2 / (4.0 * r)
    )
    return QuadCoeffs(grad, mix, pot)


def build_k0(cfg: LatticeConfig) -> np.ndarray:
    """Static coupling matrix; independent of the metric."""
    N, l, D = cfg.N, cfg.l, cfg.dim
    j = np.arange(1, N + 1, dtype=float)
    diag = l * (l + D - 1) / j**2 + ((j - 0.5) ** D + (j + 0.5) ** D) / j**D
    diag[0] = l * (l + D - 1) + 1.5**D  # Dirichlet edge: no inner link at j=1
    off = -((j[:-1] + 0.5) ** D) / (j[:-1] ** (D / 2.0) * j[1:] ** (D / 2.0))
    K = np.diag(diag)
    K[np.arange(N - 1), np.arange(1, N)] = off
    K[np.arange(1, N), np.arange(N - 1)] = off
    return K


def _add_site(K: np.ndarray, j: int, c: QuadCoeffs, h: float, N: int) -> None:
    """Accumulate h^2 (c_grad s'^2 + c_mix s s' + c_pot s^2) sampled at
    site j into the quadratic form K, with s' the central difference in
    radius units (one-sided at the lattice ends)."""
    i = j - 1
    K[i, i] += h * h * c.pot
    cm = h * c.mix
    cg = c.grad
    if j == 1:
        # forward differences: s' = (s_2 - s_1)/h
        K[0, 1] += cm / 2.0
        K[1, 0] += cm / 2.0
        K[0, 0] -= cm
        K[0, 0] += cg
        K[1, 1] += cg
        K[0, 1] -= cg
        K[1, 0] -= cg
    elif j == N:
        # backward differences: s' = (s_N - s_{N-1})/h
        K[N - 1, N - 2] -= cm / 2.0
        K[N - 2, N - 1] -= cm / 2.0
        K[N - 1, N - 1] += cm
        K[N - 1, N - 1] += cg
        K[N - 2, N - 2] += cg
        K[N - 1, N - 2] -= cg
        K[N - 2, N - 1] -= cg
    else:
        K[i, i + 1] += cm / 4.0
        K[i + 1, i] += cm / 4.0
        K[i, i - 1] -= cm / 4.0
        K[i - 1, i] -= cm / 4.0
        K[i - 1, i - 1] += cg / 4.0
        K[i + 1, i + 1] += cg / 4.0
        K[i - 1, i + 1] -= cg / 4.0
        K[i + 1, i - 1] -= cg / 4.0


@dataclass(frozen=True)
class CouplingMatrix:
    """Decomposed symmetric coupling K(eps) = k0 + eps k1 + eps^2 k2."""

    k0: np.ndarray
    k1: np.ndarray
    k2: np.ndarray

    @property
    def size(self) -> int:
        return self.k0.shape[0]

    def coupling(self, eps: float, check: bool = True) -> np.ndarray:
        """K at offset eps; verifies positive definiteness when check."""
        K = self.k0 + eps * self.k1 + eps * eps * self.k2
        if check:
            try:
                cholesky(K, lower=True, check_finite=False)
            except LinAlgError:
                raise AssemblyError(eps, float(np.linalg.eigvalsh(K)[0]))
        return K


def _perturbed_site(m: MetricSpec, r: float) -> bool:
    """Sites carrying shift couplings: the horizon-exterior patch."""
    return r >= 1.0 - 1e-12


def assemble(
    m: MetricSpec,
    cfg: LatticeConfig,
    branch: str = "outgoing",
    sector: str = "full",
) -> CouplingMatrix:
    """Build K0, K1, K2 for one channel.

    branch: time orientation; "outgoing" flips the sign of K1 relative
            to the ingoing congruence (entropy then grows with eps).
    sector: "full" uses all shift factors; "dilation" zeroes the lapse
            factors, keeping only the universal radius-dilation response
            (the reference the energy extractor subtracts).
    """
    if branch not in BRANCHES:
        raise DomainError(f"branch must be one of {BRANCHES}, got {branch!r}")
    if sector not in SECTORS:
        raise DomainError(f"sector must be one of {SECTORS}, got {sector!r}")
    fam = assemble_family(m, cfg.N, cfg.n, cfg.dim, branch=branch, sector=sector)
    return fam.channel(cfg.l)


@dataclass
class ChannelFamily:
    """Per-(metric, lattice) assembly shared across angular channels.

    The channel dependence of K1 and K2 is affine in l(l+D-1) and purely
    diagonal, so each channel is a cheap diagonal update of the l=0
    matrices.
    """

    N: int
    n: int
    dim: int
    k0_base: np.ndarray = field(repr=False)
    k0_ldiag: np.ndarray = field(repr=False)
    k1_base: np.ndarray = field(repr=False)
    k1_ldiag: np.ndarray = field(repr=False)
    k2_base: np.ndarray = field(repr=False)
    k2_ldiag: np.ndarray = field(repr=False)

    def channel(self, l: int) -> CouplingMatrix:
        if l < 0:
            raise DomainError(f"angular momentum must be >= 0, got l={l}")
        L = l * (l + self.dim - 1)
        rng = np.arange(self.N)
        k0 = self.k0_base.copy()
        k0[rng, rng] += L * self.k0_ldiag
        k1 = self.k1_base.copy()
        k1[rng, rng] += L * self.k1_ldiag
        k2 = self.k2_base.copy()
        k2[rng, rng] += L * self.k2_ldiag
        return CouplingMatrix(k0, k1, k2)


def assemble_family(
    m: MetricSpec,
    N: int,
    n: int,
    dim: int,
    branch: str = "outgoing",
    sector: str = "full",
) -> ChannelFamily:
    """Assemble the l-independent parts plus the l(l+D-1) diagonals."""
    cfg0 = LatticeConfig(N=N, n=n, l=0, dim=dim)
    k0_base = build_k0(cfg0)
    j = np.arange(1, N + 1, dtype=float)
    k0_ldiag = 1.0 / j**2

    sign = -1.0 if branch == "outgoing" else 1.0
    h = 1.0 / n
    k1 = np.zeros((N, N))
    k2 = np.zeros((N, N))
    k1_ldiag = np.zeros(N)
    k2_ldiag = np.zeros(N)
    D = dim
    for site in range(1, N + 1):
        r = site / n
        if not _perturbed_site(m, r):
            continue
        sf = shift_factors(m, r)
        if sector == "dilation":
            sf = ShiftFactors(sf.rad1, sf.rad2, 0.0, 0.0,
                              sf.drad1, sf.drad2, 0.0, 0.0)
        c1 = _first_order(sf, D, 0, r)
        c2 = _second_order(sf, D, 0, r)
        _add_site(k1, site, QuadCoeffs(sign * c1.grad, sign * c1.mix,
                                       sign * c1.pot), h, N)
        _add_site(k2, site, c2, h, N)
        # centrifugal sector: affine-in-l diagonal updates
        k1_ldiag[site - 1] += sign * h * h * 2.0 * sf.rad1 / (r * r)
        k2_ldiag[site - 1] += h * h * (
            3.0 * sf.rad1 * sf.rad1 + 2.0 * sf.rad2
        ) / (r * r)
    return ChannelFamily(
        N=N, n=n, dim=dim,
        k0_base=k0_base, k0_ldiag=k0_ldiag,
        k1_base=k1, k1_ldiag=k1_ldiag,
        k2_base=k2, k2_ldiag=k2_ldiag,
    )


def dump_matrix_csv(K: np.ndarray, path) -> None:
    """Write (row, col, value) triples for cross-implementation diffing."""
    with open(path, "w") as fh:
        fh.write("row,col,value\n")
        for i in range(K.shape[0]):
            for k in range(K.shape[1]):
                v = K[i, k]
                if v != 0.0:
                    fh.write(f"{i + 1},{k + 1},{v:.17g}\n")
