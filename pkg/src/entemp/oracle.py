"""Brute-force entanglement entropy from the explicit wavefunction.

Independent check of the closed-form Gaussian reduction: sample the
normalized ground-state wavefunction of up to four coupled oscillators
on a uniform position grid, trace the inner coordinates by summed
quadrature, and diagonalize the discretized reduced density matrix.
Shares no code with :mod:`entemp.gaussian` (the matrix square root here
comes from scipy's Schur-based sqrtm, not an eigendecomposition).

Cost grows exponentially with oscillator count; four oscillators are
enough to exercise a non-trivial traced/kept block structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, GridCoarseError, NotSPDError

EIG_FLOOR = 1e-12  # discard reduced-density eigenvalues below this


@dataclass(frozen=True)
class GridOracleConfig:
    """Grid for the wavefunction sampling.

    grid_points: points per axis (even)
    halfwidth:   box half-size in units of the widest ground-state width
    """

    grid_points: int = 64
    halfwidth: float = 6.0

    def __post_init__(self):
        if self.grid_points < 2 or self.grid_points % 2:
            raise DomainError("grid_points must be even and >= 2")
        if self.halfwidth < 5.0:
            raise DomainError(
                "halfwidth below 5 truncates the tails beyond 1e-10 of norm"
            )


def brute_force_entropy(
    K: np.ndarray, n: int, config: GridOracleConfig | None = None
) -> float:
    """Entropy after tracing the first n of N <= 4 oscillators."""
    config = config or GridOracleConfig()
    K = np.asarray(K, dtype=float)
    N = K.shape[0]
    if K.shape != (N, N) or N > 4:
        raise DomainError("oracle handles square K up to 4x4")
    if not 1 <= n < N:
        raise DomainError(f"partition must satisfy 1 <= n < N, got n={n}")
    if not np.allclose(K, K.T):
        raise DomainError("K must be symmetric")
    evals = scipy.linalg.eigvalsh(K)
    if evals[0] <= 0.0:
        raise NotSPDError(float(evals[0]))

    omega = scipy.linalg.sqrtm(K).real
    # widest principal width of |psi|^2 = exp(-x.Omega x)
    sigma_max = 1.0 / np.sqrt(2.0 * np.sqrt(evals[0]))
    L = config.halfwidth * sigma_max
    g = config.grid_points
    step = 2.0 * L / g
    axis = -L + (np.arange(g) + 0.5) * step  # midpoint rule

    grids = np.meshgrid(*([axis] * N), indexing="ij")
    x = np.stack([a.ravel() for a in grids])  # (N, g^N)
    quad = np.einsum("ij,ik,kj->j", x, omega, x)
    norm = (np.linalg.det(omega) / np.pi**N) ** 0.25
    psi = norm * np.exp(-0.5 * quad)

    cell = step**N
    total = float(np.sum(psi**2) * cell)
    if abs(total - 1.0) > 1e-6:
        raise GridCoarseError(
            f"discretized norm {total:.8f} deviates from 1 beyond 1e-6; "
            f"refine grid_points or widen halfwidth"
        )

    # rows = traced coordinates, cols = kept coordinates
    M = psi.reshape(g**n, g ** (N - n))
    # nonzero spectrum of rho equals that of either Gram matrix; use the
    # smaller side
    if M.shape[0] <= M.shape[1]:
        gram = M @ M.T
    else:
        gram = M.T @ M
    p = scipy.linalg.eigvalsh(gram) * cell
    p = p[p > EIG_FLOOR]
    return float(-np.sum(p * np.log(p)))
