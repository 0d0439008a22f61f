"""Closed-form ground-state energy and entanglement entropy of a
quadratic oscillator chain.

For H = (p.p + q.K q)/2 with K symmetric positive definite, the ground
state is the Gaussian exp(-q.Omega q/2) with Omega = K^{1/2}, and the
ground energy is tr(Omega)/2.  Tracing the first n oscillators out of
the pure ground state leaves a Gaussian mixed state whose spectrum is
fixed by the blocks of Omega = [[A, B], [B^T, C]] (A the traced n x n
block):

    beta  = B^T A^{-1} B / 2
    gamma = C - beta
    lambda_i = eigenvalues of gamma^{-1} beta   (symmetric pencil)

Each lambda in [0, 1) maps to a mode parameter

    xi = lambda / (1 + sqrt(1 - lambda^2))

whose thermal-like spectrum (1-xi) xi^k yields the per-mode von Neumann
entropy

    S(xi) = -ln(1 - xi) - xi ln(xi) / (1 - xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh, LinAlgError

from .errors import (
    DomainError,
    NotSPDError,
    ReductionError,
    SpectralDomainError,
)
from .metrics import degeneracy

# Reduced eigenvalues may poke out of [0, 1) by round-off; anything
# beyond this window is a genuine error, not noise.
CLAMP_WINDOW = 1e-12
LAMBDA_CEIL = 1.0 - 1e-15


def spd_sqrt(K: np.ndarray) -> np.ndarray:
    """Symmetric square root via full eigendecomposition."""
    w, U = np.linalg.eigh(K)
    if w[0] <= 0.0:
        raise NotSPDError(float(w[0]))
    om = (U * np.sqrt(w)) @ U.T
    return 0.5 * (om + om.T)  # kill 1-ulp BLAS asymmetry


@dataclass(frozen=True)
class GroundState:
    """Gaussian ground state: width matrix Omega = K^{1/2} and energy."""

    omega: np.ndarray
    energy: float


def ground_state(K: np.ndarray) -> GroundState:
    w, U = np.linalg.eigh(K)
    if w[0] <= 0.0:
        raise NotSPDError(float(w[0]))
    sw = np.sqrt(w)
    omega = (U * sw) @ U.T
    omega = 0.5 * (omega + omega.T)
    return GroundState(omega=omega, energy=0.5 * float(sw.sum()))


def ground_energy(gs: GroundState) -> float:
    """tr(Omega)/2; equals half the sum of sqrt eigenvalues of K."""
    return 0.5 * float(np.trace(gs.omega))


def mode_entropy(xi: float) -> float:
    """Entropy of one reduced mode, S(0) = 0, increasing in xi."""
    if not 0.0 <= xi < 1.0:
        raise DomainError(f"mode parameter must be in [0, 1), got {xi}")
    if xi == 0.0:
        return 0.0
    return -math.log1p(-xi) - xi / (1.0 - xi) * math.log(xi)


@dataclass(frozen=True)
class ReducedSpectrum:
    """Spectral data of the state left after tracing the inner block."""

    lambdas: np.ndarray
    xis: np.ndarray
    mode_entropies: np.ndarray
    total: float


def _sanitize_lambdas(lam: np.ndarray) -> np.ndarray:
    low, high = lam.min(initial=0.0), lam.max(initial=0.0)
    if low < -CLAMP_WINDOW:
        raise SpectralDomainError(
            f"reduced eigenvalue {low:.6e} below 0 beyond round-off"
        )
    if high >= 1.0 + CLAMP_WINDOW:
        raise SpectralDomainError(
            f"reduced eigenvalue {high:.6e} at or above 1 signals a "
            f"non-ground or invalid state"
        )
    return np.clip(lam, 0.0, LAMBDA_CEIL)


def reduced_spectrum(gs: GroundState, n: int) -> ReducedSpectrum:
    """Trace out oscillators 1..n and return the reduced-mode spectrum."""
    N = gs.omega.shape[0]
    if not 1 <= n < N:
        raise DomainError(f"partition must satisfy 1 <= n < N, got n={n}")
    A = gs.omega[:n, :n]
    B = gs.omega[:n, n:]
    C = gs.omega[n:, n:]
    try:
        cf = cho_factor(A, check_finite=False)
    except LinAlgError as exc:
        raise ReductionError(f"traced block not invertible: {exc}") from exc
    beta = 0.5 * (B.T @ cho_solve(cf, B, check_finite=False))
    beta = 0.5 * (beta + beta.T)  # Cholesky round-off
    gamma = C - beta
    try:
        lam = eigh(beta, gamma, eigvals_only=True, check_finite=False)
    except LinAlgError as exc:
        raise ReductionError(f"symmetric pencil failed: {exc}") from exc
    lam = _sanitize_lambdas(np.asarray(lam))
    xis = lam / (1.0 + np.sqrt(1.0 - lam * lam))
    ent = np.zeros_like(xis)
    pos = xis > 0.0
    xp = xis[pos]
    ent[pos] = -np.log1p(-xp) - xp / (1.0 - xp) * np.log(xp)
    return ReducedSpectrum(
        lambdas=lam, xis=xis, mode_entropies=ent, total=float(ent.sum())
    )


def channel_entropy(K: np.ndarray, n: int) -> float:
    """Entanglement entropy of one channel across the partition at n."""
    return reduced_spectrum(ground_state(K), n).total


@dataclass(frozen=True)
class ChannelSum:
    """Degeneracy-weighted channel sum with its termination record."""

    total: float
    channels: int
    converged: bool
    reason: str
    last_term: float
    # per-channel entropies should decay beyond restricted low channels;
    # a violation hints at an unsafe truncation and is logged, not fatal
    monotone_decay: bool = True


def entanglement_entropy(
    channel_matrix: Callable[[int], np.ndarray],
    n: int,
    dim: int,
    l_max: int = 2000,
    tol: float = 1e-8,
    consecutive: int = 3,
) -> ChannelSum:
    """Sum g(l, D) * S_l over angular channels.

    channel_matrix maps l to the channel's coupling matrix.  The sum
    stops once the degeneracy-weighted term stays below tol times the
    running partial sum for `consecutive` channels in a row, or at
    l_max with a convergence warning recorded in the result.
    """
    if l_max < 1 and tol <= 0:
        raise DomainError("need l_max >= 1 or a positive tolerance")
    total = 0.0
    quiet = 0
    term = 0.0
    prev_sl = None
    monotone = True
    for l in range(l_max + 1):
        s_l = channel_entropy(channel_matrix(l), n)
        if prev_sl is not None and l > 5 and s_l > prev_sl * (1 + 1e-12):
            monotone = False
        prev_sl = s_l
        term = degeneracy(l, dim) * s_l
        total += term
        if term <= tol * max(abs(total), tol):
            quiet += 1
            if quiet >= consecutive:
                return ChannelSum(total, l + 1, True,
                                  f"{consecutive} sub-tolerance terms", term,
                                  monotone)
        else:
            quiet = 0
    return ChannelSum(total, l_max + 1, False,
                      f"l_max={l_max} reached with tol unmet", term, monotone)
