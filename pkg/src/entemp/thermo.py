"""Offset sweeps, slope extraction and temperature/area-law reports.

For a fixed partition n the sweep evaluates, per angular channel,
ground energy and across-partition entropy at every offset eps in the
list, accumulates degeneracy-weighted changes relative to eps = 0, and
fits both curves with ordinary least squares.  The entanglement
temperature is the slope ratio

    t_ee = (dE/d eps) / (dS/d eps)

with energies reported in horizon-radius units (the lattice energy
scale is 1/spacing = n/r_h, so lattice energies are multiplied by n).

Energy accumulation modes:

  "horizon" (default): per channel, the energy response of a reference
      assembly carrying only the universal radius-dilation factors is
      subtracted before the channel sum.  The dilation response is a
      pure vacuum effect: it is nonzero even for the flat metric, grows
      without bound in the angular sum, and carries no horizon
      information, so removing it makes the energy sum flat-null and
      cancels the dominant angular divergence.  See the decisions
      ledger discussion in the repository notes.

  "total": plain degeneracy-weighted sum of ground-energy changes.
      Divergent in the angular cutoff; kept for comparison runs.

Entropy is always the plain degeneracy-weighted sum; it converges.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import (
    AssemblyError,
    DegenerateSweepError,
    DomainError,
    FitError,
    NotSPDError,
)
from .gaussian import ground_state, reduced_spectrum
from .lattice import assemble_family
from .metrics import MetricSpec, degeneracy, hawking_temperature

ENERGY_MODES = ("horizon", "total")

R2_GATE = 0.995          # sweeps below this are flagged nonlinear
SLOPE_FLOOR = 1e-12      # entropy slopes below this are degenerate


def default_eps_list(count: int = 11, eps_max: float = 0.05) -> List[float]:
    """Uniform offsets on [0, eps_max], first element exactly 0."""
    return [eps_max * i / (count - 1) for i in range(count)]


def default_partitions(N: int) -> List[int]:
    """Partition indices spanning the lattice away from the edges."""
    fracs = (1 / 6, 1 / 4, 1 / 3, 1 / 2, 2 / 3, 5 / 6)
    out = []
    for fr in fracs:
        n = max(1, min(N - 1, round(N * fr)))
        if n not in out:
            out.append(n)
    return out


def _ols(x: np.ndarray, y: np.ndarray) -> tuple:
    """Least-squares slope, intercept and r^2 (r^2 = 1 for flat data)."""
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


@dataclass
class SweepResult:
    """Per-partition sweep samples, fits and diagnostics."""

    n: int
    eps_values: List[float]
    entropies: List[float]          # absolute S(eps)
    energies: List[float]           # E(eps) - E(0), horizon-radius units
    slope_S: float
    slope_E: float
    r2_S: float
    r2_E: float
    t_ee: float
    slope_S_cd: float               # central-difference cross-check
    slope_E_cd: float
    channels: int
    l_converged: bool
    termination: str
    nonlinear: bool
    monotonic_S: bool
    energy_mode: str
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eps_values": list(self.eps_values),
            "entropies": list(self.entropies),
            "energies": list(self.energies),
            "slope_S": self.slope_S,
            "slope_E": self.slope_E,
            "r2_S": self.r2_S,
            "r2_E": self.r2_E,
            "t_ee": self.t_ee,
            "slope_S_cd": self.slope_S_cd,
            "slope_E_cd": self.slope_E_cd,
            "channels": self.channels,
            "l_converged": self.l_converged,
            "termination": self.termination,
            "nonlinear": self.nonlinear,
            "monotonic_S": self.monotonic_S,
            "energy_mode": self.energy_mode,
            "warnings": list(self.warnings),
        }


def _validate_eps_list(eps_list: Sequence[float]) -> np.ndarray:
    eps = np.asarray(list(eps_list), dtype=float)
    if eps.size < 3:
        raise DomainError("eps_list needs at least 3 points")
    if eps[0] != 0.0:
        raise DomainError("eps_list must start at 0")
    if np.any(np.diff(eps) <= 0):
        raise DomainError("eps_list must be strictly ascending")
    return eps


def epsilon_sweep(
    m: MetricSpec,
    N: int,
    n: int,
    eps_list: Sequence[float] | None = None,
    l_max: int = 600,
    tol: float = 1e-8,
    energy_mode: str = "horizon",
    branch: str = "outgoing",
) -> SweepResult:
    """Sweep the time offset at fixed partition n and fit the slopes."""
    if energy_mode not in ENERGY_MODES:
        raise DomainError(f"energy_mode must be one of {ENERGY_MODES}")
    eps = _validate_eps_list(eps_list if eps_list is not None
                             else default_eps_list())
    dim = m.dim
    fam = assemble_family(m, N, n, dim, branch=branch, sector="full")
    ref = (assemble_family(m, N, n, dim, branch=branch, sector="dilation")
           if energy_mode == "horizon" else None)

    ne = eps.size
    dE = np.zeros(ne)
    dS = np.zeros(ne)
    s0_total = 0.0
    quiet = 0
    converged = False
    termination = f"l_max={l_max} reached with tol unmet"
    channels = 0

    for l in range(l_max + 1):
        cm = fam.channel(l)
        cm_ref = ref.channel(l) if ref is not None else None
        e_l = np.empty(ne)
        s_l = np.empty(ne)
        for k, e in enumerate(eps):
            K = cm.coupling(e, check=False)
            try:
                gs = ground_state(K)
            except NotSPDError as exc:
                raise AssemblyError(float(e), exc.min_eigenvalue) from exc
            e_l[k] = gs.energy
            s_l[k] = reduced_spectrum(gs, n).total
            if cm_ref is not None and k > 0:
                try:
                    e_l[k] -= ground_state(
                        cm_ref.coupling(e, check=False)).energy
                except NotSPDError as exc:
                    raise AssemblyError(float(e), exc.min_eigenvalue) from exc
            elif cm_ref is not None:
                e_l[k] -= gs.energy  # reference coincides at eps = 0
        g = degeneracy(l, dim)
        d_e = g * (e_l - e_l[0])
        d_s = g * (s_l - s_l[0])
        dE += d_e
        dS += d_s
        s0_total += g * s_l[0]
        channels = l + 1

        term_s0 = g * s_l[0]
        term_ds = float(np.max(np.abs(d_s)))
        term_de = float(np.max(np.abs(d_e)))
        small = (
            term_s0 <= tol * max(s0_total, tol)
            and term_ds <= tol * max(float(np.max(np.abs(dS))), tol)
            and term_de <= tol * max(float(np.max(np.abs(dE))), tol)
        )
        if small:
            quiet += 1
            if quiet >= 3:
                converged = True
                termination = "3 consecutive sub-tolerance channels"
                break
        else:
            quiet = 0

    entropies = s0_total + dS
    energies = float(n) * dE  # horizon-radius units
    slope_S, _, r2_S = _ols(eps, entropies)
    slope_E, _, r2_E = _ols(eps, energies)
    if abs(slope_S) < SLOPE_FLOOR:
        raise DegenerateSweepError(
            f"entropy slope {slope_S:.3e} too small to form a temperature"
        )
    t_ee = slope_E / slope_S
    # three-point check about the first interior sample
    slope_S_cd = float((entropies[2] - entropies[0]) / (eps[2] - eps[0]))
    slope_E_cd = float((energies[2] - energies[0]) / (eps[2] - eps[0]))
    monotonic = bool(np.all(np.diff(entropies) >= -1e-10 * max(1.0, s0_total)))
    nonlinear = (r2_S < R2_GATE) or (r2_E < R2_GATE)
    warnings = []
    if not converged:
        warnings.append(f"channel sum not converged: {termination}")
    if nonlinear:
        warnings.append(f"nonlinear sweep: r2_S={r2_S:.6f} r2_E={r2_E:.6f}")
    return SweepResult(
        n=n,
        eps_values=[float(v) for v in eps],
        entropies=[float(v) for v in entropies],
        energies=[float(v) for v in energies],
        slope_S=slope_S,
        slope_E=slope_E,
        r2_S=r2_S,
        r2_E=r2_E,
        t_ee=float(t_ee),
        slope_S_cd=slope_S_cd,
        slope_E_cd=slope_E_cd,
        channels=channels,
        l_converged=converged,
        termination=termination,
        nonlinear=nonlinear,
        monotonic_S=monotonic,
        energy_mode=energy_mode,
        warnings=warnings,
    )


@dataclass
class TemperatureReport:
    """Partition-averaged entanglement temperature vs the analytic value."""

    metric_kind: str
    q: float
    dim: int
    N: int
    per_n: List[SweepResult]
    t_ee_mean: float
    t_ee_std: float
    t_hawking: float
    has_horizon: bool
    relative_deviation: Optional[float]
    excluded: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "metric_kind": self.metric_kind,
            "q": self.q,
            "dim": self.dim,
            "N": self.N,
            "t_ee_mean": self.t_ee_mean,
            "t_ee_std": self.t_ee_std,
            "t_hawking": self.t_hawking,
            "has_horizon": self.has_horizon,
            "relative_deviation": self.relative_deviation,
            "excluded": list(self.excluded),
            "per_n": [s.to_dict() for s in self.per_n],
        }


def temperature_report(
    m: MetricSpec,
    N: int,
    n_list: Sequence[int] | None = None,
    eps_list: Sequence[float] | None = None,
    l_max: int = 600,
    tol: float = 1e-8,
    energy_mode: str = "horizon",
    branch: str = "outgoing",
    threads: int | None = None,
) -> TemperatureReport:
    """Run sweeps for every partition and aggregate the temperature.

    Nonlinear sweeps (r^2 below the gate) are excluded from the mean,
    as are degenerate ones; an all-degenerate run raises.
    """
    n_list = list(n_list) if n_list is not None else default_partitions(N)
    if not n_list:
        raise DomainError("n_list must not be empty")
    if len(set(n_list)) != len(n_list):
        raise DomainError("n_list entries must be distinct")
    for n in n_list:
        if not 1 <= n < N:
            raise DomainError(f"partition {n} outside 1 <= n < N={N}")

    results: List[Optional[SweepResult]] = [None] * len(n_list)
    failures: List[dict] = []

    def run(idx_n):
        idx, n = idx_n
        return idx, epsilon_sweep(
            m, N, n, eps_list=eps_list, l_max=l_max, tol=tol,
            energy_mode=energy_mode, branch=branch,
        )

    jobs = list(enumerate(n_list))
    if threads is not None and threads <= 1:
        for job in jobs:
            try:
                idx, res = run(job)
                results[idx] = res
            except DegenerateSweepError as exc:
                failures.append({"n": job[1], "reason": str(exc)})
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run, job) for job in jobs]
            for job, fut in zip(jobs, futures):
                try:
                    idx, res = fut.result()
                    results[idx] = res
                except DegenerateSweepError as exc:
                    failures.append({"n": job[1], "reason": str(exc)})

    per_n = [r for r in results if r is not None]
    if not per_n:
        raise DegenerateSweepError(
            "all sweeps degenerate; no temperature can be formed"
        )
    excluded = list(failures)
    accepted = []
    for r in per_n:
        if r.nonlinear:
            excluded.append({
                "n": r.n,
                "reason": f"nonlinear fit r2_S={r.r2_S:.6f} r2_E={r.r2_E:.6f}",
            })
        else:
            accepted.append(r.t_ee)
    if not accepted:
        accepted = [r.t_ee for r in per_n]  # fall back to all sweeps
    t_mean = float(np.mean(accepted))
    t_std = float(np.std(accepted))
    th = hawking_temperature(m)
    rel = (abs(t_mean - th.value) / th.value) if th.has_horizon else None
    return TemperatureReport(
        metric_kind=m.kind,
        q=m.q,
        dim=m.dim,
        N=N,
        per_n=per_n,
        t_ee_mean=t_mean,
        t_ee_std=t_std,
        t_hawking=th.value,
        has_horizon=th.has_horizon,
        relative_deviation=rel,
        excluded=excluded,
    )


@dataclass
class AreaLawFit:
    """log S vs log n fit at fixed offset."""

    eps: float
    n_list: List[int]
    entropies: List[float]
    exponent: float
    prefactor: float
    r2: float

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "n_list": list(self.n_list),
            "entropies": list(self.entropies),
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r2": self.r2,
        }


def area_law_fit(
    m: MetricSpec,
    N: int,
    n_list: Sequence[int],
    eps: float = 0.0,
    l_max: int = 2000,
    tol: float = 1e-8,
    branch: str = "outgoing",
    threads: int | None = None,
) -> AreaLawFit:
    """Fit S(n) = C n^k across partitions at one offset."""
    n_list = list(n_list)
    if len(n_list) < 4:
        raise FitError("area-law fit needs at least 4 distinct partitions")
    if len(set(n_list)) != len(n_list):
        raise FitError("area-law fit needs distinct partitions")

    def total_entropy(n: int) -> float:
        fam = assemble_family(m, N, n, m.dim, branch=branch, sector="full")
        total = 0.0
        quiet = 0
        for l in range(l_max + 1):
            K = fam.channel(l).coupling(eps, check=False)
            try:
                gs = ground_state(K)
            except NotSPDError as exc:
                raise AssemblyError(eps, exc.min_eigenvalue) from exc
            term = degeneracy(l, m.dim) * reduced_spectrum(gs, n).total
            total += term
            if term <= tol * max(total, tol):
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0
        return total

    if threads is None or threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entropies = list(pool.map(total_entropy, n_list))
    else:
        entropies = [total_entropy(n) for n in n_list]

    logn = np.log(np.asarray(n_list, dtype=float))
    logs = np.log(np.asarray(entropies, dtype=float))
    exponent, intercept, r2 = _ols(logn, logs)
    return AreaLawFit(
        eps=float(eps),
        n_list=[int(v) for v in n_list],
        entropies=[float(v) for v in entropies],
        exponent=exponent,
        prefactor=float(math.exp(intercept)),
        r2=r2,
    )
