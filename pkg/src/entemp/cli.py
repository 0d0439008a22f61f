"""Batch front end: config-driven runs with deterministic file outputs.

Subcommands:

    run          one metric: sweeps over the partition list, writes
                 report.json, sweep_<n>.csv per partition, meta.json
    table1       Schwarzschild + charged backgrounds q in {0.1..0.4};
                 writes table1.csv with analytic and extracted
                 temperatures side by side
    oracle-check closed-form Gaussian entropy vs the brute-force grid
                 oracle; nonzero exit on any mismatch
    area-law     fit of S(n) at fixed offset, writes area_law.csv/json

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 regression-check failure.  All scientific outputs are byte-stable for
identical configs (sorted keys, fixed float formatting, deterministic
reduction order); meta.json additionally records the wall-clock runtime
and is the one file excluded from byte-for-byte comparisons.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .errors import ConfigError, SimulationError
from .gaussian import channel_entropy
from .lattice import LatticeConfig, assemble, build_k0, dump_matrix_csv
from .metrics import KINDS, MetricSpec, hawking_temperature
from .oracle import GridOracleConfig, brute_force_entropy
from .thermo import (
    ENERGY_MODES,
    area_law_fit,
    default_eps_list,
    default_partitions,
    temperature_report,
)

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Validated, fully-resolved run configuration."""

    metric_kind: str
    metric_q: float
    metric_dim: int
    lattice_sites: int
    partition_list: List[int]
    eps_values: List[float]
    l_max: int
    tol: float
    energy_mode: str
    branch: str
    output_dir: Optional[str]
    emit_matrices: bool

    def metric(self) -> MetricSpec:
        return MetricSpec(kind=self.metric_kind, q=self.metric_q,
                          dim=self.metric_dim)

    def to_dict(self) -> dict:
        return {
            "metric_kind": self.metric_kind,
            "metric_q": self.metric_q,
            "metric_dim": self.metric_dim,
            "lattice_sites": self.lattice_sites,
            "partition_list": list(self.partition_list),
            "eps_values": list(self.eps_values),
            "l_max": self.l_max,
            "tol": self.tol,
            "energy_mode": self.energy_mode,
            "branch": self.branch,
            "output_dir": self.output_dir,
            "emit_matrices": self.emit_matrices,
        }


KNOWN_KEYS = {
    "metric_kind", "metric_q", "metric_dim", "lattice_sites",
    "partition_list", "eps_values", "eps_max", "eps_count",
    "l_max", "tol", "energy_mode", "branch", "output_dir",
    "emit_matrices",
}


def resolve_config(raw: dict) -> RunConfig:
    """Validate a raw config dict; collects every violation at once."""
    problems: List[str] = []
    for key in raw:
        if key not in KNOWN_KEYS:
            problems.append(f"unknown key {key!r}")

    kind = raw.get("metric_kind")
    if kind not in KINDS or kind == "custom":
        problems.append(
            f"metric_kind must be one of {[k for k in KINDS if k != 'custom']}, "
            f"got {kind!r}"
        )
    q = raw.get("metric_q", 0.0)
    if not isinstance(q, (int, float)):
        problems.append(f"metric_q must be a number, got {q!r}")
    elif kind == "reissner_nordstrom" and not 0.0 <= q < 1.0:
        problems.append(
            f"metric_q={q} violates the charged-horizon invariant "
            f"0 <= q < 1 (non-degenerate outer horizon)"
        )
    dim = raw.get("metric_dim", 2)
    if not isinstance(dim, int) or dim < 1:
        problems.append(f"metric_dim must be a positive integer, got {dim!r}")

    N = raw.get("lattice_sites")
    if not isinstance(N, int) or N < 4:
        problems.append(f"lattice_sites must be an integer >= 4, got {N!r}")
        N = 0

    partitions = raw.get("partition_list")
    if partitions is None:
        partitions = default_partitions(N) if N else []
    elif (not isinstance(partitions, list) or not partitions
          or not all(isinstance(v, int) for v in partitions)):
        problems.append("partition_list must be a nonempty list of integers")
        partitions = []
    else:
        bad = [v for v in partitions if N and not 1 <= v < N]
        if bad:
            problems.append(
                f"partitions {bad} outside 1 <= n < lattice_sites={N}"
            )
        if len(set(partitions)) != len(partitions):
            problems.append("partition_list entries must be distinct")

    if "eps_values" in raw and ("eps_max" in raw or "eps_count" in raw):
        problems.append("give either eps_values or eps_max/eps_count, not both")
    if "eps_values" in raw:
        eps = raw["eps_values"]
        if (not isinstance(eps, list) or len(eps) < 3
                or not all(isinstance(v, (int, float)) for v in eps)):
            problems.append("eps_values must be a list of >= 3 numbers")
            eps = default_eps_list()
        elif eps[0] != 0 or any(b <= a for a, b in zip(eps, eps[1:])):
            problems.append("eps_values must start at 0 and ascend strictly")
    else:
        eps_max = raw.get("eps_max", 0.05)
        eps_count = raw.get("eps_count", 11)
        if not isinstance(eps_count, int) or eps_count < 3:
            problems.append(f"eps_count must be an integer >= 3, got {eps_count!r}")
            eps_count = 11
        if not isinstance(eps_max, (int, float)) or eps_max <= 0:
            problems.append(f"eps_max must be positive, got {eps_max!r}")
            eps_max = 0.05
        eps = default_eps_list(eps_count, eps_max)

    l_max = raw.get("l_max", 600)
    if not isinstance(l_max, int) or l_max < 0:
        problems.append(f"l_max must be a nonnegative integer, got {l_max!r}")
    tol = raw.get("tol", 1e-8)
    if not isinstance(tol, (int, float)) or tol <= 0:
        problems.append(f"tol must be positive, got {tol!r}")
    energy_mode = raw.get("energy_mode", "horizon")
    if energy_mode not in ENERGY_MODES:
        problems.append(f"energy_mode must be one of {ENERGY_MODES}")
    branch = raw.get("branch", "outgoing")
    if branch not in ("outgoing", "ingoing"):
        problems.append("branch must be 'outgoing' or 'ingoing'")
    emit = raw.get("emit_matrices", False)
    if not isinstance(emit, bool):
        problems.append("emit_matrices must be a boolean")
    out = raw.get("output_dir")
    if out is not None and not isinstance(out, str):
        problems.append("output_dir must be a string path")

    if problems:
        raise ConfigError(problems)
    return RunConfig(
        metric_kind=kind,
        metric_q=float(q),
        metric_dim=dim,
        lattice_sites=N,
        partition_list=[int(v) for v in partitions],
        eps_values=[float(v) for v in eps],
        l_max=l_max,
        tol=float(tol),
        energy_mode=energy_mode,
        branch=branch,
        output_dir=out,
        emit_matrices=emit,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config {path} is not valid JSON: {exc}"])
    if not isinstance(raw, dict):
        raise ConfigError([f"config {path} must hold a JSON object"])
    return resolve_config(raw)


# -- deterministic writers --------------------------------------------------

def write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1,
                  separators=(",", ": "))
        fh.write("\n")


def write_csv(path: Path, header: List[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                f"{v:.17g}" if isinstance(v, float) else str(v)
                for v in row
            ) + "\n")


def write_meta(out: Path, config_echo: dict, runtime: float) -> None:
    write_json(out / "meta.json", {
        "schema_version": SCHEMA_VERSION,
        "config": config_echo,
        "versions": {
            "entemp": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "runtime_seconds": runtime,
    })


# -- subcommands -------------------------------------------------------------

def cmd_run(cfg: RunConfig, out: Path, threads: Optional[int]) -> int:
    started = time.time()
    out.mkdir(parents=True, exist_ok=True)
    report = temperature_report(
        cfg.metric(), cfg.lattice_sites,
        n_list=cfg.partition_list,
        eps_list=cfg.eps_values,
        l_max=cfg.l_max, tol=cfg.tol,
        energy_mode=cfg.energy_mode, branch=cfg.branch,
        threads=threads,
    )
    write_json(out / "report.json",
               {"schema_version": SCHEMA_VERSION, "report": report.to_dict()})
    for sweep in report.per_n:
        write_csv(
            out / f"sweep_{sweep.n}.csv",
            ["epsilon", "energy", "entropy"],
            zip(sweep.eps_values, sweep.energies, sweep.entropies),
        )
    if cfg.emit_matrices:
        for n in cfg.partition_list:
            cm = assemble(cfg.metric(),
                          LatticeConfig(cfg.lattice_sites, n, 0, cfg.metric_dim),
                          branch=cfg.branch)
            dump_matrix_csv(cm.k0, out / f"K0_n{n}.csv")
            dump_matrix_csv(cm.k1, out / f"K1_n{n}.csv")
            dump_matrix_csv(cm.k2, out / f"K2_n{n}.csv")
    write_meta(out, cfg.to_dict(), time.time() - started)
    suffix = "" if report.has_horizon else " (no horizon)"
    print(f"run complete: t_ee_mean={report.t_ee_mean:.6g} "
          f"t_hawking={report.t_hawking:.6g}{suffix}")
    return 0


TABLE1_ROWS = [
    ("schwarzschild", 0.0),
    ("reissner_nordstrom", 0.1),
    ("reissner_nordstrom", 0.2),
    ("reissner_nordstrom", 0.3),
    ("reissner_nordstrom", 0.4),
]


def table1_config(scale: str) -> dict:
    if scale == "paper":
        return {"lattice_sites": 600,
                "partition_list": [100, 150, 200, 300, 400, 500]}
    return {"lattice_sites": 200, "partition_list": None}


def cmd_table1(scale: str, out: Path, threads: Optional[int],
               l_max: int, tol: float, energy_mode: str) -> int:
    started = time.time()
    out.mkdir(parents=True, exist_ok=True)
    base = table1_config(scale)
    N = base["lattice_sites"]
    n_list = base["partition_list"] or default_partitions(N)
    rows = []
    for kind, q in TABLE1_ROWS:
        m = MetricSpec(kind=kind, q=q)
        report = temperature_report(
            m, N, n_list=n_list, l_max=l_max, tol=tol,
            energy_mode=energy_mode, threads=threads,
        )
        tag = "sbh" if kind == "schwarzschild" else f"rn_q{q:g}"
        write_json(out / f"report_{tag}.json",
                   {"schema_version": SCHEMA_VERSION,
                    "report": report.to_dict()})
        t_bh = report.t_hawking
        rel = abs(report.t_ee_mean - t_bh) / t_bh
        rows.append((kind, q, t_bh, report.t_ee_mean, rel))
        print(f"{kind} q={q:g}: T_BH={t_bh:.5f} T_EE={report.t_ee_mean:.6g} "
              f"rel_dev={rel:.3g}")
    write_csv(out / "table1.csv",
              ["spacetime", "q", "T_BH", "T_EE", "rel_dev"], rows)
    write_meta(out, {"scale": scale, "lattice_sites": N,
                     "partition_list": list(n_list), "l_max": l_max,
                     "tol": tol, "energy_mode": energy_mode},
               time.time() - started)
    return 0


def _oracle_cases():
    """(name, K, n, tolerance) triples for the cross-check suite."""
    cases = [
        ("uncoupled-pair", np.diag([1.0, 1.0]), 1, 1e-8),
        ("coupled-pair", np.array([[2.0, -1.0], [-1.0, 2.0]]), 1, 1e-6),
        ("flat-chain-3", build_k0(LatticeConfig(N=3, n=1, l=0, dim=2)), 1, 1e-6),
    ]
    rng = np.random.default_rng(20240817)
    for i in range(10):
        N = int(rng.integers(2, 5))
        A = rng.normal(size=(N, N))
        K = A @ A.T + N * np.eye(N)
        n = int(rng.integers(1, N))
        cases.append((f"random-{i}-N{N}-n{n}", K, n, 1e-6))
    return cases


def cmd_oracle_check(verbose: bool = True) -> int:
    failures = 0
    for name, K, n, tolerance in _oracle_cases():
        closed = channel_entropy(K, n)
        small_side = min(n, K.shape[0] - n)
        grid = GridOracleConfig(grid_points=40 if small_side >= 2 else 64)
        brute = brute_force_entropy(K, n, grid)
        diff = abs(closed - brute)
        ok = diff <= tolerance
        if verbose:
            print(f"{'ok' if ok else 'FAIL':4s} {name:22s} "
                  f"closed={closed:.9f} brute={brute:.9f} |diff|={diff:.2e}")
        if not ok:
            failures += 1
    if failures:
        print(f"oracle-check: {failures} mismatch(es)", file=sys.stderr)
        return 4
    print("oracle-check: all cases agree")
    return 0


def cmd_area_law(cfg: RunConfig, eps: float, out: Path,
                 threads: Optional[int]) -> int:
    started = time.time()
    out.mkdir(parents=True, exist_ok=True)
    fit = area_law_fit(
        cfg.metric(), cfg.lattice_sites, cfg.partition_list,
        eps=eps, l_max=cfg.l_max, tol=cfg.tol, branch=cfg.branch,
        threads=threads,
    )
    write_json(out / "area_law.json",
               {"schema_version": SCHEMA_VERSION, "fit": fit.to_dict()})
    write_csv(out / "area_law.csv", ["n", "entropy"],
              zip(fit.n_list, fit.entropies))
    write_meta(out, {**cfg.to_dict(), "area_law_eps": eps},
               time.time() - started)
    print(f"area-law: exponent={fit.exponent:.4f} "
          f"prefactor={fit.prefactor:.6g} r2={fit.r2:.6f}")
    return 0


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count(),
                        help="worker threads (default: hardware)")
    p = argparse.ArgumentParser(
        prog="entemp",
        description="Entanglement temperature of black-hole horizons on a "
                    "radial oscillator lattice",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common],
                         help="single configured run")
    run.add_argument("--config", required=True, help="JSON config path")
    run.add_argument("--out", default=None, help="output directory")

    t1 = sub.add_parser("table1", parents=[common],
                        help="temperature table across backgrounds")
    t1.add_argument("--scale", choices=("desk", "paper"), default="desk")
    t1.add_argument("--out", default="table1_out")
    t1.add_argument("--l-max", type=int, default=600)
    t1.add_argument("--tol", type=float, default=1e-8)
    t1.add_argument("--energy-mode", choices=ENERGY_MODES, default="horizon")

    oc = sub.add_parser("oracle-check", parents=[common],
                        help="closed form vs brute-force entropy")
    oc.add_argument("--quiet", action="store_true")

    al = sub.add_parser("area-law", parents=[common],
                        help="entropy-vs-area fit")
    al.add_argument("--config", required=True, help="JSON config path")
    al.add_argument("--eps", type=float, default=0.0)
    al.add_argument("--out", default=None)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            out = Path(args.out or cfg.output_dir or "run_out")
            return cmd_run(cfg, out, args.threads)
        if args.command == "table1":
            return cmd_table1(args.scale, Path(args.out), args.threads,
                              args.l_max, args.tol, args.energy_mode)
        if args.command == "oracle-check":
            return cmd_oracle_check(verbose=not args.quiet)
        if args.command == "area-law":
            cfg = load_config(args.config)
            out = Path(args.out or cfg.output_dir or "area_law_out")
            return cmd_area_law(cfg, args.eps, out, args.threads)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        json.dump({"error": {"type": "config",
                             "violations": exc.violations}},
                  sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return 2
    except SimulationError as exc:
        json.dump({"error": {"type": type(exc).__name__,
                             "message": str(exc)}},
                  sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
