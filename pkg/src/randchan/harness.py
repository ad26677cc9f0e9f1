"""Reproducible sweep and study runners with plot-ready outputs.

Every run derives its own seed from the config seed and the run
coordinates through the fixed mixing function in `rng`, so adding sizes
or repeats to a config never changes the channels of existing runs.
Runs are embarrassingly parallel; results are re-sorted into a canonical
order before emission so output bytes are independent of scheduling.
"""

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import List, Optional, Sequence

import numpy as np

from .capacity import solve_capacity
from .channel import ProbabilityVector, normalize_rows
from .design import (
    LognormalFamilyConstraints,
    design_optimum,
    evaluate_experiment,
    optimal_gain_search,
)
from .distributions import DistributionSpec, asymptotic_capacity, sample_gain_matrix
from .rng import mix_seed

THREADS_ENV = "RANDCHAN_THREADS"


def _thread_count(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return 1


def _run_tasks(fn, tasks, threads):
    workers = _thread_count(threads)
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


@dataclass(frozen=True)
class SweepConfig:
    """Capacity sweep over alphabet sizes for one gain distribution."""

    family: DistributionSpec
    n_values: Sequence[int]
    gamma: float = 1.0
    repeats: int = 1
    tol: float = 1e-4
    seed: int = 0
    max_iter: int = 10_000
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        ns = list(self.n_values)
        if not ns:
            raise ValueError("n_values must be nonempty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError(f"n_values must be strictly increasing, got {ns}")
        if any(int(n) < 1 for n in ns):
            raise ValueError(f"n_values must be positive, got {ns}")
        object.__setattr__(self, "n_values", tuple(int(n) for n in ns))
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @staticmethod
    def from_dict(d: dict) -> "SweepConfig":
        d = dict(d)
        d["family"] = DistributionSpec.from_dict(d["family"])
        return SweepConfig(**d)


@dataclass(frozen=True)
class SweepRecord:
    """One solve of one sampled channel; wall time is non-deterministic metadata."""

    n: int
    repeat: int
    lower_bits: float
    upper_bits: float
    asymptotic_bits: float
    converged: bool
    iterations: int
    wall_time_s: float


def run_capacity_sweep(cfg: SweepConfig, threads: Optional[int] = None) -> List[SweepRecord]:
    """Sample, normalize, and bracket-solve every (n, repeat) pair.

    Per-run seed = mix(cfg.seed, n, repeat).  Solver non-convergence is
    recorded in-row and the sweep continues.  Records come back sorted by
    (n, repeat) regardless of scheduling.
    """
    limit = asymptotic_capacity(cfg.family)

    def one(task):
        n, rep = task
        run_seed = mix_seed(cfg.seed, n, rep)
        t0 = time.perf_counter()
        gain = sample_gain_matrix(cfg.family, n, cfg.gamma, run_seed)
        bracket = solve_capacity(normalize_rows(gain), tol=cfg.tol, max_iter=cfg.max_iter)
        dt = time.perf_counter() - t0
        return SweepRecord(
            n=n,
            repeat=rep,
            lower_bits=bracket.lower,
            upper_bits=bracket.upper,
            asymptotic_bits=limit,
            converged=bracket.converged,
            iterations=bracket.iterations,
            wall_time_s=dt,
        )

    tasks = [(n, rep) for n in cfg.n_values for rep in range(cfg.repeats)]
    records = _run_tasks(one, tasks, threads)
    records.sort(key=lambda r: (r.n, r.repeat))
    return records


@dataclass(frozen=True)
class DesignStudyConfig:
    """Optimal-vs-suboptimal experiment study over alphabet sizes."""

    l1: float = 1.0
    u1: float = 10.0
    l2: float = 0.0
    u2: float = 2.0
    n_values: Sequence[int] = (100,)
    trials: int = 100
    seed: int = 0
    grid_resolution: float = 0.05
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        ns = list(self.n_values)
        if not ns:
            raise ValueError("n_values must be nonempty")
        object.__setattr__(self, "n_values", tuple(int(n) for n in ns))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        # validates the box
        self.constraints()

    def constraints(self) -> LognormalFamilyConstraints:
        return LognormalFamilyConstraints(l1=self.l1, u1=self.u1, l2=self.l2, u2=self.u2)

    @staticmethod
    def from_dict(d: dict) -> "DesignStudyConfig":
        return DesignStudyConfig(**dict(d))


@dataclass(frozen=True)
class DesignStudyRecord:
    """Mean/variance of per-trial gains in both selection modes at one size."""

    n: int
    trials: int
    optimal_mean: float
    optimal_variance: float
    suboptimal_mean: float
    suboptimal_variance: float
    asymptote_bits: float
    degenerate_variance: bool


def _mean_var(gains: np.ndarray):
    if gains.size < 2:
        return float(gains.mean()), 0.0, True
    return float(gains.mean()), float(gains.var(ddof=1)), False


def run_design_study(cfg: DesignStudyConfig, threads: Optional[int] = None) -> List[DesignStudyRecord]:
    """Empirical mean/variance of optimal and suboptimal gains per size.

    Both modes reuse the same per-trial gain noise, so each trial's
    optimal gain dominates its suboptimal gain by construction.
    """
    c = cfg.constraints()
    opt = design_optimum(c)

    def one(n):
        prior = ProbabilityVector.uniform(n)
        sub = evaluate_experiment(prior, opt.z_star, opt.sigma2_star, n, cfg.trials, cfg.seed)
        best = optimal_gain_search(
            prior, c, n, resolution=cfg.grid_resolution, trials=cfg.trials, seed=cfg.seed
        )
        o_mean, o_var, degen_o = _mean_var(best)
        s_mean, s_var, degen_s = _mean_var(sub)
        return DesignStudyRecord(
            n=n,
            trials=cfg.trials,
            optimal_mean=o_mean,
            optimal_variance=o_var,
            suboptimal_mean=s_mean,
            suboptimal_variance=s_var,
            asymptote_bits=opt.bound_bits,
            degenerate_variance=degen_o or degen_s,
        )

    records = _run_tasks(one, list(cfg.n_values), threads)
    records.sort(key=lambda r: r.n)
    return records


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def _json_value(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(format(float(v), ".12g"))
    return v


def emit_results(
    records,
    format: str = "csv",
    path=None,
    exclude_fields: Sequence[str] = (),
    record_type=None,
) -> None:
    """Write records as CSV (fixed header order, 12 significant digits) or JSON.

    Output is byte-identical for identical inputs.  `exclude_fields` drops
    columns (the sweep CLI drops wall_time_s so outputs stay reproducible
    across runs).  `record_type` supplies the header when `records` is
    empty (an empty list still yields a header-only CSV).
    """
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    if path is None:
        raise ValueError("output path required")
    if record_type is None and records:
        record_type = type(records[0])
    if record_type is None:
        raise ValueError("record_type required for an empty record list")
    names = [f.name for f in fields(record_type) if f.name not in exclude_fields]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if format == "csv":
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(names)
                for rec in records:
                    writer.writerow([_format_value(getattr(rec, name)) for name in names])
            else:
                payload = [
                    {name: _json_value(getattr(rec, name)) for name in names} for rec in records
                ]
                json.dump(payload, fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def load_sweep_config(path) -> SweepConfig:
    """Read a sweep config from JSON; see README for the schema."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return SweepConfig.from_dict(json.load(fh))
    except OSError as exc:
        raise OSError(f"cannot read sweep config {path}: {exc}") from exc


def load_design_config(path) -> DesignStudyConfig:
    """Read a design-study config from JSON; see README for the schema."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return DesignStudyConfig.from_dict(json.load(fh))
    except OSError as exc:
        raise OSError(f"cannot read design config {path}: {exc}") from exc
