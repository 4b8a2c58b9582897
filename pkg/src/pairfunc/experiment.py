"""Reproducible Monte Carlo experiments over a grid of window scales.

Replication r of grid entry e draws its configuration from the derived stream
(master, e, r), so results are independent of execution order and parallelism
degree; aggregation is a deterministic fold in replication-index order.  Output
files contain only deterministic fields and reproduce byte-for-byte under any
rerun of the same configuration.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import Window
from .models import Model, get_model
from .stats import (
    ScalingFit,
    kolmogorov_to_standard_normal,
    summarize_sample,
    variance_scaling_fit,
    wasserstein1_to_standard_normal,
)

__all__ = ["ExperimentConfig", "RunRecord", "run_experiment", "write_outputs", "ConfigError"]

SCHEMA_VERSION = "pairfunc-v1"
RESULTS_HEADER = "model,n,rep,value,admissible,dropped_zero_g"
SUMMARY_HEADER = "model,n,M,mean,var,w1,ks,seed"
LONG_HEADER = "n,metric,value"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    n_grid: tuple[float, ...]
    reps: int
    seed: int
    d: int = 2
    intensity: float = 1.0
    a: tuple[float, ...] | None = None
    alpha: tuple[float, ...] | None = None
    margin: float = 0.2
    cutoff: float = 1.0
    beta3: float | None = None
    jobs: int | None = None

    def __post_init__(self):
        try:
            get_model(self.model, self.cutoff)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        grid = tuple(float(n) for n in self.n_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid must be non-empty and strictly increasing")
        if self.reps < 2:
            raise ConfigError("need at least 2 replications")
        if self.d < 1:
            raise ConfigError("dimension must be >= 1")
        object.__setattr__(self, "n_grid", grid)

    def window(self, n: float) -> Window:
        return Window(
            n=n,
            dim=self.d,
            coefficients=self.a or (),
            exponents=self.alpha or (),
            boundary_margin=self.margin,
        )

    def canonical(self) -> dict:
        rec = asdict(self)
        rec["n_grid"] = list(self.n_grid)
        rec["a"] = list(self.a) if self.a else None
        rec["alpha"] = list(self.alpha) if self.alpha else None
        return rec

    def hash(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            rec = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_record(rec)

    @classmethod
    def from_record(cls, rec: dict) -> "ExperimentConfig":
        known = {
            "model", "n_grid", "reps", "seed", "d", "intensity",
            "a", "alpha", "margin", "cutoff", "beta3", "jobs",
        }
        unknown = set(rec) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(
                model=rec["model"],
                n_grid=tuple(rec["n_grid"]),
                reps=int(rec["reps"]),
                seed=int(rec["seed"]),
                d=int(rec.get("d", 2)),
                intensity=float(rec.get("intensity", 1.0)),
                a=tuple(rec["a"]) if rec.get("a") else None,
                alpha=tuple(rec["alpha"]) if rec.get("alpha") else None,
                margin=float(rec.get("margin", 0.2)),
                cutoff=float(rec.get("cutoff", 1.0)),
                beta3=rec.get("beta3"),
                jobs=rec.get("jobs"),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc}") from exc


@dataclass(frozen=True)
class ReplicationRow:
    n: float
    rep: int
    value: float
    admissible: int | None
    dropped_zero_g: int | None


@dataclass(frozen=True)
class GridSummary:
    n: float
    count: int
    mean: float
    variance: float
    w1: float
    ks: float
    standardized: np.ndarray


@dataclass(frozen=True)
class RunRecord:
    config: ExperimentConfig
    config_hash: str
    rows: tuple[ReplicationRow, ...]
    summaries: tuple[GridSummary, ...]
    scaling: ScalingFit | None
    wall_time_s: float      # in-memory only; never written to output files
    version: str = __version__


def _one_replication(args) -> ReplicationRow:
    config, e, rep = args
    model = get_model(config.model, config.cutoff)
    window = config.window(config.n_grid[e])
    cfg = model.sample(window, (config.seed, e, rep), config.intensity)
    fv = model.evaluate(cfg)
    return ReplicationRow(
        config.n_grid[e], rep, fv.value, fv.admissible_count, fv.dropped_zero_g
    )


def run_experiment(config: ExperimentConfig) -> RunRecord:
    """Sample, build and evaluate every (n, replication) cell; aggregate
    summaries, distances to normal, and the variance scaling fit."""
    t0 = time.perf_counter()
    tasks = [
        (config, e, rep)
        for e in range(len(config.n_grid))
        for rep in range(config.reps)
    ]
    jobs = config.jobs if config.jobs is not None else (os.cpu_count() or 1)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_one_replication, tasks, chunksize=16))
    else:
        rows = [_one_replication(t) for t in tasks]
    rows.sort(key=lambda r: (r.n, r.rep))

    summaries = []
    for n in config.n_grid:
        values = np.array([r.value for r in rows if r.n == n])
        summary = summarize_sample(values)
        summaries.append(
            GridSummary(
                n,
                summary.count,
                summary.mean,
                summary.variance,
                wasserstein1_to_standard_normal(summary.standardized),
                kolmogorov_to_standard_normal(summary.standardized),
                summary.standardized,
            )
        )
    scaling = None
    if len(config.n_grid) >= 3:
        scaling = variance_scaling_fit(
            [s.n for s in summaries], [s.variance for s in summaries]
        )
    return RunRecord(
        config,
        config.hash(),
        tuple(rows),
        tuple(summaries),
        scaling,
        time.perf_counter() - t0,
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_outputs(record: RunRecord, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write results, summaries, long-format metrics, scaling fit and metadata.

    Every file is a deterministic function of (config, seed); wall time is
    deliberately omitted.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    cfg = record.config

    if fmt == "csv":
        lines = [RESULTS_HEADER]
        for r in record.rows:
            lines.append(
                f"{cfg.model},{_fmt(r.n)},{r.rep},{_fmt(r.value)},"
                f"{_fmt(r.admissible)},{_fmt(r.dropped_zero_g)}"
            )
        written.append(_write(out / "results.csv", "\n".join(lines) + "\n"))
        lines = [SUMMARY_HEADER]
        for s in record.summaries:
            lines.append(
                f"{cfg.model},{_fmt(s.n)},{s.count},{_fmt(s.mean)},"
                f"{_fmt(s.variance)},{_fmt(s.w1)},{_fmt(s.ks)},{cfg.seed}"
            )
        written.append(_write(out / "summary.csv", "\n".join(lines) + "\n"))
        lines = [LONG_HEADER]
        for s in record.summaries:
            for metric, value in (
                ("mean", s.mean), ("var", s.variance), ("w1", s.w1), ("ks", s.ks)
            ):
                lines.append(f"{_fmt(s.n)},{metric},{_fmt(value)}")
        written.append(_write(out / "long.csv", "\n".join(lines) + "\n"))
    elif fmt == "json":
        results = [
            {
                "model": cfg.model, "n": r.n, "rep": r.rep, "value": r.value,
                "admissible": r.admissible, "dropped_zero_g": r.dropped_zero_g,
            }
            for r in record.rows
        ]
        written.append(_write(out / "results.json", json.dumps(results, indent=1) + "\n"))
        summaries = [
            {
                "model": cfg.model, "n": s.n, "M": s.count, "mean": s.mean,
                "var": s.variance, "w1": s.w1, "ks": s.ks, "seed": cfg.seed,
            }
            for s in record.summaries
        ]
        written.append(_write(out / "summary.json", json.dumps(summaries, indent=1) + "\n"))
    else:
        raise ConfigError(f"unknown output format {fmt!r}")

    if record.scaling is not None:
        written.append(
            _write(out / "scaling.json", json.dumps(record.scaling.to_record(), indent=1) + "\n")
        )
    meta = {
        "schema": SCHEMA_VERSION,
        "config": record.config.canonical(),
        "config_hash": record.config_hash,
        "version": record.version,
        "standardization": "sample mean/variance (self-standardized)",
    }
    written.append(_write(out / "meta.json", json.dumps(meta, indent=1, sort_keys=True) + "\n"))
    return written


def _write(path: Path, text: str) -> Path:
    path.write_text(text)
    return path


@dataclass(frozen=True)
class StabilizationSurvey:
    """Empirical stabilization radii over (configuration, insertion) draws and
    the log-linear fit of the survival curve."""

    radii: tuple[int, ...]
    m_values: tuple[int, ...]
    survival: tuple[float, ...]
    slope: float | None
    r_squared: float | None

    def to_record(self) -> dict:
        return {
            "m": list(self.m_values),
            "survival": list(self.survival),
            "slope": self.slope,
            "r_squared": self.r_squared,
        }


def stabilization_survey(
    model_id: str,
    n: float,
    draws: int,
    seed: int,
    d: int = 2,
    cutoff: float = 1.0,
    margin: float = 0.2,
    with_admissibility: bool = False,
) -> StabilizationSurvey:
    """Draw (configuration, insertion point) pairs and measure the empirical
    stabilization radius of the model's pair score at each insertion."""
    from .functionals import empirical_stabilization_radius
    from .process import MarkedPoint, derive_rng
    from .stats import loglinear_fit

    model = get_model(model_id, cutoff)
    window = Window(n=n, dim=d, boundary_margin=margin)
    rule = model.admissibility if with_admissibility else None
    radii = []
    for r in range(draws):
        cfg = model.sample(window, (seed, 0, r))
        rng = derive_rng(seed, 1, r)
        x = tuple(rng.uniform(0.0, 1.0, d) * np.array(window.sides))
        mark = model.mark_model.sample(rng, 1)
        insert = x if mark is None else MarkedPoint(x, float(mark[0]), -1)
        radii.append(empirical_stabilization_radius(cfg, insert, model.score, rule))
    radii_arr = np.array(radii, dtype=int)
    ms, survival = [], []
    for m in range(1, int(radii_arr.max()) + 1):
        frac = float((radii_arr > m).mean())
        if frac <= 0:
            break
        ms.append(m)
        survival.append(frac)
    slope = r2 = None
    if len(ms) >= 2:
        slope, _, _, r2 = loglinear_fit(np.array(ms, float), np.log(survival))
    return StabilizationSurvey(
        tuple(int(v) for v in radii_arr), tuple(ms), tuple(survival), slope, r2
    )
