"""Monte-Carlo experiments over (n, m, beta) grids.

Each trial owns a seed derived from the base seed and its grid coordinates,
so results do not depend on scheduling or on the number of workers.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import yaml

from .errors import ConfigError
from .graph import Permutation, frobenius_sq, permute
from .metrics import accuracy, alignment_recovery
from .recovery import recover
from .sampling import NoiseParams, derive_seed, edge_unbiased_alpha, sample_er, sample_noisy

__all__ = [
    "PipelineOptions",
    "ExperimentConfig",
    "TrialPoint",
    "TrialRecord",
    "MedianRow",
    "GridResult",
    "CSV_COLUMNS",
    "lower_median",
    "density_for",
    "beta_from_sqrt_beta_log_n",
    "run_trial",
    "grid_points",
    "run_grid",
    "format_records_csv",
    "parse_records_csv",
    "write_records_csv",
    "read_records_csv",
    "format_medians_csv",
    "config_from_mapping",
    "load_config",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "m", "beta", "alpha", "sqrt_beta_log_n", "trial", "seed", "recovery", "frobenius", "accuracy")
LOG2N_OVER_N = "log2n/n"
EDGE_UNBIASED = "edge_unbiased"


@dataclass(frozen=True)
class PipelineOptions:
    cleanup: bool = True
    seeds: bool = False
    T: int | None = None
    threshold: float | str = 0.5
    max_sweeps: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...]
    m_values: tuple[int, ...]
    beta: tuple[float, ...] | None = None
    sqrt_beta_log_n: tuple[float, ...] | None = None
    p: float | str = LOG2N_OVER_N
    alpha: float | str = EDGE_UNBIASED
    trials: int = 10
    base_seed: int = 0
    pipeline: PipelineOptions = field(default_factory=PipelineOptions)

    def __post_init__(self):
        if not self.n_values or any(int(n) < 2 for n in self.n_values):
            raise ConfigError("n must be a non-empty list of integers >= 2")
        if not self.m_values or any(int(m) < 2 for m in self.m_values):
            raise ConfigError("m must be a non-empty list of integers >= 2")
        if (self.beta is None) == (self.sqrt_beta_log_n is None):
            raise ConfigError("give exactly one of beta or sqrt_beta_log_n")
        if self.beta is not None and (not self.beta or any(not 0 <= b <= 1 for b in self.beta)):
            raise ConfigError("beta values must lie in [0, 1]")
        if self.sqrt_beta_log_n is not None:
            if not self.sqrt_beta_log_n or any(x < 0 for x in self.sqrt_beta_log_n):
                raise ConfigError("sqrt_beta_log_n values must be non-negative")
            for n in self.n_values:
                if any(beta_from_sqrt_beta_log_n(x, n) > 1 for x in self.sqrt_beta_log_n):
                    raise ConfigError(f"sqrt_beta_log_n grid gives beta > 1 at n={n}")
        if self.p != LOG2N_OVER_N and not (isinstance(self.p, (int, float)) and 0 <= self.p <= 1):
            raise ConfigError(f"p must be {LOG2N_OVER_N!r} or a probability, got {self.p!r}")
        if self.p == LOG2N_OVER_N and any(density_for(n) > 1 for n in self.n_values):
            raise ConfigError("log^2(n)/n exceeds 1 for some n")
        if self.alpha != EDGE_UNBIASED and not (isinstance(self.alpha, (int, float)) and 0 <= self.alpha <= 1):
            raise ConfigError(f"alpha must be {EDGE_UNBIASED!r} or a probability, got {self.alpha!r}")
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        thr = self.pipeline.threshold
        if thr != "auto" and not (isinstance(thr, (int, float)) and 0 < thr < 1):
            raise ConfigError(f"threshold must be 'auto' or in (0, 1), got {thr!r}")

    @property
    def grid_size(self) -> int:
        k = len(self.beta if self.beta is not None else self.sqrt_beta_log_n)
        return len(self.n_values) * len(self.m_values) * k


@dataclass(frozen=True)
class TrialPoint:
    n: int
    m: int
    beta: float
    p: float | str = LOG2N_OVER_N
    alpha: float | str = EDGE_UNBIASED
    pipeline: PipelineOptions = field(default_factory=PipelineOptions)


@dataclass(frozen=True)
class TrialRecord:
    n: int
    m: int
    beta: float
    alpha: float
    sqrt_beta_log_n: float
    trial: int
    seed: int
    recovery: float
    frobenius: float
    accuracy: float


class MedianRow(NamedTuple):
    n: int
    m: int
    beta: float
    sqrt_beta_log_n: float
    trials: int
    recovery: float
    frobenius: float
    accuracy: float


class GridResult(NamedTuple):
    medians: list[MedianRow]
    records: list[TrialRecord]


def lower_median(values: Iterable[float]) -> float:
    """Element at index ``(k - 1) // 2`` of the ``k`` sorted values."""
    s = sorted(values)
    if not s:
        raise ValueError("median of an empty sequence")
    return s[(len(s) - 1) // 2]


def density_for(n: int) -> float:
    return math.log(n) ** 2 / n


def beta_from_sqrt_beta_log_n(x: float, n: int) -> float:
    return (x / math.log(n)) ** 2


def run_trial(point: TrialPoint, seed: int, trial: int = 0) -> TrialRecord:
    """One Monte-Carlo trial: parent, m noisy relabeled samples, recovery, metrics.

    Sample 0 keeps the parent's labels; samples 1..m-1 are relabeled by
    independent uniform permutations, whose inverses are the true alignments.
    """
    n, m = point.n, point.m
    p = density_for(n) if point.p == LOG2N_OVER_N else float(point.p)

    def stream(key: int) -> np.random.Generator:
        # fixed keys, so a seed gives the same parent and leading samples for every m
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(key,))))

    parent = sample_er(n, p, stream(0))
    alpha = edge_unbiased_alpha(parent, point.beta) if point.alpha == EDGE_UNBIASED else float(point.alpha)
    noise = NoiseParams(alpha=alpha, beta=point.beta)

    observed, truths = [], []
    for i in range(m):
        sample = sample_noisy(parent, noise, stream(2 + 2 * i))
        if i == 0:
            tau = Permutation.identity(n)
        else:
            tau = Permutation.random(n, stream(3 + 2 * i))
        truths.append(tau)
        observed.append(permute(sample, tau.inverse()))

    opts = point.pipeline
    cleanup_seed = int(stream(1).integers(2**63))
    result = recover(
        observed,
        cleanup=opts.cleanup,
        seeds=opts.seeds,
        T=opts.T,
        w=opts.threshold,
        seed=cleanup_seed,
        max_sweeps=opts.max_sweeps,
    )
    return TrialRecord(
        n=n,
        m=m,
        beta=float(point.beta),
        alpha=float(alpha),
        sqrt_beta_log_n=math.sqrt(point.beta) * math.log(n),
        trial=int(trial),
        seed=int(seed),
        recovery=alignment_recovery(result.alignment.composed, truths),
        frobenius=frobenius_sq(result.average, parent),
        accuracy=accuracy(result.estimate, parent),
    )


def grid_points(config: ExperimentConfig) -> list[tuple[TrialPoint, int, int]]:
    """All ``(point, seed, trial)`` tasks in a fixed order (n, m, beta index, trial)."""
    tasks = []
    for n in config.n_values:
        if config.beta is not None:
            betas = [float(b) for b in config.beta]
        else:
            betas = [beta_from_sqrt_beta_log_n(x, n) for x in config.sqrt_beta_log_n]
        for m in config.m_values:
            for k, beta in enumerate(betas):
                point = TrialPoint(int(n), int(m), beta, config.p, config.alpha, config.pipeline)
                for t in range(config.trials):
                    tasks.append((point, derive_seed(config.base_seed, n, m, k, t), t))
    return tasks


def _run_task(task):
    point, seed, trial = task
    rec = run_trial(point, seed, trial)
    log.info(
        "n=%d m=%d sqrt_beta_log_n=%.3f trial=%d recovery=%.3f accuracy=%.5f",
        rec.n, rec.m, rec.sqrt_beta_log_n, rec.trial, rec.recovery, rec.accuracy,
    )
    return rec


def _medians(records: Sequence[TrialRecord]) -> list[MedianRow]:
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.m, r.beta), []).append(r)
    rows = []
    for (n, m, beta), rs in groups.items():
        rows.append(
            MedianRow(
                n=n,
                m=m,
                beta=beta,
                sqrt_beta_log_n=rs[0].sqrt_beta_log_n,
                trials=len(rs),
                recovery=lower_median(r.recovery for r in rs),
                frobenius=lower_median(r.frobenius for r in rs),
                accuracy=lower_median(r.accuracy for r in rs),
            )
        )
    return rows


def run_grid(config: ExperimentConfig, *, workers: int = 1, csv_path: str | os.PathLike | None = None) -> GridResult:
    """Run every grid point and trial; optionally write the per-trial CSV."""
    tasks = grid_points(config)
    log.info("running %d trials on %d worker(s)", len(tasks), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    if csv_path is not None:
        try:
            write_records_csv(records, csv_path)
        except OSError as exc:
            raise OSError(f"cannot write results to {csv_path}: {exc}") from exc
    return GridResult(_medians(records), records)


# --- CSV ---------------------------------------------------------------------

def format_records_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        row = asdict(r)
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def parse_records_csv(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    for row in reader:
        out.append(TrialRecord(**{k: (int(v) if types[k] in (int, "int") else float(v)) for k, v in row.items()}))
    return out


def write_records_csv(records: Sequence[TrialRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_records_csv(records))


def read_records_csv(path: str | os.PathLike) -> list[TrialRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_records_csv(fh.read())


def format_medians_csv(rows: Sequence[MedianRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MedianRow._fields)
    for r in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


# --- config files --------------------------------------------------------------

def _as_tuple(value, conv, name):
    if value is None:
        return None
    if not isinstance(value, (list, tuple)):
        value = [value]
    try:
        return tuple(conv(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in {name}: {exc}") from exc


def config_from_mapping(data: Mapping[str, Any]) -> ExperimentConfig:
    """Build a config from the parsed YAML schema documented in the README."""
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a mapping")
    known = {"n", "m", "beta", "sqrt_beta_log_n", "p", "alpha", "trials", "base_seed", "pipeline"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("n", "m"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")
    pipe = data.get("pipeline") or {}
    if not isinstance(pipe, Mapping):
        raise ConfigError("pipeline must be a mapping")
    unknown = set(pipe) - {f.name for f in fields(PipelineOptions)}
    if unknown:
        raise ConfigError(f"unknown pipeline keys: {sorted(unknown)}")
    try:
        pipeline = PipelineOptions(**pipe)
        return ExperimentConfig(
            n_values=_as_tuple(data["n"], int, "n"),
            m_values=_as_tuple(data["m"], int, "m"),
            beta=_as_tuple(data.get("beta"), float, "beta"),
            sqrt_beta_log_n=_as_tuple(data.get("sqrt_beta_log_n"), float, "sqrt_beta_log_n"),
            p=data.get("p", LOG2N_OVER_N),
            alpha=data.get("alpha", EDGE_UNBIASED),
            trials=int(data.get("trials", 10)),
            base_seed=int(data.get("base_seed", 0)),
            pipeline=pipeline,
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_mapping(data)
