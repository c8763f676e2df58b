"""Monte Carlo trials, parameter sweeps and CSV output."""

from __future__ import annotations

import csv
import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ao import AOIterate, Solution, SolverError, alternate
from .channel import ChannelSet, draw_geometry, generate_channel_set
from .config import ConfigError, SystemConfig, dbm_to_w
from .dris import diag_phase_step, diag_response
from .manifold import optimize_phase, random_unitary
from .metrics import default_feed

log = logging.getLogger(__name__)

ARCHITECTURES = ("bdris", "dris")
SWEEP_VARIABLES = ("haps_power_dbm", "ris_elements", "num_users", "interference_cap_w")
CSV_HEADER = ["trial", "point", "architecture", "asr_bps_hz", "iterations", "converged",
              "max_interference_w", "wall_time_s", "channel_hash"]


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    trials_per_point: int
    architectures: tuple[str, ...] = ARCHITECTURES

    def __post_init__(self):
        object.__setattr__(self, "variable", normalize_variable(self.variable))
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        bad = set(self.architectures) - set(ARCHITECTURES)
        if bad or not self.architectures:
            raise ConfigError(f"unknown architectures {sorted(bad)}; choose from {ARCHITECTURES}")


@dataclass
class TrialRecord:
    trial: int
    point: float
    architecture: str
    asr: float
    iterations: int
    converged: bool
    max_interference: float
    wall_time: float
    channel_hash: str
    # diagnostics, not written to CSV
    total_power: float = field(default=float("nan"), compare=False)
    max_unitarity_error: float = field(default=float("nan"), compare=False)
    max_tangency_error: float = field(default=float("nan"), compare=False)
    error: str = field(default="", compare=False)


def normalize_variable(name: str) -> str:
    key = name.strip().lower()
    if key not in SWEEP_VARIABLES:
        raise ConfigError(f"unknown sweep variable {name!r}; choose from {SWEEP_VARIABLES}")
    return key


def apply_point(cfg: SystemConfig, variable: str, value) -> SystemConfig:
    variable = normalize_variable(variable)
    if variable == "haps_power_dbm":
        return cfg.replace(haps_power_w=dbm_to_w(float(value)))
    if variable == "interference_cap_w":
        return cfg.replace(interference_cap_w=float(value))
    return cfg.replace(**{variable: int(value)})


def _stream(cfg: SystemConfig, trial: int, *tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, trial, *tag]))


def trial_channels(cfg: SystemConfig, trial: int, block: int | None = None) -> ChannelSet:
    """Channels for ``(seed, trial, block)``; geometry depends on (seed, trial) only."""
    block = cfg.block_index if block is None else block
    geometry = draw_geometry(cfg, _stream(cfg, trial, 0))
    return generate_channel_set(cfg, _stream(cfg, trial, 1, block), block, geometry)


def initial_response(cfg: SystemConfig, trial: int, architecture: str) -> np.ndarray:
    m = cfg.ris_elements
    if architecture == "bdris":
        return random_unitary(m, _stream(cfg, trial, 2))
    if architecture == "dris":
        return diag_response(_stream(cfg, trial, 3).uniform(0, 2 * np.pi, m))
    raise ConfigError(f"unknown architecture {architecture!r}")


def channel_hash(ch: ChannelSet) -> str:
    digest = hashlib.sha256()
    for arr in (ch.h, ch.g, ch.f):
        digest.update(np.ascontiguousarray(arr, dtype=np.complex128).tobytes())
    return digest.hexdigest()[:16]


def solve_trial(cfg: SystemConfig, trial: int, architecture: str) -> tuple[ChannelSet, Solution]:
    ch = trial_channels(cfg, trial)
    w = default_feed(cfg.ris_elements)
    phi0 = initial_response(cfg, trial, architecture)
    step = optimize_phase if architecture == "bdris" else diag_phase_step
    return ch, alternate(cfg, ch, w, phi0, step)


def run_trial(cfg: SystemConfig, trial: int, architecture: str = "bdris",
              point: float = float("nan")) -> TrialRecord:
    """One Monte Carlo trial. Solver failures become ``converged=False`` records."""
    start = time.perf_counter()
    ch = trial_channels(cfg, trial)
    try:
        _, sol = solve_trial(cfg, trial, architecture)
    except SolverError as exc:
        log.warning("trial %d (%s) failed: %s", trial, architecture, exc)
        return TrialRecord(trial, point, architecture, float("nan"), exc.iteration, False,
                           float("nan"), time.perf_counter() - start, channel_hash(ch),
                           error=str(exc))
    return TrialRecord(
        trial=trial, point=point, architecture=architecture, asr=sol.asr,
        iterations=sol.iterations_used, converged=sol.converged,
        max_interference=float(np.max(sol.interference)),
        wall_time=time.perf_counter() - start, channel_hash=channel_hash(ch),
        total_power=float(np.sum(sol.p)), max_unitarity_error=sol.max_unitarity_error,
        max_tangency_error=sol.max_tangency_error)


def _run_task(task):
    cfg, trial, arch, point = task
    return run_trial(cfg, trial, arch, point)


def sweep_tasks(cfg: SystemConfig, spec: SweepSpec):
    for value in spec.values:
        point_cfg = apply_point(cfg, spec.variable, value)
        for trial in range(spec.trials_per_point):
            for arch in spec.architectures:
                yield point_cfg, trial, arch, value


def run_sweep(cfg: SystemConfig, spec: SweepSpec, jobs: int = 1) -> list[TrialRecord]:
    """Records ordered by (point, trial, architecture); both architectures at a
    given (point, trial) see the same channels."""
    tasks = list(sweep_tasks(cfg, spec))
    if jobs <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _fmt(x) -> str:
    return format(float(x), ".12g")


def record_row(rec: TrialRecord) -> list[str]:
    return [str(rec.trial), _fmt(rec.point), rec.architecture, _fmt(rec.asr),
            str(rec.iterations), "true" if rec.converged else "false",
            _fmt(rec.max_interference), _fmt(rec.wall_time), rec.channel_hash]


def write_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(record_row(r) for r in records)


def emit_csv(records, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> list[TrialRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [TrialRecord(int(r[0]), float(r[1]), r[2], float(r[3]), int(r[4]),
                            r[5] == "true", float(r[6]), float(r[7]), r[8]) for r in reader]


TRACE_HEADER = ["iteration", "asr_before_power", "asr_after_power", "asr", "dp2", "dphi2",
                "slack_w", "phase_accepted", "phase_iterations"]


def trace_rows(trace: list[AOIterate]) -> list[list[str]]:
    return [[str(i), _fmt(t.asr_before_power), _fmt(t.asr_after_power), _fmt(t.asr),
             _fmt(t.dp2), _fmt(t.dphi2), _fmt(t.slack), "true" if t.phase_accepted else "false",
             str(t.phase_iterations)] for i, t in enumerate(trace, start=1)]


def emit_trace_csv(trace: list[AOIterate], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        writer.writerows(trace_rows(trace))
