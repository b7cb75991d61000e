"""Monte Carlo experiment driver and detection metrics.

One trial generates a record, runs the sub-Nyquist NLLS path and/or the
Nyquist-rate energy detector on the identical record, and compares the
decisions against the ground-truth active set. Pd averages the hit rate
over occupied channels, Pf the false-flag rate over vacant channels.

Per-trial seeds are master_seed + trial_index, so growing the trial
count never reshuffles earlier trials; trials are independent and may be
distributed over worker processes, with metrics reduced as plain integer
counts (scheduling cannot affect the result).
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import ed as ed_mod
from .estimator import DetectionResult, sample_correlation, sequential_forward_nlls
from .multicoset import CosetPattern, coset_pattern, random_pattern, snapshots, sub_nyquist_factor
from .siggen import MultibandSignalSpec, active_draw_stream, generate
from .spectrum import ActiveChannelSet, ChannelPlan, active_set, channel_plan

CSV_FIELDS = ("method", "snr_db", "alpha", "M", "trials", "pd", "pf")

VALID_METHODS = ("nlls", "ed")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a sweep."""

    plan: ChannelPlan
    pattern: CosetPattern
    M: int
    sigma2: float
    snr_db_grid: tuple[float, ...]
    trials: int
    methods: tuple[str, ...] = ("nlls", "ed")
    N_max: int | None = None  # detector cap; defaults to plan.N_max
    P_fa: float = 0.01
    master_seed: int = 0
    active_set: tuple[int, ...] | str = ()  # explicit channels or "random"
    workers: int = 1

    @property
    def detector_n_max(self) -> int:
        return self.plan.N_max if self.N_max is None else self.N_max

    def to_dict(self) -> dict:
        return {
            "plan": {"L": self.plan.L, "B_hz": self.plan.B_hz,
                     "N_max": self.plan.N_max},
            "pattern": {"c": list(self.pattern.c), "seed": self.pattern.seed},
            "M": self.M,
            "sigma2": self.sigma2,
            "snr_db_grid": list(self.snr_db_grid),
            "trials": self.trials,
            "methods": list(self.methods),
            "N_max": self.N_max,
            "P_fa": self.P_fa,
            "master_seed": self.master_seed,
            "active_set": (self.active_set if isinstance(self.active_set, str)
                           else list(self.active_set)),
            "workers": self.workers,
        }


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a parsed config file into an ExperimentConfig."""
    plan_raw = raw["plan"]
    plan = channel_plan(int(plan_raw["L"]), float(plan_raw["B_hz"]),
                        int(plan_raw["N_max"]), plan_raw.get("B_max_hz"))

    pat_raw = raw["pattern"]
    if "c" in pat_raw and pat_raw["c"] is not None:
        pattern = coset_pattern(plan.L, pat_raw["c"], pat_raw.get("seed"))
    else:
        pattern = random_pattern(plan.L, int(pat_raw["p"]), int(pat_raw["seed"]))

    methods = tuple(raw.get("methods", ["nlls", "ed"]))
    for m in methods:
        if m not in VALID_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {VALID_METHODS}")

    active = raw.get("active_set", [])
    if isinstance(active, str):
        if active != "random":
            raise ValueError(f"active_set must be a list or 'random', got {active!r}")
    else:
        active = tuple(active_set(active).indices)

    grid = tuple(float(s) for s in raw["snr_db_grid"])
    if not grid:
        raise ValueError("snr_db_grid must be nonempty")
    trials = int(raw["trials"])
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    cfg = ExperimentConfig(
        plan=plan, pattern=pattern, M=int(raw["M"]), sigma2=float(raw["sigma2"]),
        snr_db_grid=grid, trials=trials, methods=methods,
        N_max=(None if raw.get("N_max") is None else int(raw["N_max"])),
        P_fa=float(raw.get("P_fa", 0.01)),
        master_seed=int(raw.get("master_seed", 0)),
        active_set=active, workers=int(raw.get("workers", 1)),
    )
    if cfg.detector_n_max >= pattern.p:
        raise ValueError(
            f"detector N_max={cfg.detector_n_max} must stay below p={pattern.p}"
        )
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


@dataclass(frozen=True)
class TrialOutcome:
    truth: ActiveChannelSet
    nlls: DetectionResult | None
    ed: np.ndarray | None


def _truth_for_trial(cfg: ExperimentConfig, trial_seed: int) -> ActiveChannelSet:
    if isinstance(cfg.active_set, str):
        rng = active_draw_stream(trial_seed)
        n_act = int(rng.integers(1, cfg.plan.N_max + 1))
        idx = rng.choice(cfg.plan.L, size=n_act, replace=False)
        return active_set(idx)
    return active_set(cfg.active_set)


def run_trial(cfg: ExperimentConfig, trial_seed: int,
              snr_db: float | None = None, M: int | None = None) -> TrialOutcome:
    """One end-to-end pass at a single SNR; deterministic per trial_seed.

    Both methods consume the identical record, so they always see the
    same observation duration.
    """
    snr = cfg.snr_db_grid[0] if snr_db is None else snr_db
    M = cfg.M if M is None else M
    truth = _truth_for_trial(cfg, trial_seed)
    record = generate(MultibandSignalSpec(
        plan=cfg.plan, active=truth, snr_db=snr, noise_power=cfg.sigma2,
        n_samples=cfg.plan.L * M, seed=trial_seed,
    ))

    nlls_result = None
    if "nlls" in cfg.methods:
        r_hat = sample_correlation(snapshots(record, cfg.pattern))
        nlls_result = sequential_forward_nlls(
            r_hat, cfg.pattern, cfg.sigma2, cfg.detector_n_max)

    ed_result = None
    if "ed" in cfg.methods:
        ed_cfg = ed_mod.EdConfig(plan=cfg.plan, M=M, P_fa=cfg.P_fa,
                                 sigma2=cfg.sigma2)
        ed_result = ed_mod.energy_detect(record, ed_cfg)

    return TrialOutcome(truth=truth, nlls=nlls_result, ed=ed_result)


@dataclass
class _Counts:
    """Order-independent reduction state for one (method, cell)."""

    hits: int = 0
    active_total: int = 0
    false_flags: int = 0
    vacant_total: int = 0

    def add(self, other: "_Counts") -> None:
        self.hits += other.hits
        self.active_total += other.active_total
        self.false_flags += other.false_flags
        self.vacant_total += other.vacant_total

    @property
    def pd(self) -> float:
        return self.hits / self.active_total if self.active_total else 0.0

    @property
    def pf(self) -> float:
        return self.false_flags / self.vacant_total if self.vacant_total else 0.0


def _count_outcome(outcome: TrialOutcome, L: int, counts: dict) -> None:
    truth = set(outcome.truth.indices)
    vacant = L - len(truth)
    if outcome.nlls is not None:
        got = set(outcome.nlls.b_hat.indices)
        c = counts["nlls"]
        c.hits += len(got & truth)
        c.false_flags += len(got - truth)
        c.active_total += len(truth)
        c.vacant_total += vacant
    if outcome.ed is not None:
        flagged = {int(i) for i in np.flatnonzero(outcome.ed)}
        c = counts["ed"]
        c.hits += len(flagged & truth)
        c.false_flags += len(flagged - truth)
        c.active_total += len(truth)
        c.vacant_total += vacant


def _chunk_counts(cfg: ExperimentConfig, snr_db: float, M: int,
                  trial_indices: tuple[int, ...]) -> dict:
    counts = {m: _Counts() for m in cfg.methods}
    for idx in trial_indices:
        outcome = run_trial(cfg, cfg.master_seed + idx, snr_db=snr_db, M=M)
        _count_outcome(outcome, cfg.plan.L, counts)
    return counts


@dataclass(frozen=True)
class MetricsRow:
    method: str
    snr_db: float
    M: int
    alpha: float
    pd: float
    pf: float
    trials: int
    wall_time: float


def _run_cell(cfg: ExperimentConfig, snr_db: float, M: int,
              workers: int) -> list[MetricsRow]:
    start = time.perf_counter()
    indices = tuple(range(cfg.trials))
    if workers > 1 and cfg.trials > 1:
        chunks = [indices[i::workers] for i in range(workers)]
        totals = {m: _Counts() for m in cfg.methods}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_chunk_counts, [cfg] * len(chunks),
                                 [snr_db] * len(chunks), [M] * len(chunks), chunks):
                for m in cfg.methods:
                    totals[m].add(part[m])
    else:
        totals = _chunk_counts(cfg, snr_db, M, indices)
    elapsed = time.perf_counter() - start
    alpha = sub_nyquist_factor(cfg.pattern)
    return [
        MetricsRow(method=m, snr_db=snr_db, M=M, alpha=alpha,
                   pd=totals[m].pd, pf=totals[m].pf, trials=cfg.trials,
                   wall_time=elapsed)
        for m in cfg.methods
    ]


def metrics(outcomes, plan: ChannelPlan, methods=VALID_METHODS) -> dict:
    """Aggregate a list of TrialOutcomes into {method: (pd, pf)}."""
    counts = {m: _Counts() for m in methods}
    for outcome in outcomes:
        _count_outcome(outcome, plan.L, counts)
    return {m: (c.pd, c.pf) for m, c in counts.items()}


def sweep_snr(cfg: ExperimentConfig, workers: int | None = None) -> list[MetricsRow]:
    """Pd/Pf at every SNR of the grid; one row per (method, snr)."""
    workers = cfg.workers if workers is None else workers
    rows: list[MetricsRow] = []
    for snr in cfg.snr_db_grid:
        rows.extend(_run_cell(cfg, snr, cfg.M, workers))
    return rows


def sweep_m(cfg: ExperimentConfig, m_grid, workers: int | None = None) -> list[MetricsRow]:
    """Pd/Pf versus snapshot count M at every SNR of the grid."""
    workers = cfg.workers if workers is None else workers
    rows: list[MetricsRow] = []
    for snr in cfg.snr_db_grid:
        for M in m_grid:
            if int(M) < 1:
                raise ValueError(f"M must be >= 1, got {M}")
            rows.extend(_run_cell(cfg, snr, int(M), workers))
    return rows


def write_csv(rows, path) -> None:
    """Fixed-schema CSV: method,snr_db,alpha,M,trials,pd,pf.

    wall_time is deliberately not serialized so identical (config, seed)
    runs produce byte-identical files.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([
                row.method, f"{row.snr_db:g}", f"{row.alpha:.6g}",
                row.M, row.trials, f"{row.pd:.6f}", f"{row.pf:.6f}",
            ])


def read_csv(path) -> list[MetricsRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(MetricsRow(
                method=rec["method"], snr_db=float(rec["snr_db"]),
                M=int(rec["M"]), alpha=float(rec["alpha"]),
                pd=float(rec["pd"]), pf=float(rec["pf"]),
                trials=int(rec["trials"]), wall_time=0.0,
            ))
    return rows
