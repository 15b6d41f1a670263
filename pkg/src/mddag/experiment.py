"""Monte-Carlo acceptance-ratio campaigns.

Each run draws one workload (seed = base_seed + run index), simulates it
under every configured policy, and records whether the run completed with
zero deadline misses.  Runs are bucketed by normalized utilization and
aggregated into acceptance ratios; results are written as sorted CSV so
reruns (sequential or parallel) are byte-identical.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import simulator, taskmodel, workload
from .taskmodel import ModelError, as_fraction
from .workload import ExecTimeSampler, GenConfig


class CampaignError(ModelError):
    pass


DEFAULT_POLICIES = ("gedf_rad", "wc_fifo", "rm")


@dataclass(frozen=True)
class CampaignConfig:
    n_runs: int = 5000
    cores: int = 7
    duration_us: int = 3000 * workload.MS
    policies: Tuple[str, ...] = DEFAULT_POLICIES
    mode: str = simulator.NON_PREEMPTIVE
    bucket_width: float = 0.05
    base_seed: int = 1
    beta: float = 1.2
    load_factor: Tuple[float, float] = (0.1, 1.0)

    def __post_init__(self):
        if self.n_runs < 1:
            raise CampaignError("n_runs must be at least 1")
        w = as_fraction(self.bucket_width)
        if not (0 < w <= 1):
            raise CampaignError("bucket width must be in (0, 1]")
        if self.duration_us < 1:
            raise CampaignError("duration must be positive")


@dataclass(frozen=True)
class RunRecord:
    policy: str
    run_id: int
    seed: int
    norm_util: Fraction
    bucket: Fraction
    misses: int
    passed: bool
    workload_hash: str


@dataclass(frozen=True)
class BucketRow:
    policy: str
    bucket: Fraction
    runs: int
    passes: int

    @property
    def acceptance_ratio(self) -> Fraction:
        return Fraction(self.passes, self.runs)


@dataclass
class CampaignSummary:
    config: CampaignConfig
    records: List[RunRecord]

    def bucket_rows(self) -> List[BucketRow]:
        counts: Dict[Tuple[str, Fraction], List[int]] = {}
        for r in self.records:
            runs_passes = counts.setdefault((r.policy, r.bucket), [0, 0])
            runs_passes[0] += 1
            runs_passes[1] += r.passed
        rows = [BucketRow(policy, bucket, runs, passes)
                for (policy, bucket), (runs, passes) in counts.items()]
        rows.sort(key=lambda b: (b.policy, b.bucket))
        return rows

    def ratios(self, policy: str) -> Dict[Fraction, Fraction]:
        return {b.bucket: b.acceptance_ratio for b in self.bucket_rows() if b.policy == policy}


def bucket_of(norm_util: Fraction, width: Fraction) -> Fraction:
    """Nearest multiple of the bucket width; ties round up."""
    q = norm_util / width
    idx = (q + Fraction(1, 2)).__floor__()
    return idx * width


def _workload_hash(seed: int, exec_us) -> str:
    payload = json.dumps([seed, sorted((t, v, e) for (t, v), e in exec_us.items())])
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def run_single(config: CampaignConfig, run_id: int,
               template=None, sampler: Optional[ExecTimeSampler] = None) -> List[RunRecord]:
    """One workload, simulated under every configured policy."""
    if template is None:
        template = workload.build_default_template()
    if sampler is None:
        sampler = workload.default_sampler(template)
    try:
        seed = config.base_seed + run_id
        gen = GenConfig(seed=seed, beta=config.beta, load_factor=config.load_factor)
        taskset, exec_us = workload.generate(template, sampler, gen)
        norm_util = workload.realized_normalized_utilization(taskset, exec_us, config.cores)
        bucket = bucket_of(norm_util, as_fraction(config.bucket_width))
        whash = _workload_hash(seed, exec_us)
        records = []
        for policy in config.policies:
            result = simulator.run(taskset, config.cores, config.duration_us,
                                   policy, exec_us, mode=config.mode)
            records.append(RunRecord(policy, run_id, seed, norm_util, bucket,
                                     result.miss_count, result.miss_count == 0, whash))
        return records
    except ModelError as e:
        raise CampaignError(f"run {run_id}: {e}") from e


def run_campaign(config: CampaignConfig, jobs: int = 1,
                 template=None, sampler: Optional[ExecTimeSampler] = None) -> CampaignSummary:
    """Execute all runs (optionally in parallel); aggregation is keyed by
    run id, so the summary is independent of execution order."""
    records: List[RunRecord] = []
    if jobs <= 1:
        for i in range(config.n_runs):
            records.extend(run_single(config, i, template, sampler))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            args = [(config, i, template, sampler) for i in range(config.n_runs)]
            for recs in pool.map(_run_single_star, args, chunksize=8):
                records.extend(recs)
    records.sort(key=lambda r: (r.policy, r.run_id))
    return CampaignSummary(config, records)


def _run_single_star(args):
    return run_single(*args)


def _fmt(x) -> str:
    return f"{float(x):.6f}"


def write_csv(summary: CampaignSummary, out_dir) -> Tuple[str, str]:
    """Write runs.csv and summary.csv (LF endings, 6 decimal places)."""
    os.makedirs(out_dir, exist_ok=True)
    runs_path = os.path.join(out_dir, "runs.csv")
    summary_path = os.path.join(out_dir, "summary.csv")

    with open(runs_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["policy", "run_id", "seed", "realized_norm_util", "bucket",
                    "misses", "passed"])
        for r in sorted(summary.records, key=lambda r: (r.policy, r.bucket, r.run_id)):
            w.writerow([r.policy, r.run_id, r.seed, _fmt(r.norm_util), _fmt(r.bucket),
                        r.misses, int(r.passed)])

    with open(summary_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["policy", "bucket", "runs", "passes", "acceptance_ratio"])
        for b in summary.bucket_rows():
            w.writerow([b.policy, _fmt(b.bucket), b.runs, b.passes,
                        _fmt(b.acceptance_ratio)])
    return runs_path, summary_path


def config_from_dict(data) -> CampaignConfig:
    allowed = {"n_runs", "cores", "duration_us", "policies", "mode", "bucket_width",
               "base_seed", "beta", "load_factor"}
    unknown = set(data) - allowed
    if unknown:
        raise CampaignError(f"campaign config: unknown fields {sorted(unknown)}")
    kwargs = dict(data)
    if "policies" in kwargs:
        kwargs["policies"] = tuple(kwargs["policies"])
    if "load_factor" in kwargs and isinstance(kwargs["load_factor"], list):
        kwargs["load_factor"] = tuple(kwargs["load_factor"])
    return CampaignConfig(**kwargs)


def load_config(path) -> CampaignConfig:
    with open(path) as f:
        return config_from_dict(json.load(f))
