"""Synthetic Autoware-like workload generation.

Ships a callback-graph template with 9 sub-DAG tasks (periods 20 ms to
3000 ms, hyper-period 3000 ms, wcet-based total utilization exactly 7.0),
plus per-vertex execution-time sampling and a load factor for acceptance
ratio sweeps.  The template mimics the structure of a real autonomous
driving stack (multi-rate sensor pipelines, sync joins, queue feedback)
but is a representative stand-in, not a measured system.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Tuple, Union

from . import taskmodel
from .taskmodel import (
    Callback,
    CallbackGraph,
    GraphEdge,
    ModelError,
    PUBSUB,
    QUEUE,
    SUBSCRIPTION,
    SYNC,
    TIMER,
    TaskSet,
    as_fraction,
)

MS = 1000  # microseconds per millisecond


class WorkloadError(ModelError):
    pass


class SamplerMissingVertex(WorkloadError):
    pass


class SampleExceedsWcet(WorkloadError):
    pass


@dataclass(frozen=True)
class UniformSpec:
    lo_us: int
    hi_us: int

    def __post_init__(self):
        if not (0 < self.lo_us <= self.hi_us):
            raise WorkloadError(f"bad uniform range [{self.lo_us}, {self.hi_us}]")


@dataclass(frozen=True)
class EmpiricalSpec:
    samples_us: Tuple[int, ...]

    def __post_init__(self):
        if not self.samples_us or any(s <= 0 for s in self.samples_us):
            raise WorkloadError("empirical sampler needs positive samples")


SamplerSpec = Union[UniformSpec, EmpiricalSpec]


@dataclass(frozen=True)
class ExecTimeSampler:
    """Per-callback execution time distribution, keyed by callback id."""
    specs: Mapping[int, SamplerSpec]

    def __init__(self, specs: Mapping[int, SamplerSpec]):
        object.__setattr__(self, "specs", dict(specs))

    def sample(self, vertex_id: int, rng: random.Random) -> int:
        spec = self.specs.get(vertex_id)
        if spec is None:
            raise SamplerMissingVertex(f"sampler has no spec for vertex {vertex_id}")
        if isinstance(spec, UniformSpec):
            return rng.randint(spec.lo_us, spec.hi_us)
        return spec.samples_us[rng.randrange(len(spec.samples_us))]


@dataclass(frozen=True)
class GenConfig:
    seed: int
    beta: Union[float, Fraction] = 1.2
    # fixed load factor in (0, 1], or a (lo, hi) range swept uniformly per run
    load_factor: Union[float, Tuple[float, float]] = (0.1, 1.0)

    def __post_init__(self):
        lf = self.load_factor
        if isinstance(lf, tuple):
            lo, hi = lf
            if not (0 < lo <= hi <= 1):
                raise WorkloadError(f"bad load factor range {lf}")
        elif not (0 < lf <= 1):
            raise WorkloadError(f"load factor {lf} outside (0, 1]")


def default_sampler(graph: CallbackGraph) -> ExecTimeSampler:
    """Uniform over [0.7 * wcet, wcet] for every callback."""
    specs = {}
    for c in graph.callbacks:
        lo = max(1, -(-7 * c.wcet_us // 10))
        specs[c.id] = UniformSpec(lo, c.wcet_us)
    return ExecTimeSampler(specs)


def generate(template: CallbackGraph,
             sampler: ExecTimeSampler,
             config: GenConfig) -> Tuple[TaskSet, Dict[Tuple[int, int], int]]:
    """Decompose the template (deadlines fixed from wcet critical paths and
    beta) and draw one frozen execution time per vertex, scaled by the load
    factor and clamped to at least 1 us.  Fully determined by the seed."""
    taskset = taskmodel.decompose(template, config.beta)
    rng = random.Random(config.seed)
    lf = config.load_factor
    lam = rng.uniform(lf[0], lf[1]) if isinstance(lf, tuple) else float(lf)

    exec_us: Dict[Tuple[int, int], int] = {}
    for task in sorted(taskset.tasks, key=lambda t: t.task_id):
        for v in sorted(task.vertices, key=lambda v: v.id):
            s = sampler.sample(v.id, rng)
            if s > v.wcet_us:
                raise SampleExceedsWcet(
                    f"vertex {v.id} ({v.name}): sampled {s} us > wcet {v.wcet_us} us")
            exec_us[(task.task_id, v.id)] = max(1, round(lam * s))
    return taskset, exec_us


def sample_exec_for_taskset(taskset: TaskSet, seed: int,
                            sampler: ExecTimeSampler = None,
                            load_factor: float = 1.0) -> Dict[Tuple[int, int], int]:
    """Draw execution times for an already-decomposed task set (used when a
    taskset file carries wcets but no fixed times)."""
    if sampler is None:
        specs = {}
        for task in taskset.tasks:
            for v in task.vertices:
                specs[v.id] = UniformSpec(max(1, -(-7 * v.wcet_us // 10)), v.wcet_us)
        sampler = ExecTimeSampler(specs)
    rng = random.Random(seed)
    exec_us: Dict[Tuple[int, int], int] = {}
    for task in sorted(taskset.tasks, key=lambda t: t.task_id):
        for v in sorted(task.vertices, key=lambda v: v.id):
            s = sampler.sample(v.id, rng)
            if s > v.wcet_us:
                raise SampleExceedsWcet(
                    f"vertex {v.id} ({v.name}): sampled {s} us > wcet {v.wcet_us} us")
            exec_us[(task.task_id, v.id)] = max(1, round(load_factor * s))
    return exec_us


def realized_normalized_utilization(taskset: TaskSet,
                                    exec_us: Mapping[Tuple[int, int], int],
                                    cores: int) -> Fraction:
    if cores < 1:
        raise WorkloadError("core count must be at least 1")
    return taskmodel.total_utilization(taskset, exec_us) / cores


def _timer(cid, name, period_ms, wcet_us):
    return Callback(cid, name, TIMER, wcet_us, period_us=period_ms * MS)


def _sub(cid, name, wcet_us):
    return Callback(cid, name, SUBSCRIPTION, wcet_us)


def _sync(cid, name, wcet_us):
    return Callback(cid, name, SYNC, wcet_us)


def build_default_template() -> CallbackGraph:
    """The shipped template: 9 pub-sub components split by queue edges.

    Periods {20, 30, 50, 100, 150, 300, 500, 1000, 3000} ms (LCM 3000 ms);
    per-task structures keep every wcet critical path below ~0.83 T so that
    the default beta of 1.2 leaves all relative deadlines within the
    period.  Wcet total utilization is exactly 7.0.
    """
    callbacks = [
        # task 1 (20 ms, diamond, util 0.9): pose fusion at control rate
        _timer(1, "ekf_localizer", 20, 2000),
        _sub(2, "pose_twist_fusion", 6000),
        _sub(3, "covariance_update", 6000),
        _sub(4, "pose_publisher", 4000),
        # task 2 (30 ms, fan-out into a sync join, util 0.9)
        _timer(5, "vehicle_interface", 30, 3000),
        _sub(6, "steering_status", 8000),
        _sub(7, "velocity_status", 8000),
        _sub(8, "actuation_status", 5000),
        _sync(9, "vehicle_status_sync", 3000),
        # task 3 (50 ms, two branches joined by a sync callback, util 0.9)
        _timer(10, "lidar_driver", 50, 5000),
        _sub(11, "crop_box_filter", 12000),
        _sub(12, "distortion_corrector", 12000),
        _sync(13, "concat_data", 8000),
        _sub(14, "downsample_filter", 8000),
        # task 4 (100 ms, two sink chains, util 0.85): the multi-sink task
        _timer(15, "ndt_scan_matcher", 100, 5000),
        _sub(16, "voxel_grid_filter", 13000),
        _sub(17, "scan_matching", 13000),
        _sub(18, "pose_estimator", 10000),
        _sub(19, "occupancy_grid_map", 13000),
        _sub(20, "obstacle_segmentation", 13000),
        _sub(21, "object_clustering", 10000),
        _sub(22, "object_tracker", 8000),
        # task 5 (150 ms chain, util 0.8)
        _timer(23, "camera_driver", 150, 10000),
        _sub(24, "image_rectifier", 30000),
        _sub(25, "object_detector", 25000),
        _sub(26, "roi_fusion", 20000),
        _sub(27, "detection_merger", 20000),
        _sub(28, "detected_objects", 15000),
        # task 6 (300 ms chain, util 0.8)
        _timer(29, "behavior_planner", 300, 40000),
        _sub(30, "path_optimizer", 80000),
        _sub(31, "velocity_smoother", 70000),
        _sub(32, "trajectory_publisher", 50000),
        # task 7 (500 ms chain, util 0.75)
        _timer(33, "mission_planner", 500, 100000),
        _sub(34, "route_handler", 150000),
        _sub(35, "goal_validator", 125000),
        # task 8 (1000 ms chain, util 0.7)
        _timer(36, "map_loader", 1000, 300000),
        _sub(37, "lanelet_projector", 400000),
        # task 9 (3000 ms single vertex, util 0.4)
        _timer(38, "system_monitor", 3000, 1200000),
    ]
    pub = [
        (1, 2), (1, 3), (2, 4), (3, 4),
        (5, 6), (5, 7), (5, 8), (6, 9), (7, 9), (8, 9),
        (10, 11), (10, 12), (11, 13), (12, 13), (13, 14),
        (15, 16), (16, 17), (17, 18), (15, 19), (19, 20), (20, 21), (21, 22),
        (23, 24), (24, 25), (25, 26), (26, 27), (27, 28),
        (29, 30), (30, 31), (31, 32),
        (33, 34), (34, 35),
        (36, 37),
    ]
    # queue edges: cut points between sub-DAGs, including a feedback loop
    # between localization (task 4) and pose fusion (task 1)
    queue = [
        (18, 1),   # pose estimate feeds the fused-pose timer pipeline
        (4, 15),   # previous fused pose seeds the next scan matching
        (14, 15),  # downsampled cloud consumed via take API
        (9, 29),   # vehicle status read from a member-variable queue
        (22, 29),  # tracked objects consumed by planning
        (28, 29),  # camera detections consumed by planning
        (32, 33),  # current trajectory read back by mission planning
        (35, 29),  # route read by the behavior planner
        (37, 10),  # map consumed by the sensing pipeline
    ]
    edges = [GraphEdge(s, d, PUBSUB) for s, d in pub]
    edges += [GraphEdge(s, d, QUEUE) for s, d in queue]
    return CallbackGraph(callbacks, edges)
