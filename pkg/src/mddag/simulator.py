"""Deterministic discrete-event simulation of multi-deadline DAG task sets
on m homogeneous cores.

Scheduling policies are pluggable priority keys over ready vertex
instances; lower key = higher priority, with a fixed (task_id, k, vertex)
tail so every comparison is a total order and runs are bit-for-bit
reproducible.  Event ordering at equal times: completions, then releases,
then dispatch.
"""
from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from . import taskmodel
from .taskmodel import ExecAssignment, ModelError, RadBaseTable, TaskSet

NON_PREEMPTIVE = "non_preemptive"
PREEMPTIVE = "preemptive"
MODES = (NON_PREEMPTIVE, PREEMPTIVE)

WAITING = "waiting"
READY = "ready"
RUNNING = "running"
DONE = "done"


class SimulationError(ModelError):
    pass


class InvalidExecAssignment(SimulationError):
    pass


class DurationNotHyperPeriodMultiple(UserWarning):
    pass


@dataclass
class VertexInstance:
    """Runtime state of one vertex of one job (task_id, k, vertex_id)."""
    task_id: int
    k: int
    vertex_id: int
    exec_us: int
    release_us: int
    state: str = WAITING
    ready_at: Optional[int] = None
    started_at: Optional[int] = None
    finished_at: Optional[int] = None
    remaining_us: int = 0
    pending_preds: int = 0
    core: Optional[int] = None

    @property
    def iid(self) -> Tuple[int, int, int]:
        return (self.task_id, self.k, self.vertex_id)


@dataclass(frozen=True)
class SimContext:
    """Static tables shared by all instances of a run."""
    periods: Mapping[int, int]
    rad_base: RadBaseTable


@dataclass(frozen=True)
class Policy:
    name: str
    key: Callable[[VertexInstance, SimContext], tuple]


def rad(instance: VertexInstance, table: RadBaseTable, period_us: int) -> int:
    """Reference absolute deadline: static per-vertex base shifted by k*T."""
    return table.base(instance.task_id, instance.vertex_id) + instance.k * period_us


def priority_key_gedf_rad(inst: VertexInstance, ctx: SimContext) -> tuple:
    return (rad(inst, ctx.rad_base, ctx.periods[inst.task_id]),
            inst.task_id, inst.k, inst.vertex_id)


def priority_key_wc_fifo(inst: VertexInstance, ctx: SimContext) -> tuple:
    return (inst.ready_at, inst.task_id, inst.k, inst.vertex_id)


def priority_key_rm(inst: VertexInstance, ctx: SimContext) -> tuple:
    return (ctx.periods[inst.task_id], inst.ready_at, inst.task_id, inst.k, inst.vertex_id)


GEDF_RAD = Policy("gedf_rad", priority_key_gedf_rad)
WC_FIFO = Policy("wc_fifo", priority_key_wc_fifo)
RM = Policy("rm", priority_key_rm)

POLICIES: Dict[str, Policy] = {p.name: p for p in (GEDF_RAD, WC_FIFO, RM)}


def get_policy(policy: Union[str, Policy]) -> Policy:
    if isinstance(policy, Policy):
        return policy
    try:
        return POLICIES[policy]
    except KeyError:
        raise SimulationError(f"unknown policy {policy!r}; choose from {sorted(POLICIES)}")


@dataclass(frozen=True)
class TraceEvent:
    t_us: int
    core: Optional[int]
    task: int
    k: int
    vertex: int
    event: str  # start | finish | preempt | release | miss

    def to_dict(self):
        return {"t_us": self.t_us, "core": self.core, "task": self.task,
                "k": self.k, "vertex": self.vertex, "event": self.event}


@dataclass(frozen=True)
class SinkRecord:
    task_id: int
    k: int
    sink_id: int
    finish_us: Optional[int]
    deadline_us: int
    missed: bool


@dataclass
class SimResult:
    sink_records: List[SinkRecord]
    miss_count: int
    total_utilization: Fraction
    instance_times: Dict[Tuple[int, int, int], Tuple[Optional[int], Optional[int]]]
    trace: Optional[List[TraceEvent]] = None


def detect_miss(finish_us: Optional[int], deadline_us: int, duration_us: int) -> bool:
    """Miss iff finished late, or unfinished with the deadline inside the
    simulated window.  Sinks whose deadline exceeds the duration must be
    filtered out by the caller before classification."""
    if finish_us is None:
        return deadline_us <= duration_us
    return finish_us > deadline_us


def _validate_exec(taskset: TaskSet, exec_us: ExecAssignment):
    for task in taskset.tasks:
        for v in task.vertices:
            e = exec_us.get((task.task_id, v.id))
            if e is None or e <= 0:
                raise InvalidExecAssignment(
                    f"task {task.task_id} vertex {v.id}: missing or nonpositive exec time")


def run(taskset: TaskSet,
        cores: int,
        duration_us: int,
        policy: Union[str, Policy],
        exec_us: ExecAssignment,
        mode: str = NON_PREEMPTIVE,
        trace: bool = False) -> SimResult:
    """Simulate the task set and classify every sink instance whose
    absolute deadline falls inside the simulated window."""
    if cores < 1:
        raise SimulationError("need at least one core")
    if duration_us < 1:
        raise SimulationError("duration must be positive")
    if mode not in MODES:
        raise SimulationError(f"unknown mode {mode!r}")
    pol = get_policy(policy)
    _validate_exec(taskset, exec_us)
    if duration_us % taskmodel.hyper_period(taskset) != 0:
        warnings.warn("duration is not a multiple of the hyper-period",
                      DurationNotHyperPeriodMultiple, stacklevel=2)

    ctx = SimContext(periods={t.task_id: t.period_us for t in taskset.tasks},
                     rad_base=taskmodel.rad_base_table(taskset))
    events: List[TraceEvent] = [] if trace else None

    if mode == NON_PREEMPTIVE:
        instances = _run_non_preemptive(taskset, cores, duration_us, pol, ctx, exec_us, events)
    else:
        instances = _run_preemptive(taskset, cores, duration_us, pol, ctx, exec_us, events)

    sink_records: List[SinkRecord] = []
    for task in taskset.tasks:
        k = 0
        while k * task.period_us < duration_us:
            for s in sorted(task.sinks):
                d_abs = task.deadlines[s] + k * task.period_us
                if d_abs > duration_us:
                    continue
                inst = instances[(task.task_id, k, s)]
                missed = detect_miss(inst.finished_at, d_abs, duration_us)
                sink_records.append(SinkRecord(task.task_id, k, s, inst.finished_at,
                                               d_abs, missed))
                if missed and events is not None:
                    events.append(TraceEvent(d_abs, None, task.task_id, k, s, "miss"))
            k += 1

    if events is not None:
        events.sort(key=lambda e: (e.t_us, _EVENT_ORDER[e.event], e.task, e.k, e.vertex))
    return SimResult(
        sink_records=sink_records,
        miss_count=sum(r.missed for r in sink_records),
        total_utilization=taskmodel.total_utilization(taskset, exec_us),
        instance_times={iid: (i.started_at, i.finished_at) for iid, i in instances.items()},
        trace=events,
    )


_EVENT_ORDER = {"finish": 0, "preempt": 1, "release": 2, "start": 3, "miss": 4}


def _make_job(task, k, exec_us, instances):
    release = k * task.period_us
    for v in task.vertices:
        inst = VertexInstance(task.task_id, k, v.id,
                              exec_us[(task.task_id, v.id)], release)
        inst.remaining_us = inst.exec_us
        inst.pending_preds = len(task.preds[v.id])
        instances[inst.iid] = inst
    return release


def _release_times(taskset, duration_us):
    """time -> list of (task, k) released at that time, for k*T < duration."""
    out: Dict[int, List[Tuple[object, int]]] = {}
    for task in taskset.tasks:
        k = 0
        while k * task.period_us < duration_us:
            out.setdefault(k * task.period_us, []).append((task, k))
            k += 1
    return out


def _run_non_preemptive(taskset, cores, duration_us, pol, ctx, exec_us, events):
    instances: Dict[Tuple[int, int, int], VertexInstance] = {}
    releases = _release_times(taskset, duration_us)
    release_times = sorted(releases)
    rel_idx = 0

    ready: List[Tuple[tuple, VertexInstance]] = []  # heap; keys are unique
    completions: List[Tuple[int, int, Tuple[int, int, int]]] = []  # (finish, core, iid)
    free_cores = list(range(cores))
    heapq.heapify(free_cores)

    def enqueue(inst, t):
        inst.state = READY
        inst.ready_at = t
        heapq.heappush(ready, (pol.key(inst, ctx), inst))

    while True:
        t_candidates = []
        if completions:
            t_candidates.append(completions[0][0])
        if rel_idx < len(release_times):
            t_candidates.append(release_times[rel_idx])
        if not t_candidates:
            break
        t = min(t_candidates)
        if t > duration_us:
            break

        # completions first: frees cores and exposes newly ready successors
        while completions and completions[0][0] == t:
            _, core, iid = heapq.heappop(completions)
            inst = instances[iid]
            inst.state = DONE
            inst.finished_at = t
            heapq.heappush(free_cores, core)
            if events is not None:
                events.append(TraceEvent(t, core, *iid, "finish"))
            task = taskset.by_id[inst.task_id]
            for succ in task.succs[inst.vertex_id]:
                nxt = instances[(inst.task_id, inst.k, succ)]
                nxt.pending_preds -= 1
                if nxt.pending_preds == 0:
                    enqueue(nxt, t)

        # releases
        while rel_idx < len(release_times) and release_times[rel_idx] == t:
            for task, k in releases[release_times[rel_idx]]:
                _make_job(task, k, exec_us, instances)
                src = instances[(task.task_id, k, task.source)]
                enqueue(src, t)
                if events is not None:
                    events.append(TraceEvent(t, None, task.task_id, k, task.source, "release"))
            rel_idx += 1

        # dispatch: fill idle cores with the highest-priority ready instances
        # (nothing may start at the stop instant itself)
        while t < duration_us and free_cores and ready:
            _, inst = heapq.heappop(ready)
            core = heapq.heappop(free_cores)
            inst.state = RUNNING
            inst.started_at = t
            inst.core = core
            heapq.heappush(completions, (t + inst.exec_us, core, inst.iid))
            if events is not None:
                events.append(TraceEvent(t, core, *inst.iid, "start"))

    return instances


def _run_preemptive(taskset, cores, duration_us, pol, ctx, exec_us, events):
    instances: Dict[Tuple[int, int, int], VertexInstance] = {}
    releases = _release_times(taskset, duration_us)
    release_times = sorted(releases)
    rel_idx = 0

    # active heap holds ready and running instances; done ones are skipped lazily
    active: List[Tuple[tuple, VertexInstance]] = []
    running: Dict[int, VertexInstance] = {}  # core -> instance
    t = 0

    def enqueue(inst, now):
        inst.state = READY
        inst.ready_at = now
        heapq.heappush(active, (pol.key(inst, ctx), inst))

    while True:
        t_candidates = []
        if rel_idx < len(release_times):
            t_candidates.append(release_times[rel_idx])
        if running:
            t_candidates.append(t + min(i.remaining_us for i in running.values()))
        if not t_candidates:
            break
        t_next = min(t_candidates)
        clamped = t_next > duration_us
        if clamped:
            t_next = duration_us

        elapsed = t_next - t
        for inst in running.values():
            inst.remaining_us -= elapsed
        t = t_next

        finished = sorted((core for core, i in running.items() if i.remaining_us == 0),
                          key=lambda c: running[c].iid)
        for core in finished:
            inst = running.pop(core)
            inst.state = DONE
            inst.finished_at = t
            inst.core = None
            if events is not None:
                events.append(TraceEvent(t, core, *inst.iid, "finish"))
            task = taskset.by_id[inst.task_id]
            for succ in task.succs[inst.vertex_id]:
                nxt = instances[(inst.task_id, inst.k, succ)]
                nxt.pending_preds -= 1
                if nxt.pending_preds == 0:
                    enqueue(nxt, t)

        if clamped or t == duration_us:
            break

        while rel_idx < len(release_times) and release_times[rel_idx] == t:
            for task, k in releases[release_times[rel_idx]]:
                _make_job(task, k, exec_us, instances)
                src = instances[(task.task_id, k, task.source)]
                enqueue(src, t)
                if events is not None:
                    events.append(TraceEvent(t, None, task.task_id, k, task.source, "release"))
            rel_idx += 1

        # select the m globally highest-priority ready-or-running instances
        selected: List[VertexInstance] = []
        popped: List[Tuple[tuple, VertexInstance]] = []
        while active and len(selected) < cores:
            key, inst = heapq.heappop(active)
            if inst.state == DONE:
                continue
            selected.append(inst)
            popped.append((key, inst))
        for item in popped:
            heapq.heappush(active, item)

        chosen = {i.iid for i in selected}
        for core in sorted(running):
            inst = running[core]
            if inst.iid not in chosen:
                del running[core]
                inst.state = READY
                inst.core = None
                if events is not None:
                    events.append(TraceEvent(t, core, *inst.iid, "preempt"))
        free = sorted(set(range(cores)) - set(running))
        for inst in selected:
            if inst.state != RUNNING:
                core = free.pop(0)
                first_start = inst.started_at is None
                inst.state = RUNNING
                inst.core = core
                if first_start:
                    inst.started_at = t
                running[core] = inst
                if events is not None and first_start:
                    events.append(TraceEvent(t, core, *inst.iid, "start"))

    return instances
