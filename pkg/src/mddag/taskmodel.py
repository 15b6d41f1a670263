"""Multi-deadline DAG task model.

A callback graph (timer / subscription / sync callbacks connected by
pub-sub and queue edges) is decomposed into periodic DAG tasks by cutting
every queue edge.  Each resulting task has a single timer source, one or
more sink vertices, and one relative deadline per sink.  All times are
integer microseconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

TIMER = "timer"
SUBSCRIPTION = "subscription"
SYNC = "sync"
CALLBACK_KINDS = (TIMER, SUBSCRIPTION, SYNC)

PUBSUB = "pubsub"
QUEUE = "queue"
EDGE_KINDS = (PUBSUB, QUEUE)

Rational = Union[int, float, Fraction]


class ModelError(Exception):
    """Base class for every validation error raised by this package."""


class ComponentWithoutTimerSource(ModelError):
    """A pub-sub component has no timer callback acting as its source."""


class MultipleSources(ModelError):
    """A pub-sub component has more than one candidate source vertex."""


class CycleAfterSplit(ModelError):
    """The pub-sub subgraph is cyclic even after queue edges are removed."""


class NotASink(ModelError):
    pass


class UnknownVertex(ModelError):
    pass


def as_fraction(x: Rational) -> Fraction:
    """Convert to an exact Fraction; floats go through their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    raise TypeError(f"not a rational value: {x!r}")


@dataclass(frozen=True)
class Callback:
    id: int
    name: str
    kind: str
    wcet_us: int
    period_us: Optional[int] = None

    def __post_init__(self):
        if self.kind not in CALLBACK_KINDS:
            raise ModelError(f"callback {self.name!r}: unknown kind {self.kind!r}")
        if self.wcet_us <= 0:
            raise ModelError(f"callback {self.name!r}: wcet must be positive")
        if self.kind == TIMER:
            if self.period_us is None or self.period_us <= 0:
                raise ModelError(f"timer callback {self.name!r} needs a positive period")
        elif self.period_us is not None:
            raise ModelError(f"non-timer callback {self.name!r} must not have a period")


@dataclass(frozen=True)
class GraphEdge:
    src: int
    dst: int
    kind: str

    def __post_init__(self):
        if self.kind not in EDGE_KINDS:
            raise ModelError(f"edge {self.src}->{self.dst}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class CallbackGraph:
    callbacks: Tuple[Callback, ...]
    edges: Tuple[GraphEdge, ...]

    def __init__(self, callbacks: Sequence[Callback], edges: Sequence[GraphEdge]):
        object.__setattr__(self, "callbacks", tuple(callbacks))
        object.__setattr__(self, "edges", tuple(edges))
        self._validate()

    def _validate(self):
        ids = [c.id for c in self.callbacks]
        if len(ids) != len(set(ids)):
            raise ModelError("duplicate callback ids")
        known = set(ids)
        for e in self.edges:
            if e.src not in known or e.dst not in known:
                raise ModelError(f"edge {e.src}->{e.dst} references unknown callback")
        pub_edges = [(e.src, e.dst) for e in self.edges if e.kind == PUBSUB]
        if _toposort(known, pub_edges) is None:
            raise CycleAfterSplit("pub-sub subgraph contains a cycle")

    def callback_by_id(self, cid: int) -> Callback:
        for c in self.callbacks:
            if c.id == cid:
                return c
        raise UnknownVertex(f"no callback with id {cid}")


@dataclass(frozen=True)
class Vertex:
    id: int
    name: str
    wcet_us: int


@dataclass(frozen=True)
class DagTask:
    task_id: int
    period_us: int
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Tuple[int, int], ...]
    deadlines: Mapping[int, int]

    def __init__(self, task_id, period_us, vertices, edges, deadlines):
        object.__setattr__(self, "task_id", task_id)
        object.__setattr__(self, "period_us", period_us)
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "edges", tuple((int(s), int(d)) for s, d in edges))
        object.__setattr__(self, "deadlines", dict(deadlines))
        self._validate()

    def _validate(self):
        if self.period_us <= 0:
            raise ModelError(f"task {self.task_id}: period must be positive")
        ids = [v.id for v in self.vertices]
        if not ids:
            raise ModelError(f"task {self.task_id}: no vertices")
        if len(ids) != len(set(ids)):
            raise ModelError(f"task {self.task_id}: duplicate vertex ids")
        known = set(ids)
        for s, d in self.edges:
            if s not in known or d not in known:
                raise ModelError(f"task {self.task_id}: edge {s}->{d} references unknown vertex")
        topo = _toposort(known, self.edges)
        if topo is None:
            raise ModelError(f"task {self.task_id}: graph is cyclic")
        indeg = {v: 0 for v in known}
        for _, d in self.edges:
            indeg[d] += 1
        sources = [v for v in known if indeg[v] == 0]
        if len(sources) != 1:
            raise ModelError(f"task {self.task_id}: expected exactly one source, got {sorted(sources)}")
        reachable = _reachable(sources[0], self.succs)
        if reachable != known:
            missing = sorted(known - reachable)
            raise ModelError(f"task {self.task_id}: vertices {missing} unreachable from source")
        if set(self.deadlines) != self.sinks:
            raise ModelError(f"task {self.task_id}: deadlines must cover exactly the sinks")
        for s, d_us in self.deadlines.items():
            if d_us <= 0:
                raise ModelError(f"task {self.task_id}: deadline of sink {s} must be positive")

    @cached_property
    def vertex_map(self) -> Dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def succs(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {v.id: [] for v in self.vertices}
        for s, d in self.edges:
            out[s].append(d)
        return out

    @cached_property
    def preds(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {v.id: [] for v in self.vertices}
        for s, d in self.edges:
            out[d].append(s)
        return out

    @cached_property
    def source(self) -> int:
        return next(v.id for v in self.vertices if not self.preds[v.id])

    @cached_property
    def sinks(self) -> Set[int]:
        return {v.id for v in self.vertices if not self.succs[v.id]}

    @cached_property
    def topo_order(self) -> Tuple[int, ...]:
        order = _toposort({v.id for v in self.vertices}, self.edges)
        assert order is not None
        return tuple(order)


@dataclass(frozen=True)
class TaskSet:
    tasks: Tuple[DagTask, ...]

    def __init__(self, tasks: Sequence[DagTask]):
        object.__setattr__(self, "tasks", tuple(tasks))
        if not self.tasks:
            raise ModelError("task set must be non-empty")
        ids = [t.task_id for t in self.tasks]
        if len(ids) != len(set(ids)):
            raise ModelError("duplicate task ids")

    @cached_property
    def by_id(self) -> Dict[int, DagTask]:
        return {t.task_id: t for t in self.tasks}


@dataclass(frozen=True)
class RadBaseTable:
    """Per task: vertex id -> earliest relative deadline among its
    descendant-or-self sinks.  Shifting by k*T turns entries into RADs."""

    entries: Mapping[int, Mapping[int, int]]

    def base(self, task_id: int, vertex_id: int) -> int:
        return self.entries[task_id][vertex_id]


def _toposort(vertex_ids, edges) -> Optional[List[int]]:
    """Kahn's algorithm; returns None if the graph is cyclic."""
    indeg = {v: 0 for v in vertex_ids}
    succ = {v: [] for v in vertex_ids}
    for s, d in edges:
        succ[s].append(d)
        indeg[d] += 1
    queue = sorted(v for v in vertex_ids if indeg[v] == 0)
    order = []
    while queue:
        v = queue.pop(0)
        order.append(v)
        for d in sorted(succ[v]):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    if len(order) != len(indeg):
        return None
    return order


def _reachable(start, succs) -> Set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for d in succs[v]:
            if d not in seen:
                seen.add(d)
                stack.append(d)
    return seen


def _longest_from_source(vertices: Mapping[int, int], edges, topo) -> Dict[int, int]:
    """Longest (wcet-sum) path from the source to every vertex, endpoints included."""
    preds: Dict[int, List[int]] = {v: [] for v in vertices}
    for s, d in edges:
        preds[d].append(s)
    dist: Dict[int, int] = {}
    for v in topo:
        best = max((dist[p] for p in preds[v]), default=0)
        dist[v] = best + vertices[v]
    return dist


def critical_path_length(task: DagTask, sink_id: int) -> int:
    """Maximum wcet sum over all source-to-sink paths, both endpoints included."""
    if sink_id not in task.sinks:
        raise NotASink(f"task {task.task_id}: vertex {sink_id} is not a sink")
    wcets = {v.id: v.wcet_us for v in task.vertices}
    dist = _longest_from_source(wcets, task.edges, task.topo_order)
    return dist[sink_id]


def assign_deadlines(task: DagTask, beta: Rational) -> Dict[int, int]:
    """Relative deadline per sink: ceil(beta * critical path length)."""
    b = as_fraction(beta)
    if b <= 0:
        raise ModelError("beta must be positive")
    return {s: int(math.ceil(b * critical_path_length(task, s))) for s in sorted(task.sinks)}


def descendant_sinks(task: DagTask, vertex_id: int) -> Set[int]:
    """Sinks strictly below the given vertex (empty iff it is a sink itself)."""
    if vertex_id not in task.vertex_map:
        raise UnknownVertex(f"task {task.task_id}: unknown vertex {vertex_id}")
    reach = _reachable(vertex_id, task.succs) - {vertex_id}
    return reach & task.sinks


def rad_base_table(taskset: TaskSet) -> RadBaseTable:
    """For every vertex, the minimum relative deadline among its
    descendant-or-self sinks.  Computed by a reverse topological sweep."""
    entries: Dict[int, Dict[int, int]] = {}
    for task in taskset.tasks:
        base: Dict[int, int] = {}
        for v in reversed(task.topo_order):
            if v in task.sinks:
                base[v] = task.deadlines[v]
            else:
                base[v] = min(base[s] for s in task.succs[v])
        entries[task.task_id] = base
    return RadBaseTable(entries)


def hyper_period(taskset: TaskSet) -> int:
    """Least common multiple of all task periods."""
    return math.lcm(*(t.period_us for t in taskset.tasks))


ExecAssignment = Mapping[Tuple[int, int], int]


def total_utilization(taskset: TaskSet, exec_us: ExecAssignment) -> Fraction:
    """Sum over tasks of (total vertex execution time / period), exact."""
    total = Fraction(0)
    for task in taskset.tasks:
        task_sum = 0
        for v in task.vertices:
            e = exec_us.get((task.task_id, v.id))
            if e is None or e <= 0:
                raise ModelError(f"missing/nonpositive exec time for task {task.task_id} vertex {v.id}")
            task_sum += e
        total += Fraction(task_sum, task.period_us)
    return total


def wcet_assignment(taskset: TaskSet) -> Dict[Tuple[int, int], int]:
    """Exec assignment that pins every vertex to its wcet."""
    return {(t.task_id, v.id): v.wcet_us for t in taskset.tasks for v in t.vertices}


def decompose(graph: CallbackGraph, beta: Rational = Fraction(6, 5)) -> TaskSet:
    """Cut all queue edges and turn each weakly-connected pub-sub component
    into one DAG task whose timer callback is the source and supplies the
    period.  Sink deadlines come from assign_deadlines with the given beta."""
    if as_fraction(beta) <= 0:
        raise ModelError("beta must be positive")
    pub_edges = [(e.src, e.dst) for e in graph.edges if e.kind == PUBSUB]
    components = _weak_components([c.id for c in graph.callbacks], pub_edges)

    tasks = []
    for task_id, comp in enumerate(components, start=1):
        members = [graph.callback_by_id(cid) for cid in sorted(comp)]
        names = ", ".join(c.name for c in members)
        comp_edges = [(s, d) for s, d in pub_edges if s in comp]
        if _toposort(comp, comp_edges) is None:
            raise CycleAfterSplit(f"cycle among callbacks [{names}]")
        timers = [c for c in members if c.kind == TIMER]
        if not timers:
            raise ComponentWithoutTimerSource(f"no timer callback among [{names}]")
        if len(timers) > 1:
            raise MultipleSources(
                f"multiple timer callbacks ({', '.join(t.name for t in timers)}) among [{names}]")
        indeg = {cid: 0 for cid in comp}
        for _, d in comp_edges:
            indeg[d] += 1
        sources = [cid for cid in comp if indeg[cid] == 0]
        if len(sources) > 1:
            src_names = ", ".join(graph.callback_by_id(s).name for s in sorted(sources))
            raise MultipleSources(f"multiple source callbacks ({src_names}) among [{names}]")
        if sources[0] != timers[0].id:
            raise ComponentWithoutTimerSource(
                f"source of component [{names}] is not its timer callback")

        vertices = [Vertex(c.id, c.name, c.wcet_us) for c in members]
        sinks = {cid for cid in comp if all(s != cid for s, _ in comp_edges)}
        provisional = DagTask(task_id, timers[0].period_us, vertices, comp_edges,
                              {s: 1 for s in sinks})
        deadlines = assign_deadlines(provisional, beta)
        tasks.append(DagTask(task_id, timers[0].period_us, vertices, comp_edges, deadlines))
    return TaskSet(tasks)


def _weak_components(vertex_ids, edges) -> List[Set[int]]:
    """Weakly connected components, ordered by their smallest member id."""
    parent = {v: v for v in vertex_ids}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s, d in edges:
        rs, rd = find(s), find(d)
        if rs != rd:
            parent[rs] = rd
    groups: Dict[int, Set[int]] = {}
    for v in vertex_ids:
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=min)
