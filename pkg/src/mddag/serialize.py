"""JSON (de)serialization for callback graphs, task sets, and samplers.

Schemas are strict: unknown fields are rejected so that typos in input
files fail loudly instead of being silently ignored.
"""
from __future__ import annotations

import json
from typing import Any, Dict, Mapping, Optional, Tuple

from . import workload
from .taskmodel import (
    Callback,
    CallbackGraph,
    DagTask,
    GraphEdge,
    ModelError,
    TaskSet,
    Vertex,
)


class SchemaError(ModelError):
    pass


def _check_keys(obj: Mapping[str, Any], required, optional=(), where="object"):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    missing = set(required) - set(obj)
    if missing:
        raise SchemaError(f"{where}: missing fields {sorted(missing)}")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")


def graph_to_dict(graph: CallbackGraph) -> Dict[str, Any]:
    callbacks = []
    for c in graph.callbacks:
        entry: Dict[str, Any] = {"id": c.id, "name": c.name, "kind": c.kind, "wcet_us": c.wcet_us}
        if c.period_us is not None:
            entry["period_us"] = c.period_us
        callbacks.append(entry)
    edges = [{"src": e.src, "dst": e.dst, "kind": e.kind} for e in graph.edges]
    return {"callbacks": callbacks, "edges": edges}


def graph_from_dict(data: Mapping[str, Any]) -> CallbackGraph:
    _check_keys(data, ["callbacks", "edges"], optional=["sampler"], where="graph file")
    callbacks = []
    for i, entry in enumerate(data["callbacks"]):
        _check_keys(entry, ["id", "name", "kind", "wcet_us"], optional=["period_us"],
                    where=f"callbacks[{i}]")
        callbacks.append(Callback(id=int(entry["id"]), name=str(entry["name"]),
                                  kind=entry["kind"], wcet_us=int(entry["wcet_us"]),
                                  period_us=(int(entry["period_us"])
                                             if "period_us" in entry else None)))
    edges = []
    for i, entry in enumerate(data["edges"]):
        _check_keys(entry, ["src", "dst", "kind"], where=f"edges[{i}]")
        edges.append(GraphEdge(int(entry["src"]), int(entry["dst"]), entry["kind"]))
    return CallbackGraph(callbacks, edges)


def sampler_to_dict(sampler: "workload.ExecTimeSampler") -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for vid in sorted(sampler.specs):
        spec = sampler.specs[vid]
        if isinstance(spec, workload.UniformSpec):
            out[str(vid)] = {"kind": "uniform", "lo_us": spec.lo_us, "hi_us": spec.hi_us}
        else:
            out[str(vid)] = {"kind": "empirical", "samples_us": list(spec.samples_us)}
    return out


def sampler_from_dict(data: Mapping[str, Any]) -> "workload.ExecTimeSampler":
    specs: Dict[int, Any] = {}
    for key, entry in data.items():
        where = f"sampler[{key}]"
        if not isinstance(entry, dict) or "kind" not in entry:
            raise SchemaError(f"{where}: expected an object with a 'kind' field")
        if entry["kind"] == "uniform":
            _check_keys(entry, ["kind", "lo_us", "hi_us"], where=where)
            specs[int(key)] = workload.UniformSpec(int(entry["lo_us"]), int(entry["hi_us"]))
        elif entry["kind"] == "empirical":
            _check_keys(entry, ["kind", "samples_us"], where=where)
            specs[int(key)] = workload.EmpiricalSpec(tuple(int(s) for s in entry["samples_us"]))
        else:
            raise SchemaError(f"{where}: unknown sampler kind {entry['kind']!r}")
    return workload.ExecTimeSampler(specs)


def taskset_to_dict(taskset: TaskSet) -> Dict[str, Any]:
    tasks = []
    for t in taskset.tasks:
        tasks.append({
            "task_id": t.task_id,
            "period_us": t.period_us,
            "vertices": [{"id": v.id, "name": v.name, "wcet_us": v.wcet_us} for v in t.vertices],
            "edges": [[s, d] for s, d in t.edges],
            "deadlines": {str(s): d for s, d in sorted(t.deadlines.items())},
        })
    return {"tasks": tasks}


def taskset_from_dict(data: Mapping[str, Any]) -> TaskSet:
    _check_keys(data, ["tasks"], where="taskset file")
    tasks = []
    for i, entry in enumerate(data["tasks"]):
        where = f"tasks[{i}]"
        _check_keys(entry, ["task_id", "period_us", "vertices", "edges", "deadlines"], where=where)
        vertices = []
        for j, v in enumerate(entry["vertices"]):
            _check_keys(v, ["id", "name", "wcet_us"], where=f"{where}.vertices[{j}]")
            vertices.append(Vertex(int(v["id"]), str(v["name"]), int(v["wcet_us"])))
        edges = [(int(e[0]), int(e[1])) for e in entry["edges"]]
        deadlines = {int(k): int(d) for k, d in entry["deadlines"].items()}
        tasks.append(DagTask(int(entry["task_id"]), int(entry["period_us"]),
                             vertices, edges, deadlines))
    return TaskSet(tasks)


def load_graph(path) -> CallbackGraph:
    with open(path) as f:
        return graph_from_dict(json.load(f))


def load_graph_with_sampler(path) -> Tuple[CallbackGraph, Optional["workload.ExecTimeSampler"]]:
    with open(path) as f:
        data = json.load(f)
    graph = graph_from_dict(data)
    sampler = sampler_from_dict(data["sampler"]) if "sampler" in data else None
    return graph, sampler


def dump_graph(graph: CallbackGraph, path, sampler=None):
    data = graph_to_dict(graph)
    if sampler is not None:
        data["sampler"] = sampler_to_dict(sampler)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=False)
        f.write("\n")


def load_taskset(path) -> TaskSet:
    with open(path) as f:
        return taskset_from_dict(json.load(f))


def dump_taskset(taskset: TaskSet, path):
    with open(path, "w") as f:
        json.dump(taskset_to_dict(taskset), f, indent=2)
        f.write("\n")
