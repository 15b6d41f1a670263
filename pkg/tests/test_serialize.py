import json

import pytest

from mddag import serialize, workload
from mddag.serialize import SchemaError
from mddag.taskmodel import decompose


def test_graph_round_trip(tmp_path):
    graph = workload.build_default_template()
    path = tmp_path / "graph.json"
    serialize.dump_graph(graph, path)
    loaded = serialize.load_graph(path)
    assert loaded == graph


def test_graph_with_sampler_round_trip(tmp_path):
    graph = workload.build_default_template()
    sampler = workload.default_sampler(graph)
    path = tmp_path / "graph.json"
    serialize.dump_graph(graph, path, sampler=sampler)
    loaded_graph, loaded_sampler = serialize.load_graph_with_sampler(path)
    assert loaded_graph == graph
    assert loaded_sampler.specs == sampler.specs


def test_taskset_round_trip(tmp_path):
    ts = decompose(workload.build_default_template(), 1.2)
    path = tmp_path / "taskset.json"
    serialize.dump_taskset(ts, path)
    assert serialize.load_taskset(path) == ts


def test_unknown_top_level_field_rejected():
    with pytest.raises(SchemaError, match="unknown fields"):
        serialize.graph_from_dict({"callbacks": [], "edges": [], "extra": 1})


def test_unknown_callback_field_rejected():
    data = {"callbacks": [{"id": 1, "name": "a", "kind": "timer", "wcet_us": 2,
                           "period_us": 10, "priority": 3}],
            "edges": []}
    with pytest.raises(SchemaError, match="priority"):
        serialize.graph_from_dict(data)


def test_missing_field_rejected():
    with pytest.raises(SchemaError, match="missing"):
        serialize.graph_from_dict({"callbacks": [{"id": 1, "name": "a"}], "edges": []})


def test_unknown_taskset_field_rejected(tmp_path):
    ts = decompose(workload.build_default_template(), 1.2)
    data = serialize.taskset_to_dict(ts)
    data["tasks"][0]["color"] = "red"
    with pytest.raises(SchemaError, match="color"):
        serialize.taskset_from_dict(data)


def test_deadline_keys_are_ints_after_load(tmp_path):
    ts = decompose(workload.build_default_template(), 1.2)
    path = tmp_path / "t.json"
    serialize.dump_taskset(ts, path)
    with open(path) as f:
        raw = json.load(f)
    assert all(isinstance(k, str) for t in raw["tasks"] for k in t["deadlines"])
    loaded = serialize.load_taskset(path)
    assert all(isinstance(k, int) for t in loaded.tasks for k in t.deadlines)


def test_unknown_sampler_kind_rejected():
    with pytest.raises(SchemaError, match="sampler"):
        serialize.sampler_from_dict({"1": {"kind": "gaussian", "mu": 3}})
