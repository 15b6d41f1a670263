"""Command-line interface.

Subcommands: decompose, generate, simulate, experiment, export-template.
Exit codes: 0 success, 1 validation error, 2 I/O error.  Time arguments
accept `ms`/`us` suffixes; bare integers are microseconds.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import experiment, serialize, simulator, taskmodel, workload
from .taskmodel import ModelError


def parse_time_us(text: str) -> int:
    text = text.strip()
    if text.endswith("ms"):
        return int(text[:-2]) * 1000
    if text.endswith("us"):
        return int(text[:-2])
    return int(text)


def parse_load_factor(text: str):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (float(lo), float(hi))
    return float(text)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mddag",
                                description="Multi-deadline DAG scheduling toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="split a callback graph into DAG tasks")
    d.add_argument("--graph", required=True)
    d.add_argument("--beta", type=float, default=1.2)
    d.add_argument("--out", required=True)

    g = sub.add_parser("generate", help="generate a workload from a graph template")
    g.add_argument("--graph", help="callback graph JSON (default: shipped template)")
    g.add_argument("--beta", type=float, default=1.2)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--load-factor", default="1.0",
                   help="fixed value or lo:hi sweep range")
    g.add_argument("--taskset-out", required=True)
    g.add_argument("--exec-out", help="optional JSON file for the exec assignment")

    s = sub.add_parser("simulate", help="simulate a task set once")
    s.add_argument("--taskset", required=True)
    s.add_argument("--cores", type=int, default=7)
    s.add_argument("--duration", default="3000ms")
    s.add_argument("--policy", default="gedf_rad")
    s.add_argument("--mode", default=simulator.NON_PREEMPTIVE)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--trace", help="optional JSON-lines trace output path")

    e = sub.add_parser("experiment", help="run an acceptance-ratio campaign")
    e.add_argument("--config", help="campaign config JSON (default: built-in defaults)")
    e.add_argument("--out", required=True)
    e.add_argument("--jobs", type=int, default=1)

    x = sub.add_parser("export-template", help="write the shipped template graph")
    x.add_argument("--out", required=True)
    return p


def cmd_decompose(args) -> int:
    if args.beta <= 0:
        print("error: --beta must be positive", file=sys.stderr)
        return 1
    graph = serialize.load_graph(args.graph)
    taskset = taskmodel.decompose(graph, args.beta)
    serialize.dump_taskset(taskset, args.out)
    print(f"wrote {len(taskset.tasks)} tasks to {args.out}")
    return 0


def cmd_generate(args) -> int:
    if args.graph:
        graph, sampler = serialize.load_graph_with_sampler(args.graph)
    else:
        graph, sampler = workload.build_default_template(), None
    if sampler is None:
        sampler = workload.default_sampler(graph)
    cfg = workload.GenConfig(seed=args.seed, beta=args.beta,
                             load_factor=parse_load_factor(args.load_factor))
    taskset, exec_us = workload.generate(graph, sampler, cfg)
    serialize.dump_taskset(taskset, args.taskset_out)
    if args.exec_out:
        data = {f"{t},{v}": e for (t, v), e in sorted(exec_us.items())}
        with open(args.exec_out, "w") as f:
            json.dump(data, f, indent=2)
            f.write("\n")
    print(f"wrote {len(taskset.tasks)} tasks to {args.taskset_out}")
    return 0


def cmd_simulate(args) -> int:
    taskset = serialize.load_taskset(args.taskset)
    exec_us = workload.sample_exec_for_taskset(taskset, args.seed)
    result = simulator.run(taskset, args.cores, parse_time_us(args.duration),
                           args.policy, exec_us, mode=args.mode,
                           trace=args.trace is not None)
    if args.trace:
        with open(args.trace, "w") as f:
            for ev in result.trace:
                f.write(json.dumps(ev.to_dict()) + "\n")
    out = {
        "policy": simulator.get_policy(args.policy).name,
        "mode": args.mode,
        "cores": args.cores,
        "seed": args.seed,
        "miss_count": result.miss_count,
        "total_utilization": float(result.total_utilization),
        "sinks": [
            {"task": r.task_id, "k": r.k, "sink": r.sink_id, "finish_us": r.finish_us,
             "deadline_us": r.deadline_us, "missed": r.missed}
            for r in result.sink_records
        ],
    }
    json.dump(out, sys.stdout, indent=2)
    print()
    return 0


def cmd_experiment(args) -> int:
    config = experiment.load_config(args.config) if args.config else experiment.CampaignConfig()
    summary = experiment.run_campaign(config, jobs=args.jobs)
    runs_path, summary_path = experiment.write_csv(summary, args.out)
    print(f"wrote {runs_path} and {summary_path}")
    return 0


def cmd_export_template(args) -> int:
    graph = workload.build_default_template()
    serialize.dump_graph(graph, args.out, sampler=workload.default_sampler(graph))
    print(f"wrote template to {args.out}")
    return 0


_COMMANDS = {
    "decompose": cmd_decompose,
    "generate": cmd_generate,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "export-template": cmd_export_template,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ModelError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
