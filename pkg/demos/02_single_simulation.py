#!/usr/bin/env python3
"""Simulate one randomly drawn workload over a full hyper-period under all
three policies and compare deadline misses."""
from mddag import simulator, taskmodel, workload

template = workload.build_default_template()
sampler = workload.default_sampler(template)
config = workload.GenConfig(seed=7, beta=1.2, load_factor=0.75)
taskset, exec_us = workload.generate(template, sampler, config)

norm_util = workload.realized_normalized_utilization(taskset, exec_us, cores=7)
print(f"workload seed {config.seed}: normalized utilization {float(norm_util):.3f} on 7 cores\n")

for policy in ("gedf_rad", "wc_fifo", "rm"):
    result = simulator.run(taskset, cores=7, duration_us=3_000_000,
                           policy=policy, exec_us=exec_us)
    late = [r for r in result.sink_records if r.missed]
    print(f"{policy:10s}: {result.miss_count:3d} misses out of {len(result.sink_records)} "
          f"sink instances")
    for r in late[:3]:
        finish = "unfinished" if r.finish_us is None else f"finished {r.finish_us}"
        print(f"    task {r.task_id} job {r.k} sink {r.sink_id}: "
              f"{finish}, deadline {r.deadline_us}")
    if len(late) > 3:
        print(f"    ... and {len(late) - 3} more")
