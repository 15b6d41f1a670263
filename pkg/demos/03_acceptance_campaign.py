#!/usr/bin/env python3
"""Run a small acceptance-ratio campaign (200 runs instead of 5000), print
the per-bucket table, and write the CSV artifacts to demos/out/."""
import os

from mddag.experiment import CampaignConfig, run_campaign, write_csv

config = CampaignConfig(n_runs=200, base_seed=1)
print(f"running {config.n_runs} workloads x {len(config.policies)} policies "
      f"on {config.cores} cores ...")
summary = run_campaign(config)

rows = summary.bucket_rows()
buckets = sorted({b.bucket for b in rows})
print(f"\n{'bucket':>8s}" + "".join(f"{p:>12s}" for p in config.policies))
for bk in buckets:
    cells = []
    for policy in config.policies:
        match = [b for b in rows if b.policy == policy and b.bucket == bk]
        cells.append(f"{float(match[0].acceptance_ratio):12.3f}" if match else " " * 12)
    n = next(b.runs for b in rows if b.bucket == bk)
    print(f"{float(bk):8.2f}" + "".join(cells) + f"   (n={n})")

out_dir = os.path.join(os.path.dirname(__file__), "out")
runs_path, summary_path = write_csv(summary, out_dir)
print(f"\nwrote {runs_path}\nwrote {summary_path}")
print("render a figure with:  plot_acceptance --in "
      f"{summary_path} --out {out_dir}/acceptance.svg")
