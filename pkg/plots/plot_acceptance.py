"""Render acceptance-ratio-vs-normalized-utilization figures from a
campaign summary.csv (columns: policy, bucket, runs, passes,
acceptance_ratio).  One line per policy, buckets under the population
filter excluded.  SVG output is deterministic: identical inputs give
byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plot-acceptance"
matplotlib.rcParams["svg.fonttype"] = "none"  # keep labels as text, diffable

import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = ("policy", "bucket", "runs", "passes", "acceptance_ratio")


class PlotError(Exception):
    pass


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_path: str
    title: str = "Acceptance ratio vs normalized utilization"
    min_runs: int = 20


def read_summary(path: str) -> Dict[str, List[dict]]:
    """Rows grouped by policy, preserving first-seen CSV order."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise PlotError(f"{path}: empty file")
        for col in REQUIRED_COLUMNS:
            if col not in reader.fieldnames:
                raise PlotError(f"{path}: missing column {col!r}")
        by_policy: Dict[str, List[dict]] = {}
        for row in reader:
            by_policy.setdefault(row["policy"], []).append({
                "bucket": float(row["bucket"]),
                "runs": int(row["runs"]),
                "ratio": float(row["acceptance_ratio"]),
            })
    if not by_policy:
        raise PlotError(f"{path}: no data rows")
    return by_policy


def render(spec: PlotSpec) -> str:
    by_policy = read_summary(spec.input_csv)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for policy, rows in by_policy.items():
        kept = sorted((r for r in rows if r["runs"] >= spec.min_runs),
                      key=lambda r: r["bucket"])
        xs = [r["bucket"] for r in kept]
        ys = [r["ratio"] for r in kept]
        (line,) = ax.plot(xs, ys, marker="o", label=policy)
        line.set_gid(f"series-{policy}")

    ax.set_xlabel("Normalized utilization")
    ax.set_ylabel("Acceptance ratio")
    ax.set_ylim(0.0, 1.0)
    ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if spec.output_path.endswith(".svg"):
        fig.savefig(spec.output_path, metadata={"Date": None})
    else:
        fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return spec.output_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot_acceptance")
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_path", required=True)
    parser.add_argument("--min-runs", type=int, default=20)
    parser.add_argument("--title", default=PlotSpec.title)
    args = parser.parse_args(argv)
    try:
        render(PlotSpec(args.input_csv, args.output_path,
                        title=args.title, min_runs=args.min_runs))
    except PlotError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
