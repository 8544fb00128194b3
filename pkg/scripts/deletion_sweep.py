#!/usr/bin/env python3
"""Sweep deletion fractions on the 2-D benchmark networks and print the
mean neighborhood-preservation error per cell.

Both map-building procedures run on the concave and circular-void
layouts with M=20 anchors.  Results land in <out>/<network>/ as CSVs;
the console gets a compact table.
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hopmap.experiment import (
    ExperimentConfig,
    NetworkSpec,
    run_experiment,
    summarize,
)
from hopmap.sampling import AnchorSelection


def run(args):
    fractions = tuple(args.fractions)
    rows = []
    for kind in ("concave", "circular"):
        cfg = ExperimentConfig(
            network=NetworkSpec(kind, seed=args.seed),
            anchors=AnchorSelection("random", args.anchors),
            procedures=("grammian", "p-completion"),
            fractions=fractions,
            repeats=args.repeats,
            seed=args.seed,
            out_dir=str(Path(args.out) / kind),
            jobs=args.jobs,
        )
        res = run_experiment(cfg)
        summ = summarize(res)
        for (net, procedure, f, metric), (mean, std) in sorted(summ.items(), key=str):
            if metric != "E_TP":
                continue
            rows.append((net, procedure, f, mean, std))
        if res.failures:
            print(f"warning: {len(res.failures)} failed runs on {kind}", file=sys.stderr)

    print(f"\nmean E_TP over {args.repeats} repeats (M={args.anchors} anchors)")
    header = "network       procedure      " + "".join(f"f={f:<7g}" for f in fractions)
    print(header)
    for net in sorted({r[0] for r in rows}):
        for procedure in ("grammian", "p-completion"):
            cells = {f: m for n, p, f, m, _ in rows if n == net and p == procedure}
            line = f"{net:<14}{procedure:<15}"
            line += "".join(f"{cells[f]:<9.4f}" for f in fractions if f in cells)
            print(line)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fractions", type=float, nargs="+",
                    default=[0.1, 0.2, 0.4, 0.6, 0.8])
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--anchors", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/deletion_sweep")
    run(ap.parse_args())
