#!/usr/bin/env python3
"""Generate prediction-vs-simulation CSV sweeps for both workloads.

Writes predict and sim rows into one schema CSV per structure and prints
the joined error report. These are the data behind the prediction/

simulation comparison figures:

    python scripts/run_oracle_sweeps.py --out results/
    throughputlab report results/treiber_sweep.csv
    throughputlab-plot --csv results/treiber_sweep.csv --x P --out figures/
"""

import argparse
import os
import sys

from throughputlab.engine import simulate
from throughputlab.model import (
    CostModel,
    WorkloadParams,
    crossover_mcs,
    crossover_treiber,
    predict_mcs,
    predict_treiber,
)
from throughputlab.programs import build_mcs_program, build_treiber_program
from throughputlab.report import report_files
from throughputlab.schema import row_from_prediction, row_from_sim, write_csv


def sweep_treiber(args) -> list:
    model = CostModel(alpha=1.0, M=args.M, W=args.W)
    rows = []
    for N in args.N:
        p_star = crossover_treiber(model, N)
        for P in sorted({0, p_star // 2, p_star, 2 * p_star, 4 * p_star}):
            w = WorkloadParams(N=N, P=P)
            rows.append(row_from_prediction(model, w, predict_treiber(model, w), "treiber", args.seed, args.host_tag))
            result = simulate(build_treiber_program(P), model, N, args.horizon, args.horizon // 10, args.seed)
            rows.append(row_from_sim(result, args.host_tag))
    return rows


def sweep_mcs(args) -> list:
    model = CostModel(alpha=1.0, W=args.W, Ri=args.Ri)
    rows = []
    for N in args.N:
        p_star = crossover_mcs(model, args.C, N)
        for P in sorted({0, p_star // 2, p_star, 2 * p_star, 4 * p_star}):
            if P < 0:
                continue
            w = WorkloadParams(N=N, C=args.C, P=P)
            rows.append(row_from_prediction(model, w, predict_mcs(model, w), "mcs", args.seed, args.host_tag))
            result = simulate(build_mcs_program(args.C, P), model, N, args.horizon, args.horizon // 10, args.seed)
            rows.append(row_from_sim(result, args.host_tag))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("--N", type=int, nargs="+", default=[2, 4, 8, 16], help="worker counts")
    parser.add_argument("--W", type=int, default=10, help="write cost (default: 10)")
    parser.add_argument("--Ri", type=int, default=10, help="invalidated-read cost (default: 10)")
    parser.add_argument("--M", type=int, default=5, help="atomic-read cost (default: 5)")
    parser.add_argument("--C", type=int, default=100, help="lock critical section (default: 100)")
    parser.add_argument("--horizon", type=int, default=1_000_000, help="simulated cycles (default: 1e6)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--host-tag", default=os.environ.get("THROUGHPUTLAB_HOST_TAG", "sim"))
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    paths = []
    for name, rows in (("treiber_sweep", sweep_treiber(args)), ("mcs_sweep", sweep_mcs(args))):
        path = os.path.join(args.out, f"{name}.csv")
        if os.path.exists(path):
            os.remove(path)
        write_csv(path, rows)
        paths.append(path)
        print(f"wrote {len(rows)} rows to {path}")
    report_files(paths)
    return 0


if __name__ == "__main__":
    sys.exit(main())
