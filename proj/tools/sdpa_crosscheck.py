#!/usr/bin/env python3
"""Solve a sparse SDPA (.dat-s) slack-maximization file with cvxpy.

Usage: sdpa_crosscheck.py FILE [--json OUT]

Reports "feasible" when the optimal slack is positive relative to the block
magnitudes at the returned point (same rule as the C++ solver for
homogeneous problems), "not_certified" otherwise.
"""
import argparse
import json
import sys

import cvxpy as cp
import numpy as np


def parse(path):
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and ln[0] not in '*"']
    mdim = int(lines[0].split()[0])
    nblock = int(lines[1].split()[0])
    rest = " ".join(lines[2:]).replace(",", " ").replace("{", " ").replace("}", " ")
    tok = rest.split()
    sizes = [int(t) for t in tok[:nblock]]
    c = np.array([float(t) for t in tok[nblock:nblock + mdim]])
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(mdim + 1)]
    ent = tok[nblock + mdim:]
    for i in range(0, len(ent), 5):
        k, b, r, col = (int(x) for x in ent[i:i + 4])
        v = float(ent[i + 4])
        mats[k][b - 1][r - 1, col - 1] = v
        mats[k][b - 1][col - 1, r - 1] = v
    return mdim, sizes, c, mats


def solve(path, floor=1e-10):
    mdim, sizes, c, mats = parse(path)
    y = cp.Variable(mdim)
    cons = []
    for b, s in enumerate(sizes):
        expr = sum(y[k] * mats[k + 1][b] for k in range(mdim)) - mats[0][b]
        if abs(s) == 1:
            cons.append(expr >= 0)
        else:
            cons.append(0.5 * (expr + expr.T) >> 0)
    prob = cp.Problem(cp.Minimize(c @ y), cons)
    prob.solve(solver=cp.CLARABEL)
    yv = y.value
    worst, scale = np.inf, 0.0
    # re-verify the slack on the blocks that carry it
    for b, s in enumerate(sizes):
        if not mats[mdim][b].any():
            continue
        f = sum(yv[k] * mats[k + 1][b] for k in range(mdim - 1)) - mats[0][b]
        ev = np.linalg.eigvalsh(0.5 * (f + f.T))
        worst = min(worst, ev[0])
        scale = max(scale, np.abs(ev).max())
    rel = worst / scale if scale > 0 else 0.0
    status = "feasible" if worst > 0 and rel >= floor else "not_certified"
    return {
        "file": path,
        "solver": "cvxpy/" + prob.solver_stats.solver_name,
        "solver_status": prob.status,
        "optimal_slack": float(-prob.value),
        "min_block_eig": float(worst),
        "relative_slack": float(rel),
        "status": status,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("file")
    ap.add_argument("--json")
    args = ap.parse_args()
    res = solve(args.file)
    out = json.dumps(res, indent=2)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(out + "\n")
    print(out)
    return 0 if res["status"] == "feasible" else 2


if __name__ == "__main__":
    sys.exit(main())
