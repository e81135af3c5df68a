"""Enumerate small (a, b) trapping sets of a quasi-cyclic LDPC code.

A candidate is a connected set of ``a`` variables whose induced subgraph has
exactly ``b`` odd-degree checks. Sets are listed once per cyclic-shift orbit.

    python scripts/find_tanner_ts.py --qc src/qtrap/data/tanner_155.qc -a 5 -b 3
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from qtrap.codes import lift, load_qc


def shift(vs, t, gamma):
    return tuple(sorted((v // gamma) * gamma + (v % gamma + t) % gamma for v in vs))


def canonical(vs, gamma):
    return min(shift(vs, t, gamma) for t in range(gamma))


def enumerate_sets(h: np.ndarray, gamma: int, size: int):
    """Connected variable sets of the given size that contain a block seed."""
    n = h.shape[1]
    adj = (h.T.astype(np.int64) @ h.astype(np.int64)) > 0
    nbrs = [frozenset(np.flatnonzero(adj[v])) - {v} for v in range(n)]
    seen = set()
    for seed in range(0, n, gamma):
        frontier = {frozenset([seed])}
        for _ in range(size - 1):
            frontier = {s | {u} for s in frontier for u in frozenset().union(*(nbrs[v] for v in s)) - s}
        for s in frontier:
            key = canonical(s, gamma)
            if key not in seen:
                seen.add(key)
                yield key


def odd_checks(h: np.ndarray, vs) -> list[int]:
    deg = h[:, list(vs)].sum(axis=1)
    return [int(c) for c in np.flatnonzero(deg % 2)]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qc", required=True)
    ap.add_argument("-a", type=int, default=5)
    ap.add_argument("-b", type=int, default=3)
    ap.add_argument("--output", default="-")
    args = ap.parse_args(argv)

    qc = load_qc(args.qc)
    h = lift(qc).dense
    found = []
    for vs in enumerate_sets(h, qc.gamma, args.a):
        odd = odd_checks(h, vs)
        if len(odd) == args.b:
            found.append({"variables": [int(v) for v in vs], "odd_checks": odd})
    found.sort(key=lambda d: d["variables"])
    doc = {"source": args.qc, "a": args.a, "b": args.b, "gamma": qc.gamma,
           "orbits": len(found), "sets": found}
    text = json.dumps(doc, indent=1) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    print(f"{len(found)} orbits of ({args.a},{args.b}) sets", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
