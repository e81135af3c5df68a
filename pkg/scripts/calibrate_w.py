"""Pick the min-sum normalization that best matches reference LER points.

Runs the flooding min-sum baseline on a grid of ``w`` values and reports the
one minimizing the squared log-ratio to the reference curve.

    python scripts/calibrate_w.py --trials 10000 --grid 0.40 0.42 0.44 0.46
"""

from __future__ import annotations

import argparse
import math
import sys

from qtrap.codes import lifted_product, load_qc
from qtrap.decoders import DecoderConfig, DecoderKind
from qtrap.simulate import DecoderSpec, estimate_ler

# normalized min-sum reference, [[1054,140]] code, 100 iterations
REFERENCE = {0.05: 1.195e-1, 0.03: 7.6e-3}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qc", default="src/qtrap/data/tanner_155.qc")
    ap.add_argument("--grid", type=float, nargs="+", default=[0.40, 0.42, 0.44, 0.46, 0.50, 0.75])
    ap.add_argument("--trials", type=int, default=10000)
    ap.add_argument("--max-iters", type=int, default=100)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    w_ = load_qc(args.qc)
    code = lifted_product(w_, w_)
    ps = sorted(REFERENCE)
    best = None
    print("w," + ",".join(f"ler@{p}" for p in ps) + ",score")
    for w in args.grid:
        spec = DecoderSpec(f"minsum-w{w}", (DecoderConfig(DecoderKind.MINSUM, max_iters=args.max_iters, w=w),))
        pts = estimate_ler(code, spec, ps, args.trials, args.seed, args.jobs, max_failures=None)
        score = sum(math.log(max(pt.ler, 0.5 / pt.trials) / REFERENCE[pt.p]) ** 2 for pt in pts)
        print(f"{w}," + ",".join(f"{pt.ler:.4g}" for pt in pts) + f",{score:.4f}", flush=True)
        if best is None or score < best[1]:
            best = (w, score)
    print(f"best w = {best[0]}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
