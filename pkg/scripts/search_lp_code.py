"""Search monomial weight matrices whose lifted product has a target (n, k).

Draws random 4-cycle-free ``rows x cols`` exponent matrices at lifting size
``gamma`` and keeps the first pair (W, W) giving the requested dimension.

    python scripts/search_lp_code.py --gamma 25 --k 40 --output lp600_w.qc
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from qtrap.codes import code_parameters, dump_qc, lifted_product, random_qc_ldpc


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=3)
    ap.add_argument("--cols", type=int, default=5)
    ap.add_argument("--gamma", type=int, default=25)
    ap.add_argument("--k", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tries", type=int, default=500)
    ap.add_argument("--output", default="-")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    seen: dict[int, int] = {}
    for t in range(args.tries):
        w = random_qc_ldpc(args.rows, args.cols, args.gamma, rng)
        n, k = code_parameters(lifted_product(w, w))
        seen[k] = seen.get(k, 0) + 1
        if k == args.k:
            text = f"# lifted product with itself gives [[{n},{k}]]; search seed {args.seed}, try {t}\n" + dump_qc(w)
            if args.output == "-":
                sys.stdout.write(text)
            else:
                with open(args.output, "w") as fh:
                    fh.write(text)
            print(f"found [[{n},{k}]] after {t + 1} draws", file=sys.stderr)
            return 0
    print(f"no k={args.k} in {args.tries} draws; dimensions seen: {dict(sorted(seen.items()))}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
