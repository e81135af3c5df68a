"""Time the compiled and numpy decoder kernels on the same syndromes.

    python benchmarks/bench_kernels.py --trials 200 --p 0.04

Both backends decode identical syndromes; the script also checks that they
return identical estimates.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qtrap.channel import sample_depolarizing
from qtrap.cli import DATA_DIR
from qtrap.codes import lifted_product, load_qc
from qtrap.decoders import DecoderConfig, DecoderKind, available_backends, decode, set_backend
from qtrap.tanner import z_graph

KINDS = {
    "bf": DecoderConfig(DecoderKind.BF, max_iters=50),
    "tsbf": DecoderConfig(DecoderKind.TSBF, max_iters=50),
    "minsum": DecoderConfig(DecoderKind.MINSUM, w=0.42, max_iters=50),
    "minsum_scheduled": DecoderConfig(DecoderKind.MINSUM_SCHEDULED, w=0.42, max_iters=50),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--code", default="tanner_155.qc", help="QC weight matrix used for both LP factors")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--p", type=float, default=0.04)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    w = load_qc(DATA_DIR / args.code)
    code = lifted_product(w, w)
    g = z_graph(code)
    rng = np.random.default_rng(args.seed)
    syndromes = [code.h_z.mul_vec(sample_depolarizing(code.n, args.p, rng).e_x) for _ in range(args.trials)]
    print(f"[[{code.n},{code.k}]] lifted product, {g.edge_count} edges, {args.trials} syndromes at p={args.p}")

    backends = available_backends()
    print(f"{'decoder':<18}" + "".join(f"{b + ' ms':>14}" for b in backends) + f"{'speedup':>10}")
    for name, cfg in KINDS.items():
        cfg = cfg.with_channel(args.p) if cfg.kind.is_minsum else cfg
        times, estimates = {}, {}
        for b in backends:
            prev = set_backend(b)
            t0 = time.perf_counter()
            estimates[b] = [decode(g, s, cfg).estimate for s in syndromes]
            times[b] = (time.perf_counter() - t0) / args.trials * 1e3
            set_backend(prev)
        if len(backends) > 1:
            same = all(np.array_equal(x, y) for x, y in zip(*estimates.values()))
            assert same, f"{name}: backends disagree"
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<18}" + "".join(f"{times[b]:>14.3f}" for b in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
