"""Monte Carlo logical error rates under depolarizing noise.

Every trial draws from its own stream ``SeedSequence(master_seed,
spawn_key=(p_index, trial))``, so counts do not depend on how trials are
split across worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from .channel import sample_depolarizing
from .codes import CssCode, stabilizer_space
from .decoders import DecodeOutcome, DecoderConfig, DecoderKind, decode, diversity_decode
from .tanner import x_graph, z_graph

__all__ = [
    "CSV_HEADER",
    "DecoderSpec",
    "LerPoint",
    "TrialResult",
    "TransferMember",
    "diversity_spec",
    "estimate_ler",
    "logical_failure",
    "points_to_csv",
    "run_manifest",
    "score_trial",
    "wilson",
]

CSV_HEADER = ("p", "trials", "failures", "ler", "ci_lo", "ci_hi", "decoder", "code")
CHUNK = 200
Z95 = 1.959964


@dataclass(frozen=True)
class TrialResult:
    failed: bool
    converged: bool
    residual_weight: int


@dataclass(frozen=True)
class LerPoint:
    p: float
    trials: int
    failures: int
    decoder: str = ""
    code: str = ""
    side: str = "x"

    @property
    def ler(self) -> float:
        return self.failures / self.trials

    @property
    def ci95(self) -> tuple[float, float]:
        return wilson(self.failures, self.trials)

    def row(self) -> list[str]:
        lo, hi = self.ci95
        return [repr(self.p), str(self.trials), str(self.failures), f"{self.ler:.6e}",
                f"{lo:.6e}", f"{hi:.6e}", self.decoder, self.code]


def wilson(failures: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= failures <= trials:
        raise ValueError("failures must lie in 0..trials")
    ph = failures / trials
    z2 = z * z
    den = 1 + z2 / trials
    mid = (ph + z2 / (2 * trials)) / den
    half = z * math.sqrt(ph * (1 - ph) / trials + z2 / (4 * trials * trials)) / den
    # clamp so the interval always contains the point estimate
    return min(max(0.0, mid - half), ph), max(min(1.0, mid + half), ph)


def logical_failure(code: CssCode, e_x: np.ndarray, estimate: np.ndarray) -> bool:
    """True when ``e_x + estimate`` has a nonzero syndrome or is a nontrivial logical."""
    e_x = np.asarray(e_x, dtype=np.uint8)
    estimate = np.asarray(estimate, dtype=np.uint8)
    if e_x.shape != (code.n,) or estimate.shape != (code.n,):
        raise ValueError(f"vectors must have length {code.n}")
    r = e_x ^ estimate
    if code.h_z.mul_vec(r).any():
        return True
    return not stabilizer_space(code).contains(r)


def score_trial(code: CssCode, e_x: np.ndarray, outcome: DecodeOutcome) -> TrialResult:
    r = e_x ^ outcome.estimate
    return TrialResult(logical_failure(code, e_x, outcome.estimate), outcome.converged, int(np.count_nonzero(r)))


@dataclass(frozen=True, eq=False)
class DecoderSpec:
    """A named decoder: one member, or several run as a diversity ensemble.

    Members are configs or callables ``p -> DecoderConfig`` (for biases that
    depend on the channel). With no members the estimate is always zero.
    """

    name: str
    members: tuple[DecoderConfig | Callable[[float], DecoderConfig], ...] = ()
    notes: dict = field(default_factory=dict)

    def configs(self, p: float) -> list[DecoderConfig]:
        out = []
        for m in self.members:
            cfg = m(p) if callable(m) and not isinstance(m, DecoderConfig) else m
            out.append(cfg.with_channel(p) if 0 < p < 1 else cfg)
        return out

    def to_dict(self, p: float | None = None) -> dict:
        d = {"name": self.name, "members": len(self.members)}
        if p is not None and 0 < p < 1:
            d["configs"] = [c.to_dict() for c in self.configs(p)]
        if self.notes:
            d["notes"] = dict(self.notes)
        return d


@dataclass(frozen=True, eq=False)
class TransferMember:
    """Scheduled min-sum whose G_Z biases repeat a classical decoder tuned
    against one trapping set of the second factor."""

    code: CssCode
    ts_vars: tuple[int, ...]
    w: float
    max_iters: int
    scale: float = 0.5

    def __call__(self, p: float) -> DecoderConfig:
        from .trapset import build_bias_transfer, ts_avoiding_bias

        classical = ts_avoiding_bias(self.code.provenance["h2"], self.ts_vars, p, self.scale)
        return DecoderConfig(
            DecoderKind.MINSUM_SCHEDULED,
            max_iters=self.max_iters,
            w=self.w,
            edge_bias=build_bias_transfer(self.code, classical, p),
            name=f"transfer{list(self.ts_vars)}",
        )


def diversity_spec(
    code: CssCode,
    trapping_sets: Sequence[Sequence[int]] = (),
    w: float = 0.75,
    max_iters: int = 20,
    scale: float = 0.5,
    name: str = "proposed",
) -> DecoderSpec:
    """Scheduled min-sum with channel biases, plus one bias-transfer member
    per classical trapping set."""
    d1 = DecoderConfig(DecoderKind.MINSUM_SCHEDULED, max_iters=max_iters, w=w, name="scheduled")
    members = [d1] + [TransferMember(code, tuple(int(v) for v in ts), w, max_iters, scale) for ts in trapping_sets]
    return DecoderSpec(name, tuple(members), {"trapping_sets": [list(map(int, t)) for t in trapping_sets], "scale": scale})


def _decode_once(graph, sigma, cfgs: Sequence[DecoderConfig], n: int) -> DecodeOutcome:
    if not cfgs:
        return DecodeOutcome(np.zeros(n, dtype=np.uint8), not sigma.any(), 0, "converged" if not sigma.any() else "max_iters")
    if len(cfgs) == 1:
        return decode(graph, sigma, cfgs[0])
    return diversity_decode(graph, sigma, cfgs)


def _run_chunk(args) -> list[bool]:
    code, side, cfgs, p, seed, p_idx, start, stop = args
    target = code if side == "x" else code.swapped()
    graph = z_graph(code) if side == "x" else x_graph(code)
    fails = []
    for t in range(start, stop):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(p_idx, t)))
        err = sample_depolarizing(code.n, p, rng)
        e = err.e_x if side == "x" else err.e_z
        sigma = target.h_z.mul_vec(e)
        out = _decode_once(graph, sigma, cfgs, code.n)
        fails.append(logical_failure(target, e, out.estimate))
    return fails


def estimate_ler(
    code: CssCode,
    decoder: DecoderSpec,
    p_list: Iterable[float],
    trials: int,
    master_seed: int = 0,
    jobs: int = 1,
    max_failures: int | None = 100,
    side: str = "x",
    code_name: str = "",
) -> list[LerPoint]:
    """Estimate the logical error rate at each ``p``.

    ``side`` is ``x`` (decode X errors on H_Z), ``z``, or ``both`` (one point
    per side, each from its own trials). Sampling for a given ``p`` stops
    right after the trial that brings failures to ``max_failures``; pass
    ``None`` to always run ``trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if side not in ("x", "z", "both"):
        raise ValueError("side must be x, z or both")
    sides = ("x", "z") if side == "both" else (side,)
    stabilizer_space(code)
    for s in sides:
        stabilizer_space(code if s == "x" else code.swapped())
    points = []
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for p_idx, p in enumerate(p_list):
            p = float(p)
            cfgs = decoder.configs(p)
            for s_idx, s in enumerate(sides):
                seed = [master_seed, s_idx] if len(sides) > 1 else master_seed
                n_done, n_fail = _sample(code, s, cfgs, p, seed, p_idx, trials, max_failures, pool, jobs)
                points.append(LerPoint(p, n_done, n_fail, decoder.name, code_name, s))
    finally:
        if pool is not None:
            pool.shutdown()
    return points


def _sample(code, side, cfgs, p, seed, p_idx, trials, max_failures, pool, jobs) -> tuple[int, int]:
    if p == 0.0:
        return trials, 0
    bounds = [(a, min(a + CHUNK, trials)) for a in range(0, trials, CHUNK)]
    done = fails = 0
    wave = max(1, jobs)
    for w0 in range(0, len(bounds), wave):
        batch = [(code, side, cfgs, p, seed, p_idx, a, b) for a, b in bounds[w0:w0 + wave]]
        results = pool.map(_run_chunk, batch) if pool is not None else map(_run_chunk, batch)
        for chunk in results:
            for f in chunk:
                done += 1
                fails += f
                if max_failures is not None and fails >= max_failures:
                    return done, fails
    return done, fails


def points_to_csv(points: Sequence[LerPoint], out: TextIO | None = None) -> str:
    """Write points in the fixed CSV layout; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for pt in points:
        w.writerow(pt.row())
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def run_manifest(code: CssCode, specs: Sequence[DecoderSpec], p_list: Sequence[float], trials: int,
                 master_seed: int, extra: dict | None = None) -> str:
    """JSON record of everything needed to repeat a run."""
    doc = {
        "seed": master_seed,
        "trials": trials,
        "p": [float(p) for p in p_list],
        "code": {"fingerprint": code.fingerprint(), **code.describe()},
        "decoders": [s.to_dict(float(p_list[0]) if len(p_list) else None) for s in specs],
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
