"""``qtrap`` command line: build codes, probe trapping sets, run simulations.

Exit codes: 0 success, 1 usage or configuration error, 2 unreadable or
malformed input data, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .codes import (
    AlistError,
    CssCode,
    CssViolation,
    QcFormatError,
    code_parameters,
    dump_alist,
    hypergraph_product,
    lifted_product,
    load_alist,
    load_qc,
)
from .decoders import DecoderConfig, DecoderKind
from .simulate import DecoderSpec, diversity_spec, estimate_ler, points_to_csv, run_manifest

DATA_DIR = Path(__file__).resolve().parent / "data"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# experiment configuration


@dataclass
class CodeSource:
    """``kind`` is ``hp`` (two alist files) or ``lp`` (two QC files)."""

    kind: str
    first: str
    second: str


@dataclass
class DecoderEntry:
    """One decoder of an experiment.

    ``kind`` is a decoder kind, ``diversity`` (scheduled min-sum plus one
    bias-transfer member per trapping set) or ``zero`` (always estimates 0).
    """

    name: str
    kind: str
    w: float = 0.75
    max_iters: int = 100
    trapping_sets: str = ""
    ts_count: int = 0
    ts_scale: float = 0.5


@dataclass
class ExperimentConfig:
    code: CodeSource
    decoders: list[DecoderEntry]
    p: list[float]
    trials: int
    seed: int = 0
    jobs: int = 1
    max_failures: int = 100  # 0 disables early stopping
    side: str = "x"
    output: str = ""
    format: str = "csv"
    notes: str = ""

    def to_toml(self) -> str:
        doc = asdict(self)
        doc["decoder"] = doc.pop("decoders")
        return tomli_w.dumps(doc)

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentConfig":
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"config is not valid TOML: {exc}") from None
        try:
            code = CodeSource(**doc.pop("code"))
            decoders = [DecoderEntry(**d) for d in doc.pop("decoder", [])]
            doc["p"] = [float(p) for p in doc.get("p", [])]
            return cls(code=code, decoders=decoders, **doc)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"bad config: {exc}") from None

    def validate(self) -> None:
        if self.code.kind not in ("hp", "lp"):
            raise UsageError(f"code kind must be hp or lp, got {self.code.kind!r}")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if not self.p:
            raise UsageError("no depolarizing probabilities given")
        if any(not 0.0 <= p <= 1.0 for p in self.p):
            raise UsageError("p values must lie in [0, 1]")
        if self.side not in ("x", "z", "both"):
            raise UsageError("side must be x, z or both")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if not self.decoders:
            raise UsageError("no decoders configured")
        kinds = {k.value for k in DecoderKind} | {"diversity", "zero"}
        for d in self.decoders:
            if d.kind not in kinds:
                raise UsageError(f"unknown decoder kind {d.kind!r}; choose from {sorted(kinds)}")
            if d.max_iters < 1 or not d.w > 0:
                raise UsageError(f"decoder {d.name}: max_iters must be >= 1 and w > 0")


def resolve_path(name: str, base: Path | None = None) -> Path:
    """Look ``name`` up as given, next to the config file, then in the bundled data."""
    cands = [Path(name)]
    if base is not None:
        cands.append(base / name)
    cands.append(DATA_DIR / name)
    for c in cands:
        if c.is_file():
            return c
    raise DataError(f"file not found: {name}")


def load_code(src: CodeSource, base: Path | None = None) -> CssCode:
    a, b = resolve_path(src.first, base), resolve_path(src.second, base)
    if src.kind == "hp":
        return hypergraph_product(load_alist(a), load_alist(b))
    if src.kind == "lp":
        return lifted_product(load_qc(a), load_qc(b))
    raise UsageError(f"code kind must be hp or lp, got {src.kind!r}")


def build_spec(entry: DecoderEntry, code: CssCode, base: Path | None = None) -> DecoderSpec:
    if entry.kind == "zero":
        return DecoderSpec(entry.name)
    if entry.kind == "diversity":
        sets: list[list[int]] = []
        if entry.trapping_sets and entry.ts_count:
            doc = json.loads(resolve_path(entry.trapping_sets, base).read_text())
            sets = [s["variables"] for s in doc["sets"][: entry.ts_count]]
        return diversity_spec(code, sets, entry.w, entry.max_iters, entry.ts_scale, entry.name)
    cfg = DecoderConfig(DecoderKind(entry.kind), max_iters=entry.max_iters, w=entry.w, name=entry.name)
    return DecoderSpec(entry.name, (cfg,))


# ---------------------------------------------------------------------------
# commands


def _code_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("code")
    g.add_argument("--h1", help="first classical factor (alist), hypergraph product")
    g.add_argument("--h2", help="second classical factor (alist)")
    g.add_argument("--w1", help="first weight matrix (QC file), lifted product")
    g.add_argument("--w2", help="second weight matrix (QC file)")


def _code_from_args(args) -> CodeSource | None:
    if args.h1 or args.h2:
        if not (args.h1 and args.h2) or args.w1 or args.w2:
            raise UsageError("give --h1 and --h2 together, without --w1/--w2")
        return CodeSource("hp", args.h1, args.h2)
    if args.w1 or args.w2:
        if not (args.w1 and args.w2):
            raise UsageError("give --w1 and --w2 together")
        return CodeSource("lp", args.w1, args.w2)
    return None


def cmd_construct(args) -> int:
    if args.kind == "hp":
        if not (args.h1 and args.h2):
            raise UsageError("construct hp needs --h1 and --h2")
        src = CodeSource("hp", args.h1, args.h2)
    else:
        if not (args.w1 and args.w2):
            raise UsageError("construct lp needs --w1 and --w2")
        src = CodeSource("lp", args.w1, args.w2)
    code = load_code(src)
    n, k = code_parameters(code)
    if not (code.h_x @ code.h_z.T).is_zero():
        raise CssViolation("H_X H_Z^T != 0")
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "hx.alist").write_text(dump_alist(code.h_x))
        (out / "hz.alist").write_text(dump_alist(code.h_z))
    report = {"n": n, "k": k, "n_vv": code.n_vv, "n_cc": code.n_cc, "css": True, "fingerprint": code.fingerprint()}
    if args.format == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"n={n} k={k} n_vv={code.n_vv} n_cc={code.n_cc}")
        print("CSS check passed: H_X H_Z^T = 0")
    return EXIT_OK


def _experiment_from_args(args) -> tuple[ExperimentConfig, Path | None]:
    base = None
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            path = resolve_path(args.config)
        base = path.parent
        cfg = ExperimentConfig.from_toml(path.read_text())
        src = _code_from_args(args)
        if src is not None:
            cfg.code = src
    else:
        src = _code_from_args(args)
        if src is None:
            raise UsageError("simulate needs --config or a code (--h1/--h2 or --w1/--w2)")
        cfg = ExperimentConfig(src, [], [], 1000)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    if args.p:
        cfg.p = list(args.p)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.max_failures is not None:
        cfg.max_failures = args.max_failures
    if args.side is not None:
        cfg.side = args.side
    if args.output is not None:
        cfg.output = args.output
    if args.format is not None:
        cfg.format = args.format
    if args.decoder:
        known = {d.name: d for d in cfg.decoders}
        cfg.decoders = [known.get(name) or DecoderEntry(name, name) for name in args.decoder]
    if not cfg.decoders:
        cfg.decoders = [DecoderEntry("minsum", "minsum")]
    for d in cfg.decoders:
        if args.max_iters is not None:
            d.max_iters = args.max_iters
        if args.w is not None:
            d.w = args.w
    cfg.validate()
    return cfg, base


def cmd_simulate(args) -> int:
    cfg, base = _experiment_from_args(args)
    code = load_code(cfg.code, base)
    specs = [build_spec(d, code, base) for d in cfg.decoders]
    code_name = f"[[{code.n},{code.k}]]"
    points = []
    for spec in specs:
        points += estimate_ler(code, spec, cfg.p, cfg.trials, cfg.seed, cfg.jobs,
                               cfg.max_failures or None, cfg.side, code_name)
    if cfg.format == "csv":
        text = points_to_csv(points)
    else:
        text = json.dumps([{"p": pt.p, "trials": pt.trials, "failures": pt.failures, "ler": pt.ler,
                            "ci95": list(pt.ci95), "decoder": pt.decoder, "code": pt.code, "side": pt.side}
                           for pt in points], indent=1) + "\n"
    extra = {"config": json.loads(json.dumps(asdict(cfg))), "side": cfg.side}
    if cfg.notes:
        extra["notes"] = cfg.notes
    manifest = run_manifest(code, specs, cfg.p, cfg.trials, cfg.seed, extra)
    if cfg.output:
        out = Path(cfg.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        Path(str(out) + ".manifest.json").write_text(manifest)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze_ts(args) -> int:
    from .tanner import to_dot, z_graph
    from .trapset import (BudgetExceeded, FourCycleError, classify_ts, generator_combinations,
                          induced_subgraph, sufficient_condition_check)

    src = _code_from_args(args)
    if src is None:
        raise UsageError("analyze-ts needs a code (--h1/--h2 or --w1/--w2)")
    if args.max_generators < 1:
        raise UsageError("--max-generators must be >= 1")
    code = load_code(src)
    kind = DecoderKind(args.decoder)
    cfg = DecoderConfig(kind, max_iters=args.max_iters, w=args.w)
    if kind.is_minsum:
        cfg = cfg.with_channel(args.p)
    try:
        combos = generator_combinations(code, args.max_generators)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = open(args.output, "w") if args.output else sys.stdout
    dot_dir = Path(args.dot) if args.dot else None
    if dot_dir is not None:
        dot_dir.mkdir(parents=True, exist_ok=True)
    n = 0
    try:
        for gens in combos:
            if args.limit and n >= args.limit:
                break
            n += 1
            try:
                sub = induced_subgraph(code, gens)
            except FourCycleError as exc:
                raise DataError(str(exc)) from None
            rec = {"generators": list(gens), "n_vv": len(sub.vv_members), "n_cc": len(sub.cc_members),
                   "sufficient_condition": sufficient_condition_check(sub)}
            try:
                res = classify_ts(sub, cfg, code, budget=args.budget)
            except BudgetExceeded as exc:
                rec["error"] = str(exc)
            else:
                rec.update(res.to_dict())
                if dot_dir is not None:
                    name = "ts_" + "_".join(map(str, gens))
                    (dot_dir / f"{name}.dot").write_text(
                        to_dot(z_graph(code), sub.qubits, highlight=res.witness or (),
                               unsatisfied=res.witness_unsatisfied, name=name))
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qtrap", description="Product quantum LDPC codes and trapping-set-aware decoders.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("construct", help="build an HP or LP code and report its parameters")
    c.add_argument("kind", choices=["hp", "lp"])
    _code_args(c)
    c.add_argument("--output", help="directory for hx.alist and hz.alist")
    c.add_argument("--format", choices=["text", "json"], default="text")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("simulate", help="Monte Carlo logical error rates")
    s.add_argument("--config", help="TOML experiment file; flags override its values")
    _code_args(s)
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--p", type=float, action="append", help="depolarizing probability (repeatable)")
    s.add_argument("--decoder", action="append", help="decoder name from the config, or a decoder kind")
    s.add_argument("--max-iters", type=int)
    s.add_argument("--w", type=float, help="min-sum normalization")
    s.add_argument("--jobs", type=int)
    s.add_argument("--max-failures", type=int, help="stop a point after this many failures (0: never)")
    s.add_argument("--side", choices=["x", "z", "both"])
    s.add_argument("--output", help="CSV/JSON path; a .manifest.json is written beside it")
    s.add_argument("--format", choices=["csv", "json"])
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("analyze-ts", help="classify stabilizer-induced subgraphs")
    _code_args(t)
    t.add_argument("--max-generators", type=int, default=1)
    t.add_argument("--decoder", choices=[k.value for k in DecoderKind], default="bf")
    t.add_argument("--max-iters", type=int, default=100)
    t.add_argument("--w", type=float, default=0.75)
    t.add_argument("--p", type=float, default=0.03, help="channel for min-sum biases")
    t.add_argument("--budget", type=int, default=1 << 20, help="max patterns per subgraph")
    t.add_argument("--limit", type=int, default=0, help="stop after this many combinations")
    t.add_argument("--output", help="JSON-lines report file (default stdout)")
    t.add_argument("--dot", help="directory for Graphviz renderings of each subgraph")
    t.set_defaults(func=cmd_analyze_ts)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("qtrap: choose a command (construct, simulate, analyze-ts)")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DataError, AlistError, QcFormatError, FileNotFoundError, UnicodeDecodeError) as exc:
        print(f"qtrap: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (CssViolation, AssertionError) as exc:
        print(f"qtrap: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
