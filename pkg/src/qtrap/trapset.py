"""Stabilizer-induced and classical trapping sets of product codes.

A stabilizer-induced subgraph is the part of the Z Tanner graph spanned by
the union of some X-generator supports. :func:`classify_ts` decides, by
exhaustive simulation of every error pattern supported on it, whether a
decoder can get stuck there.
"""

from __future__ import annotations

import enum
import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .codes import CssCode, has_four_cycle, hypergraph_product, stabilizer_space
from .decoders import DecodeOutcome, DecoderConfig, decode
from .decoders.config import channel_bias
from .gf2 import BinaryMatrix
from .tanner import TannerGraph, from_matrix, z_graph

__all__ = [
    "BudgetExceeded",
    "FourCycleError",
    "InducedSubgraph",
    "TsClassification",
    "TsDynamics",
    "base_code",
    "build_bias_transfer",
    "classical_degree_profile",
    "classical_ts_replicas",
    "classify_ts",
    "generator_combinations",
    "induced_subgraph",
    "lp_ts_copies",
    "replica_degree_profile",
    "sufficient_condition_check",
    "ts_avoiding_bias",
]

DEFAULT_BUDGET = 1 << 20


class FourCycleError(ValueError):
    pass


class BudgetExceeded(ValueError):
    pass


class TsDynamics(str, enum.Enum):
    OSCILLATES = "oscillates"
    STALLS = "stalls"
    CONVERGES_ALL = "converges_all"
    INCONCLUSIVE = "inconclusive"


# ---------------------------------------------------------------------------
# induced subgraphs


@dataclass(frozen=True, eq=False)
class InducedSubgraph:
    """Subgraph of G_Z induced by the union of some X-generator supports.

    ``exclusive_vv[g]`` / ``exclusive_cc[g]`` hold the members of generator
    ``g`` that belong to no other listed generator. ``check_profile`` maps
    each internal check to its ``(VV, CC)`` neighbour counts inside.
    ``boundary`` maps outside variables touching one internal check to that
    check; ``crowded`` lists outside variables touching two or more.
    """

    generators: tuple[int, ...]
    vv_members: tuple[int, ...]
    cc_members: tuple[int, ...]
    internal_checks: tuple[int, ...]
    check_profile: dict[int, tuple[int, int]]
    boundary: dict[int, int]
    crowded: tuple[int, ...]
    members: dict[int, tuple[frozenset[int], frozenset[int]]]
    exclusive_vv: dict[int, frozenset[int]]
    exclusive_cc: dict[int, frozenset[int]]

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.vv_members + self.cc_members))

    def __len__(self) -> int:
        return len(self.vv_members) + len(self.cc_members)

    def degree_profile(self) -> tuple[tuple[tuple[int, int], int], ...]:
        """Multiset of internal-check ``(VV, CC)`` neighbour counts."""
        return tuple(sorted(Counter(self.check_profile.values()).items()))

    def structure_violations(self) -> list[str]:
        """Deviations from the single-generator structure of 4-cycle-free products."""
        out = []
        for c, (nv, nc) in sorted(self.check_profile.items()):
            if (nv, nc) != (1, 1):
                out.append(f"check {c} has {nv} VV and {nc} CC neighbours inside")
        if self.crowded:
            out.append(f"outside variables touching two internal checks: {list(self.crowded)}")
        return out

    def pairing_holds(self) -> bool:
        """Each exclusive VV node and exclusive CC node of one generator share
        an internal check that has no other neighbour inside."""
        inside = set(self.qubits)
        pairs: set[tuple[int, int]] = set()
        for c, (nv, nc) in self.check_profile.items():
            if (nv, nc) == (1, 1):
                pairs.add(tuple(sorted(self._inside_neighbours[c] & inside)))  # type: ignore[arg-type]
        for g in self.generators:
            for v in self.exclusive_vv[g]:
                for u in self.exclusive_cc[g]:
                    if (min(u, v), max(u, v)) not in pairs:
                        return False
        return True

    _inside_neighbours: dict[int, frozenset[int]] = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "vv": list(self.vv_members),
            "cc": list(self.cc_members),
            "internal_checks": len(self.internal_checks),
            "degree_profile": [[list(k), v] for k, v in self.degree_profile()],
        }


def _factor_girth_ok(code: CssCode) -> bool:
    cached = code.__dict__.get("_factors_4cycle_free")
    if cached is None:
        h1, h2 = code.provenance.get("h1"), code.provenance.get("h2")
        cached = h1 is None or h2 is None or not (has_four_cycle(h1) or has_four_cycle(h2))
        object.__setattr__(code, "_factors_4cycle_free", cached)
    return cached


def induced_subgraph(code: CssCode, generators: Iterable[int], check_girth: bool = True) -> InducedSubgraph:
    """Subgraph of G_Z spanned by the supports of the given rows of H_X.

    With ``check_girth`` the classical factors must be free of 4-cycles;
    otherwise :class:`FourCycleError` is raised.
    """
    gens = tuple(sorted(set(int(g) for g in generators)))
    if not gens:
        raise ValueError("need at least one generator")
    if gens[0] < 0 or gens[-1] >= code.h_x.rows:
        raise IndexError(f"generator index outside 0..{code.h_x.rows - 1}")
    if check_girth and not _factor_girth_ok(code):
        raise FourCycleError("a classical factor has 4-cycles")
    g = z_graph(code)
    members: dict[int, tuple[frozenset[int], frozenset[int]]] = {}
    for r in gens:
        sup = code.h_x.row_support(r)
        members[r] = (frozenset(int(q) for q in sup if q < code.n_vv),
                      frozenset(int(q) for q in sup if q >= code.n_vv))
    vv = frozenset().union(*(m[0] for m in members.values()))
    cc = frozenset().union(*(m[1] for m in members.values()))
    inside = vv | cc
    checks = sorted({int(c) for q in inside for c in g.checks_of(q)})
    profile: dict[int, tuple[int, int]] = {}
    nbrs: dict[int, frozenset[int]] = {}
    touch: Counter[int] = Counter()
    for c in checks:
        vs = frozenset(int(v) for v in g.vars_of(c))
        nbrs[c] = vs
        ins = vs & inside
        profile[c] = (sum(1 for v in ins if v < code.n_vv), sum(1 for v in ins if v >= code.n_vv))
        for v in vs - inside:
            touch[v] += 1
    boundary = {}
    for v, cnt in touch.items():
        if cnt == 1:
            boundary[v] = next(c for c in checks if v in nbrs[c])
    crowded = tuple(sorted(v for v, cnt in touch.items() if cnt > 1))
    excl_vv, excl_cc = {}, {}
    for r in gens:
        others_vv = frozenset().union(*(members[o][0] for o in gens if o != r))
        others_cc = frozenset().union(*(members[o][1] for o in gens if o != r))
        excl_vv[r] = members[r][0] - others_vv
        excl_cc[r] = members[r][1] - others_cc
    return InducedSubgraph(
        generators=gens,
        vv_members=tuple(sorted(vv)),
        cc_members=tuple(sorted(cc)),
        internal_checks=tuple(checks),
        check_profile=profile,
        boundary=dict(sorted(boundary.items())),
        crowded=crowded,
        members=members,
        exclusive_vv=excl_vv,
        exclusive_cc=excl_cc,
        _inside_neighbours=nbrs,
    )


def sufficient_condition_check(sub: InducedSubgraph) -> bool:
    """Every generator keeps a strict majority of its own CC nodes and of its
    own VV nodes exclusive to itself.

    When this holds the subgraph is a trapping set for bit flipping. The
    converse does not hold.
    """
    for r in sub.generators:
        vv, cc = sub.members[r]
        if len(sub.exclusive_cc[r]) < len(cc) // 2 + 1:
            return False
        if len(sub.exclusive_vv[r]) < len(vv) // 2 + 1:
            return False
    return True


# ---------------------------------------------------------------------------
# classification by exhaustive simulation

# per-pattern status codes stored in TsClassification.pattern_status
OK, MISCORRECTED, STALLED, OSCILLATING, UNDECIDED = range(5)
_STATUS_CODE = {"stalled": STALLED, "oscillating": OSCILLATING, "max_iters": UNDECIDED}


@dataclass(frozen=True, eq=False)
class TsClassification:
    """Outcome of decoding every nonzero pattern supported on a subgraph.

    ``pattern_status[mask]`` (when kept) is the code for the pattern whose
    bit ``i`` selects ``qubits[i]``: 0 corrected, 1 converged to a logical
    error, 2 stalled, 3 oscillating, 4 undecided at the iteration cap.
    """

    is_trapping: bool
    dynamics: TsDynamics
    witness: tuple[int, ...] | None
    witness_unsatisfied: tuple[int, ...]
    qubits: tuple[int, ...]
    generators: tuple[int, ...]
    patterns: int
    counts: dict[str, int]
    decoder: str
    pattern_status: np.ndarray | None = None

    @property
    def corrects_all(self) -> bool:
        return self.counts.get("corrected", 0) == self.patterns

    def failing_masks(self) -> np.ndarray:
        if self.pattern_status is None:
            raise ValueError("classification was run without keep_patterns")
        return np.flatnonzero(self.pattern_status >= STALLED)

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "n_qubits": len(self.qubits),
            "decoder": self.decoder,
            "is_trapping": self.is_trapping,
            "dynamics": self.dynamics.value,
            "witness": None if self.witness is None else list(self.witness),
            "witness_unsatisfied": list(self.witness_unsatisfied),
            "patterns": self.patterns,
            "counts": dict(self.counts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _pattern_error(n: int, qubits: Sequence[int], mask: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.uint8)
    for i, q in enumerate(qubits):
        if mask >> i & 1:
            e[q] = 1
    return e


def decode_pattern(code: CssCode, graph: TannerGraph, e_x: np.ndarray, cfg: DecoderConfig) -> tuple[int, DecodeOutcome]:
    """Decode the syndrome of ``e_x``; returns (status code, outcome)."""
    out = decode(graph, code.h_z.mul_vec(e_x), cfg)
    if out.converged:
        ok = stabilizer_space(code).contains(out.estimate ^ e_x)
        return (OK if ok else MISCORRECTED), out
    return _STATUS_CODE[out.status], out


class _LocalView:
    """Part of G_Z within ``radius`` variable-to-variable hops of some qubits.

    Bit flipping only touches variables next to unsatisfied checks, so a run
    on this view matches the run on the whole graph as long as no variable
    of the outermost layer ever flips. Runs that break this are redone on
    the full graph by the caller.
    """

    def __init__(self, code: CssCode, qubits: Sequence[int], radius: int) -> None:
        g = z_graph(code)
        dist = {int(q): 0 for q in qubits}
        frontier = list(dist)
        for d in range(1, radius + 1):
            nxt = []
            for v in frontier:
                for c in g.checks_of(v):
                    for u in g.vars_of(c):
                        u = int(u)
                        if u not in dist:
                            dist[u] = d
                            nxt.append(u)
            frontier = nxt
        self.vars = np.array(sorted(dist), dtype=np.int64)
        self.checks = np.unique(np.concatenate([g.checks_of(v) for v in self.vars]))
        local_var = {int(v): k for k, v in enumerate(self.vars)}
        dense = np.zeros((self.checks.size, self.vars.size), dtype=np.uint8)
        for r, c in enumerate(self.checks):
            for u in g.vars_of(c):
                k = local_var.get(int(u))
                if k is not None:
                    dense[r, k] = 1
        self.graph = from_matrix(BinaryMatrix.from_dense(dense), int(np.searchsorted(self.vars, code.n_vv)))
        self.outer = np.flatnonzero(np.array([dist[int(v)] for v in self.vars]) == radius)
        self.local_check = {int(c): r for r, c in enumerate(self.checks)}

    def embed(self, x: np.ndarray, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.uint8)
        out[self.vars] = x
        return out


def classify_ts(
    sub: InducedSubgraph,
    decoder: DecoderConfig,
    code: CssCode,
    budget: int = DEFAULT_BUDGET,
    keep_patterns: bool = False,
    local_radius: int | None = 3,
) -> TsClassification:
    """Decode every nonzero error pattern supported on ``sub``.

    The subgraph is a trapping set when some pattern leaves the decoder
    unconverged. The witness is the lightest such pattern (lowest mask on
    ties); its dynamics are reported from the decoder's cycle detection.

    Bit-flipping decoders run on the part of G_Z within ``local_radius``
    hops of the subgraph, falling back to the whole graph for any pattern
    whose run reaches the edge of that region; results are identical to
    whole-graph decoding. ``None`` always decodes on the whole graph.
    """
    qubits = sub.qubits
    total = 1 << len(qubits)
    if total > budget:
        raise BudgetExceeded(f"{total} patterns exceed the budget of {budget}")
    if decoder.kind.is_minsum and decoder.edge_bias is None and decoder.default_bias is None:
        raise ValueError("min-sum classification needs a bias; use cfg.with_channel(p)")
    full = z_graph(code)
    n = code.n
    space = stabilizer_space(code)
    view = None
    if local_radius is not None and not decoder.kind.is_minsum:
        view = _LocalView(code, qubits, max(1, local_radius))
        if view.vars.size == n:
            view = None
    if view is not None:
        graph = view.graph
        traced = decoder.replace(record_trace=True)
        cols = [np.array([view.local_check[int(c)] for c in full.checks_of(q)]) for q in qubits]
    else:
        graph = full
        cols = [full.checks_of(q) for q in qubits]
    status = np.zeros(total, dtype=np.int8) if keep_patterns else None
    counts: Counter[str] = Counter()
    names = {OK: "corrected", MISCORRECTED: "miscorrected", STALLED: "stalled",
             OSCILLATING: "oscillating", UNDECIDED: "undecided"}
    witness_mask = None
    witness_key = None
    witness_out = None
    for mask in range(1, total):
        sigma = np.zeros(graph.check_count, dtype=np.uint8)
        e = np.zeros(n, dtype=np.uint8)
        m = mask
        i = 0
        while m:
            if m & 1:
                sigma[cols[i]] ^= 1
                e[qubits[i]] = 1
            m >>= 1
            i += 1
        if view is None:
            out = decode(graph, sigma, decoder)
        else:
            out = decode(graph, sigma, traced)
            if out.trace[:, view.outer].any():
                out = decode(full, code.h_z.mul_vec(e), decoder)
            else:
                out = DecodeOutcome(view.embed(out.estimate, n), out.converged, out.iters_used, out.status)
        if out.converged:
            code_ = OK if space.contains(out.estimate ^ e) else MISCORRECTED
        else:
            code_ = _STATUS_CODE[out.status]
            key = (bin(mask).count("1"), mask)
            if witness_key is None or key < witness_key:
                witness_key, witness_mask, witness_out = key, mask, out
        counts[names[code_]] += 1
        if status is not None:
            status[mask] = code_
    counts["corrected"] += 1  # the zero pattern
    if status is not None:
        status[0] = OK

    if witness_mask is None:
        dyn = TsDynamics.CONVERGES_ALL
        witness = None
        unsat: tuple[int, ...] = ()
    else:
        dyn = {"oscillating": TsDynamics.OSCILLATES, "stalled": TsDynamics.STALLS}.get(
            witness_out.status, TsDynamics.INCONCLUSIVE
        )
        witness = tuple(q for i, q in enumerate(qubits) if witness_mask >> i & 1)
        e = _pattern_error(n, qubits, witness_mask)
        resid = code.h_z.mul_vec(witness_out.estimate) ^ code.h_z.mul_vec(e)
        unsat = tuple(int(c) for c in np.flatnonzero(resid))
    return TsClassification(
        is_trapping=witness_mask is not None,
        dynamics=dyn,
        witness=witness,
        witness_unsatisfied=unsat,
        qubits=qubits,
        generators=sub.generators,
        patterns=total,
        counts=dict(counts),
        decoder=decoder.label,
        pattern_status=status,
    )


# ---------------------------------------------------------------------------
# generator combinations


def _connected_subsets(adj: list[set[int]], max_size: int) -> Iterator[tuple[int, ...]]:
    """All connected vertex subsets of size <= max_size, each once, sorted."""
    seen: set[frozenset[int]] = set()
    frontier = [frozenset([v]) for v in range(len(adj))]
    for size in range(1, max_size + 1):
        nxt = []
        for s in frontier:
            if s in seen:
                continue
            seen.add(s)
            yield tuple(sorted(s))
            if size < max_size:
                for v in set().union(*(adj[u] for u in s)) - s:
                    nxt.append(s | {v})
        frontier = nxt


def generator_combinations(code: CssCode, max_generators: int) -> Iterator[tuple[int, ...]]:
    """X-row sets ``{(i, b): i in I, b in J}`` of an HP code with the check
    set I connected in the first factor, the variable set J connected in the
    second, and ``|I| * |J| <= max_generators``."""
    if code.kind != "hp":
        if max_generators == 1:
            return ((r,) for r in range(code.h_x.rows))
        raise ValueError("multi-generator combinations need a hypergraph-product code")
    return _product_combinations(code, max_generators)


def _product_combinations(code: CssCode, max_generators: int) -> Iterator[tuple[int, ...]]:
    h1: BinaryMatrix = code.provenance["h1"]
    h2: BinaryMatrix = code.provenance["h2"]
    n2 = h2.cols
    # checks of h1 adjacent when they share a variable; variables of h2 when they share a check
    d1 = h1.dense.astype(np.int64)
    d2 = h2.dense.astype(np.int64)
    a1 = (d1 @ d1.T) > 0
    a2 = (d2.T @ d2) > 0
    adj1 = [set(np.flatnonzero(a1[i])) - {i} for i in range(h1.rows)]
    adj2 = [set(np.flatnonzero(a2[b])) - {b} for b in range(h2.cols)]
    sets1 = list(_connected_subsets(adj1, max_generators))
    sets2 = list(_connected_subsets(adj2, max_generators))
    for s1 in sets1:
        for s2 in sets2:
            if len(s1) * len(s2) <= max_generators:
                yield tuple(sorted(int(i) * n2 + int(b) for i in s1 for b in s2))


# ---------------------------------------------------------------------------
# lifted-product copies


def base_code(code: CssCode) -> CssCode:
    """HP code of the base matrices of an LP code (its base graph)."""
    if code.kind != "lp":
        raise ValueError("base_code needs a lifted-product code")
    b1 = BinaryMatrix.from_dense(code.provenance["w1"].base_matrix())
    b2 = BinaryMatrix.from_dense(code.provenance["w2"].base_matrix())
    return hypergraph_product(b1, b2)


def lp_ts_copies(code: CssCode, base_generator: int) -> list[InducedSubgraph]:
    """The gamma lifted images of one base-graph X-check, as induced subgraphs."""
    if code.kind != "lp":
        raise ValueError("lp_ts_copies needs a lifted-product code")
    gamma = code.provenance["gamma"]
    base_rows = code.h_x.rows // gamma
    if not 0 <= base_generator < base_rows:
        raise IndexError(f"base X-check {base_generator} outside 0..{base_rows - 1}")
    return [induced_subgraph(code, [base_generator * gamma + t], check_girth=False) for t in range(gamma)]


# ---------------------------------------------------------------------------
# classical trapping-set replicas and bias transfer


def _factor(code: CssCode, which: int) -> BinaryMatrix:
    if which not in (1, 2):
        raise ValueError("which_factor must be 1 or 2")
    key = "h1" if which == 1 else "h2"
    if key not in code.provenance:
        raise ValueError("code has no product provenance")
    return code.provenance[key]


def classical_ts_replicas(code: CssCode, ts_vars: Iterable[int], which_factor: int) -> list[tuple[int, ...]]:
    """Images of a classical trapping set inside the quantum Tanner graphs.

    A factor-2 set lands among the VV qubits of G_Z (one copy per variable of
    the other factor), a factor-1 set among the VV qubits of G_X. For LP
    codes every cyclic shift of each copy is a replica too.
    """
    h = _factor(code, which_factor)
    ts = sorted(set(int(v) for v in ts_vars))
    if not ts:
        raise ValueError("empty trapping set")
    if ts[0] < 0 or ts[-1] >= h.cols:
        raise IndexError(f"variable index outside 0..{h.cols - 1}")
    gamma = code.provenance.get("gamma", 1) if code.kind == "lp" else 1
    h1, h2 = code.provenance["h1"], code.provenance["h2"]
    nb2 = h2.cols // gamma
    copies = (h1.cols if which_factor == 2 else h2.cols) // gamma
    out = []
    for a in range(copies):
        for t in range(gamma):
            img = []
            for v in ts:
                k, s = divmod(v, gamma)
                s = (s + t) % gamma
                if which_factor == 2:
                    img.append((a * nb2 + k) * gamma + s)
                else:
                    img.append((k * nb2 + a) * gamma + s)
            out.append(tuple(sorted(img)))
    return out


def _profile(g: TannerGraph, vs: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    cnt: Counter[int] = Counter()
    for v in vs:
        for c in g.checks_of(v):
            cnt[int(c)] += 1
    return tuple(sorted(int(g.var_degree[v]) for v in vs)), tuple(sorted(cnt.values()))


def classical_degree_profile(h: BinaryMatrix, ts_vars: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(sorted variable degrees, sorted per-check member counts) of the set."""
    return _profile(from_matrix(h), sorted(set(ts_vars)))


def replica_degree_profile(code: CssCode, qubits: Iterable[int], which_factor: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Same profile for a replica, measured in G_Z (factor 2) or G_X (factor 1)."""
    from .tanner import x_graph

    g = z_graph(code) if which_factor == 2 else x_graph(code)
    return _profile(g, sorted(set(qubits)))


def build_bias_transfer(code: CssCode, classical_edge_bias: Sequence[float], p: float) -> np.ndarray:
    """Per-edge biases on G_Z that repeat a classical decoder's biases on
    every copy of the second factor's Tanner graph.

    ``classical_edge_bias`` is indexed by the row-major edge order of the
    second factor (lifted, for LP codes). Edges outside the copies get the
    channel value ``log((1-p)/p)``.
    """
    h2 = _factor(code, 2)
    b = np.asarray(classical_edge_bias, dtype=np.float64)
    rows, cols = np.nonzero(h2.dense)
    if b.shape != (rows.shape[0],):
        raise ValueError(f"expected {rows.shape[0]} classical edge biases, got {b.shape}")
    g = z_graph(code)
    out = np.full(g.edge_count, channel_bias(p), dtype=np.float64)
    m2, n2 = h2.shape
    for a in range(code.n_vv // n2):
        out[g.edge_id(a * m2 + rows, a * n2 + cols)] = b
    return out


def ts_avoiding_bias(h: BinaryMatrix, ts_vars: Iterable[int], p: float, scale: float = 0.5) -> np.ndarray:
    """Classical per-edge biases that scale the channel value on the edges of
    one trapping set, leaving every other edge at ``log((1-p)/p)``.

    Lowering trust in the set's variables lets min-sum escape the full-set
    error it otherwise cannot correct.
    """
    g = from_matrix(h)
    vs = np.fromiter((int(v) for v in ts_vars), dtype=np.int64)
    if vs.size == 0:
        raise ValueError("empty trapping set")
    if vs.min() < 0 or vs.max() >= h.cols:
        raise IndexError(f"variable index outside 0..{h.cols - 1}")
    cb = channel_bias(p)
    return np.where(np.isin(g.edge_var, vs), scale * cb, cb)
