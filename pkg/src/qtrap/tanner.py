"""Tanner graphs with stable edge numbering and product-node labels."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .codes import CssCode
from .gf2 import BinaryMatrix

__all__ = [
    "NodeKind",
    "NodeLabel",
    "TannerGraph",
    "from_matrix",
    "z_graph",
    "x_graph",
    "qubit_label",
    "x_check_label",
    "z_check_label",
    "x_check_neighborhood",
    "to_dot",
]


class NodeKind(str, enum.Enum):
    VV = "VV"
    CC = "CC"
    XCHECK = "X"
    ZCHECK = "Z"


@dataclass(frozen=True)
class NodeLabel:
    """Node type plus its coordinates in the two factor graphs.

    For a hypergraph product, ``coords`` is ``(index in h1, index in h2)``:
    VV = (var, var), CC = (check, check), X = (check of h1, var of h2),
    Z = (var of h1, check of h2). For a lifted product the coordinates refer
    to the lifted factors.
    """

    kind: NodeKind
    index: int
    coords: tuple[int, int] | None = None


class TannerGraph:
    """Bipartite graph of a parity-check matrix.

    Edge ``e`` joins ``edge_check[e]`` and ``edge_var[e]``; edges are numbered
    in row-major order of the matrix, so the edges of check ``c`` are the
    contiguous range ``chk_ptr[c]:chk_ptr[c+1]``. ``var_edges[var_ptr[v]:
    var_ptr[v+1]]`` lists the edges of variable ``v`` in increasing order.
    """

    def __init__(self, h: BinaryMatrix, vv_split: int | None = None) -> None:
        if vv_split is None:
            vv_split = h.cols
        if not 0 <= vv_split <= h.cols:
            raise ValueError(f"vv_split {vv_split} outside 0..{h.cols}")
        self.h = h
        self.check_count, self.var_count = h.shape
        self.n_vv = vv_split
        rows, cols = np.nonzero(h.dense)  # row-major
        self.edge_check = rows.astype(np.int64)
        self.edge_var = cols.astype(np.int64)
        self.chk_ptr = np.zeros(self.check_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.check_count), out=self.chk_ptr[1:])
        order = np.argsort(self.edge_var, kind="stable")
        self.var_edges = order.astype(np.int64)
        self.var_ptr = np.zeros(self.var_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(cols, minlength=self.var_count), out=self.var_ptr[1:])
        for arr in (self.edge_check, self.edge_var, self.chk_ptr, self.var_edges, self.var_ptr):
            arr.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return int(self.edge_var.shape[0])

    @property
    def n_cc(self) -> int:
        return self.var_count - self.n_vv

    @cached_property
    def var_degree(self) -> np.ndarray:
        return np.diff(self.var_ptr)

    @cached_property
    def check_degree(self) -> np.ndarray:
        return np.diff(self.chk_ptr)

    @cached_property
    def var_is_vv(self) -> np.ndarray:
        out = np.zeros(self.var_count, dtype=bool)
        out[: self.n_vv] = True
        return out

    def var_type(self, v: int) -> NodeKind:
        return NodeKind.VV if v < self.n_vv else NodeKind.CC

    def edges_of_var(self, v: int) -> np.ndarray:
        return self.var_edges[self.var_ptr[v]:self.var_ptr[v + 1]]

    def edges_of_check(self, c: int) -> np.ndarray:
        return np.arange(self.chk_ptr[c], self.chk_ptr[c + 1])

    def checks_of(self, v: int) -> np.ndarray:
        return self.edge_check[self.edges_of_var(v)]

    def vars_of(self, c: int) -> np.ndarray:
        return self.edge_var[self.chk_ptr[c]:self.chk_ptr[c + 1]]

    def edge_id(self, check: int | np.ndarray, var: int | np.ndarray) -> np.ndarray:
        """Edge index of ``(check, var)``; raises KeyError for non-edges."""
        check = np.asarray(check, dtype=np.int64)
        var = np.asarray(var, dtype=np.int64)
        key = check * self.var_count + var
        all_keys = self.edge_check * self.var_count + self.edge_var  # sorted: row-major
        pos = np.searchsorted(all_keys, key)
        ok = (pos < all_keys.shape[0]) & (all_keys[np.minimum(pos, all_keys.shape[0] - 1)] == key)
        if not np.all(ok):
            raise KeyError("not an edge of this graph")
        return pos

    def syndrome(self, x: np.ndarray) -> np.ndarray:
        return self.h.mul_vec(x)

    def check_has_four_cycle(self) -> bool:
        from .codes import has_four_cycle

        return has_four_cycle(self.h)

    def __repr__(self) -> str:
        return f"TannerGraph(vars={self.var_count}, checks={self.check_count}, edges={self.edge_count}, n_vv={self.n_vv})"


def from_matrix(h: BinaryMatrix, vv_split: int | None = None) -> TannerGraph:
    """Tanner graph of ``h``; variables below ``vv_split`` are tagged VV."""
    return TannerGraph(h, vv_split)


def z_graph(code: CssCode) -> TannerGraph:
    """Tanner graph of H_Z with the code's VV/CC split, cached on the code."""
    g = code.__dict__.get("_g_z")
    if g is None:
        g = TannerGraph(code.h_z, code.n_vv)
        object.__setattr__(code, "_g_z", g)
    return g


def x_graph(code: CssCode) -> TannerGraph:
    g = code.__dict__.get("_g_x")
    if g is None:
        g = TannerGraph(code.h_x, code.n_vv)
        object.__setattr__(code, "_g_x", g)
    return g


# ---------------------------------------------------------------------------
# product coordinates


def _factor_dims(code: CssCode) -> tuple[int, int, int, int]:
    h1, h2 = code.provenance.get("h1"), code.provenance.get("h2")
    if h1 is None or h2 is None:
        raise ValueError("code has no product provenance")
    return h1.rows, h1.cols, h2.rows, h2.cols


def qubit_label(code: CssCode, q: int) -> NodeLabel:
    if not 0 <= q < code.n:
        raise IndexError(q)
    kind = NodeKind.VV if q < code.n_vv else NodeKind.CC
    if "h1" not in code.provenance:
        return NodeLabel(kind, q)
    m1, n1, m2, n2 = _factor_dims(code)
    if kind is NodeKind.VV:
        return NodeLabel(kind, q, divmod(q, n2))
    return NodeLabel(kind, q, divmod(q - code.n_vv, m2))


def x_check_label(code: CssCode, r: int) -> NodeLabel:
    if "h1" not in code.provenance:
        return NodeLabel(NodeKind.XCHECK, r)
    m1, n1, m2, n2 = _factor_dims(code)
    return NodeLabel(NodeKind.XCHECK, r, divmod(r, n2))


def z_check_label(code: CssCode, r: int) -> NodeLabel:
    if "h1" not in code.provenance:
        return NodeLabel(NodeKind.ZCHECK, r)
    m1, n1, m2, n2 = _factor_dims(code)
    return NodeLabel(NodeKind.ZCHECK, r, divmod(r, m2))


@dataclass(frozen=True)
class CheckNeighborhood:
    vv: frozenset[int]
    cc: frozenset[int]

    @property
    def all(self) -> frozenset[int]:
        return self.vv | self.cc

    def __len__(self) -> int:
        return len(self.vv) + len(self.cc)

    def __iter__(self):
        return iter(sorted(self.all))


def x_check_neighborhood(code: CssCode, x_check: int) -> CheckNeighborhood:
    """Support of row ``x_check`` of H_X split into VV and CC qubits.

    For a product code this is ``{(a, b): a in N1(i)} U {(i, j): j in N2(b)}``
    for X-check ``(i, b)``.
    """
    if not 0 <= x_check < code.h_x.rows:
        raise IndexError(f"X-check {x_check} out of range 0..{code.h_x.rows - 1}")
    sup = code.h_x.row_support(x_check)
    return CheckNeighborhood(
        frozenset(int(q) for q in sup if q < code.n_vv),
        frozenset(int(q) for q in sup if q >= code.n_vv),
    )


# ---------------------------------------------------------------------------
# DOT export

_STYLE = {
    NodeKind.VV: 'shape=circle, style=filled, fillcolor="#9ecae1"',
    NodeKind.CC: 'shape=circle, style=filled, fillcolor="#fdae6b"',
    NodeKind.ZCHECK: "shape=square",
    NodeKind.XCHECK: 'shape=square, color="red"',
}


def to_dot(
    graph: TannerGraph,
    variables: Iterable[int] | None = None,
    checks: Iterable[int] | None = None,
    highlight: Iterable[int] = (),
    unsatisfied: Iterable[int] = (),
    name: str = "tanner",
) -> str:
    """Render the subgraph on ``variables`` (and the given or adjacent
    checks) as Graphviz DOT. Highlighted variables and unsatisfied checks are
    drawn with a heavy black outline."""
    vs = sorted(set(range(graph.var_count) if variables is None else variables))
    if checks is None:
        cs = sorted({int(c) for v in vs for c in graph.checks_of(v)})
    else:
        cs = sorted(set(checks))
    hl, unsat = set(highlight), set(unsatisfied)
    vset, cset = set(vs), set(cs)
    lines = [f"graph {name} {{", "  node [fontsize=9];"]
    for v in vs:
        kind = graph.var_type(v)
        extra = ", penwidth=3" if v in hl else ""
        lines.append(f'  v{v} [label="{kind.value}{v}", {_STYLE[kind]}{extra}];')
    for c in cs:
        extra = ", style=filled, fillcolor=black, fontcolor=white" if c in unsat else ""
        lines.append(f'  c{c} [label="z{c}", {_STYLE[NodeKind.ZCHECK]}{extra}];')
    for c in cs:
        for v in graph.vars_of(c):
            if int(v) in vset and c in cset:
                lines.append(f"  c{c} -- v{int(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
