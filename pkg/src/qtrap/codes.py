"""Classical LDPC inputs and the hypergraph-product / lifted-product CSS codes.

Column order of every :class:`CssCode` is ``[VV block | CC block]``: the
first ``n_vv`` qubits come from variable x variable node pairs, the rest from
check x check pairs. Decoders that schedule by qubit type rely on it.
"""

from __future__ import annotations

import hashlib
import io
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .gf2 import BinaryMatrix, RowSpace, hstack, kron, rank

__all__ = [
    "AlistError",
    "CssCode",
    "CssViolation",
    "QcFormatError",
    "QcMatrix",
    "QcPolynomial",
    "circulant_star",
    "code_parameters",
    "dump_alist",
    "dump_qc",
    "has_four_cycle",
    "hypergraph_product",
    "lift",
    "lifted_product",
    "load_alist",
    "load_qc",
    "random_qc_ldpc",
    "stabilizer_space",
]

PathOrText = Union[str, bytes, os.PathLike, io.IOBase]


class AlistError(ValueError):
    pass


class QcFormatError(ValueError):
    pass


class CssViolation(AssertionError):
    """Raised when H_X H_Z^T != 0; always an implementation bug."""


# ---------------------------------------------------------------------------
# polynomials over R_gamma = F_2[x] / (x^gamma - 1)


@dataclass(frozen=True)
class QcPolynomial:
    """Element of the circulant ring, stored as its set of exponents.

    The empty set is the zero element. Exponents are reduced mod ``gamma``
    and terms that coincide cancel in pairs, as they do over GF(2).
    """

    terms: frozenset[int]
    gamma: int

    def __init__(self, terms: Iterable[int], gamma: int) -> None:
        if gamma < 1:
            raise ValueError("gamma must be >= 1")
        reduced: set[int] = set()
        for t in terms:
            reduced ^= {int(t) % gamma}
        object.__setattr__(self, "terms", frozenset(reduced))
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def monomial(cls, exponent: int, gamma: int) -> "QcPolynomial":
        return cls((exponent,), gamma)

    @classmethod
    def zero(cls, gamma: int) -> "QcPolynomial":
        return cls((), gamma)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def weight(self) -> int:
        return len(self.terms)

    def __mul__(self, other: "QcPolynomial") -> "QcPolynomial":
        _same_gamma(self, other)
        return QcPolynomial((a + b for a in self.terms for b in other.terms), self.gamma)

    def __add__(self, other: "QcPolynomial") -> "QcPolynomial":
        _same_gamma(self, other)
        return QcPolynomial(list(self.terms) + list(other.terms), self.gamma)

    def circulant(self) -> np.ndarray:
        """gamma x gamma matrix; x^r has ones at ``(t, (t + r) mod gamma)``."""
        g = self.gamma
        out = np.zeros((g, g), dtype=np.uint8)
        rows = np.arange(g)
        for r in self.terms:
            out[rows, (rows + r) % g] ^= 1
        return out

    def token(self) -> str:
        return "-" if self.is_zero else ",".join(str(t) for t in sorted(self.terms))

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        return " + ".join(f"x^{t}" for t in sorted(self.terms))


def _same_gamma(a: QcPolynomial, b: QcPolynomial) -> None:
    if a.gamma != b.gamma:
        raise ValueError(f"lifting sizes differ: {a.gamma} vs {b.gamma}")


def circulant_star(r: QcPolynomial, gamma: int | None = None) -> QcPolynomial:
    """Conjugate of a monomial: ``x^a -> x^((gamma - a) mod gamma)``, ``0 -> 0``.

    Multi-term entries are rejected; only monomial weights are conjugated
    in the lifted-product construction.
    """
    g = r.gamma if gamma is None else gamma
    if g != r.gamma:
        raise ValueError(f"gamma {g} does not match polynomial ring size {r.gamma}")
    if r.is_zero:
        return r
    if not r.is_monomial:
        raise ValueError(f"circulant_star needs a monomial, got {r!r}")
    (a,) = r.terms
    return QcPolynomial.monomial((g - a) % g, g)


@dataclass(frozen=True)
class QcMatrix:
    """Matrix over R_gamma (base matrix with circulant labels)."""

    entries: tuple[tuple[QcPolynomial, ...], ...]
    gamma: int

    def __post_init__(self) -> None:
        widths = {len(r) for r in self.entries}
        if len(widths) > 1:
            raise ValueError("ragged QC matrix")
        for row in self.entries:
            for p in row:
                if p.gamma != self.gamma:
                    raise ValueError("entry lifting size differs from matrix gamma")

    @classmethod
    def from_exponents(cls, exps: Sequence[Sequence[object]], gamma: int) -> "QcMatrix":
        """Build from a grid whose cells are an int exponent, a list of
        exponents, or ``None``/``-1`` for the zero element."""
        rows = []
        for row in exps:
            cells = []
            for c in row:
                if c is None or (isinstance(c, (int, np.integer)) and c < 0):
                    cells.append(QcPolynomial.zero(gamma))
                elif isinstance(c, (int, np.integer)):
                    cells.append(QcPolynomial.monomial(int(c), gamma))
                else:
                    cells.append(QcPolynomial(c, gamma))  # type: ignore[arg-type]
            rows.append(tuple(cells))
        return cls(tuple(rows), gamma)

    @classmethod
    def from_base(cls, base: np.ndarray | BinaryMatrix) -> "QcMatrix":
        """Gamma = 1 matrix with ``x^0`` wherever ``base`` is nonzero."""
        dense = base.dense if isinstance(base, BinaryMatrix) else np.asarray(base)
        return cls.from_exponents([[0 if v else None for v in row] for row in dense], 1)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> QcPolynomial:
        i, j = ij
        return self.entries[i][j]

    def base_matrix(self) -> np.ndarray:
        """Integer base matrix: number of circulant terms per cell."""
        return np.array([[p.weight for p in row] for row in self.entries], dtype=np.int64).reshape(self.rows, self.cols)

    def is_monomial(self) -> bool:
        return all(p.weight <= 1 for row in self.entries for p in row)

    def transpose(self) -> "QcMatrix":
        return QcMatrix(tuple(zip(*self.entries)) if self.entries else (), self.gamma)

    def star(self) -> "QcMatrix":
        """Transpose followed by entrywise :func:`circulant_star`."""
        t = self.transpose()
        return QcMatrix(tuple(tuple(circulant_star(p) for p in row) for row in t.entries), self.gamma)

    def kron_identity_right(self, k: int) -> "QcMatrix":
        """``self (x) I_k``."""
        zero = QcPolynomial.zero(self.gamma)
        out = [[zero] * (self.cols * k) for _ in range(self.rows * k)]
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                for t in range(k):
                    out[i * k + t][j * k + t] = p
        return QcMatrix(tuple(tuple(r) for r in out), self.gamma)

    def kron_identity_left(self, k: int) -> "QcMatrix":
        """``I_k (x) self``."""
        zero = QcPolynomial.zero(self.gamma)
        out = [[zero] * (self.cols * k) for _ in range(self.rows * k)]
        for t in range(k):
            for i, row in enumerate(self.entries):
                for j, p in enumerate(row):
                    out[t * self.rows + i][t * self.cols + j] = p
        return QcMatrix(tuple(tuple(r) for r in out), self.gamma)

    def hstack(self, other: "QcMatrix") -> "QcMatrix":
        if self.rows != other.rows or self.gamma != other.gamma:
            raise ValueError("cannot hstack QC matrices of different height or gamma")
        return QcMatrix(tuple(a + b for a, b in zip(self.entries, other.entries)), self.gamma)


def lift(qc: QcMatrix) -> BinaryMatrix:
    """Expand every cell into its gamma x gamma circulant."""
    g = qc.gamma
    out = np.zeros((qc.rows * g, qc.cols * g), dtype=np.uint8)
    for i, row in enumerate(qc.entries):
        for j, p in enumerate(row):
            if not p.is_zero:
                out[i * g:(i + 1) * g, j * g:(j + 1) * g] = p.circulant()
    return BinaryMatrix.from_dense(out)


# ---------------------------------------------------------------------------
# file formats


def _read_text(src: PathOrText) -> str:
    if isinstance(src, io.IOBase):
        data = src.read()
    elif isinstance(src, bytes):
        data = src
    elif isinstance(src, os.PathLike) or (isinstance(src, str) and src and "\n" not in src and Path(src).is_file()):
        data = Path(src).read_bytes()
    elif isinstance(src, str):
        data = src
    else:
        raise FileNotFoundError(src)
    return data.decode("ascii") if isinstance(data, bytes) else data


def load_alist(src: PathOrText) -> BinaryMatrix:
    """Parse an alist file (path, text or bytes) into an m x n matrix.

    Layout: ``n m``; max column and row degree; n column degrees; m row
    degrees; n lines of 1-indexed check neighbours; m lines of 1-indexed
    variable neighbours. Zero padding in neighbour lists is tolerated.
    """
    text = _read_text(src)
    try:
        tokens = [int(t) for t in text.split()]
    except ValueError as exc:
        raise AlistError(f"non-integer token: {exc}") from None
    pos = 0

    def take(k: int) -> list[int]:
        nonlocal pos
        if pos + k > len(tokens):
            raise AlistError("truncated alist")
        out = tokens[pos:pos + k]
        pos += k
        return out

    if len(tokens) < 4:
        raise AlistError("malformed header")
    n, m = take(2)
    max_col, max_row = take(2)
    if n < 0 or m < 0:
        raise AlistError("malformed header")
    col_deg = take(n)
    row_deg = take(m)
    if any(d > max_col or d < 0 for d in col_deg) or any(d > max_row or d < 0 for d in row_deg):
        raise AlistError("degree exceeds declared maximum")

    # padded files carry max-degree entries per line, filled with zeros
    body = len(tokens) - pos
    unpadded = sum(col_deg) + sum(row_deg)
    padded = n * max_col + m * max_row
    if body == unpadded:
        is_padded = False
    elif body == padded:
        is_padded = True
    else:
        raise AlistError(f"body has {body} tokens, expected {unpadded} (or {padded} padded)")

    def neighbour_lists(degs: list[int], width: int, bound: int) -> list[list[int]]:
        lists = []
        for d in degs:
            line = take(width if is_padded else d)
            line = [t for t in line if t != 0] if is_padded else line
            if len(line) != d:
                raise AlistError(f"degree mismatch: declared {d}, listed {len(line)}")
            if any(t < 1 or t > bound for t in line):
                raise AlistError(f"neighbour index out of range 1..{bound}")
            if len(set(line)) != len(line):
                raise AlistError("repeated neighbour index")
            lists.append([t - 1 for t in line])
        return lists

    col_lists = neighbour_lists(col_deg, max_col, m)
    row_lists = neighbour_lists(row_deg, max_row, n)

    dense = np.zeros((m, n), dtype=np.uint8)
    for i, row in enumerate(row_lists):
        dense[i, row] = 1
    from_cols = np.zeros((m, n), dtype=np.uint8)
    for j, col in enumerate(col_lists):
        from_cols[col, j] = 1
    if not np.array_equal(dense, from_cols):
        raise AlistError("column and row neighbour lists disagree")
    return BinaryMatrix.from_dense(dense)


def dump_alist(h: BinaryMatrix) -> str:
    """Serialise to unpadded alist text."""
    cw = h.col_weights()
    rw = h.row_weights()
    lines = [
        f"{h.cols} {h.rows}",
        f"{int(cw.max(initial=0))} {int(rw.max(initial=0))}",
        " ".join(str(int(d)) for d in cw),
        " ".join(str(int(d)) for d in rw),
    ]
    lines += [" ".join(str(int(i) + 1) for i in h.col_support(j)) for j in range(h.cols)]
    lines += [" ".join(str(int(j) + 1) for j in h.row_support(i)) for i in range(h.rows)]
    return "\n".join(lines) + "\n"


def load_qc(src: PathOrText) -> QcMatrix:
    """Parse the QC text format.

    First line ``rows cols gamma``; then one line per row of
    whitespace-separated cells, each ``-`` (zero) or comma-separated
    exponents. Lines starting with ``#`` are comments.
    """
    text = _read_text(src)
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise QcFormatError("empty QC file")
    try:
        rows, cols, gamma = (int(t) for t in lines[0].split())
    except ValueError:
        raise QcFormatError(f"bad header {lines[0]!r}; expected 'rows cols gamma'") from None
    if gamma < 1 or rows < 0 or cols < 0:
        raise QcFormatError("header values out of range")
    if len(lines) - 1 != rows:
        raise QcFormatError(f"expected {rows} rows, found {len(lines) - 1}")
    grid = []
    for r, ln in enumerate(lines[1:]):
        cells = ln.split()
        if len(cells) != cols:
            raise QcFormatError(f"row {r}: expected {cols} cells, found {len(cells)}")
        row = []
        for cell in cells:
            if cell == "-":
                row.append(QcPolynomial.zero(gamma))
                continue
            try:
                exps = [int(t) for t in cell.split(",")]
            except ValueError:
                raise QcFormatError(f"row {r}: bad cell {cell!r}") from None
            if any(e < 0 or e >= gamma for e in exps):
                raise QcFormatError(f"row {r}: exponent out of range in {cell!r}")
            row.append(QcPolynomial(exps, gamma))
        grid.append(tuple(row))
    return QcMatrix(tuple(grid), gamma)


def dump_qc(qc: QcMatrix) -> str:
    lines = [f"{qc.rows} {qc.cols} {qc.gamma}"]
    lines += [" ".join(p.token() for p in row) for row in qc.entries]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSS codes


@dataclass(frozen=True, eq=False)
class CssCode:
    """CSS code ``(H_X, H_Z)`` with the VV/CC column split.

    ``provenance`` records how the code was built. For products it holds
    ``kind`` (``"hp"`` or ``"lp"``), the binary factors ``h1``/``h2`` (lifted
    for LP), and for LP the QC factors ``w1``/``w2`` and ``gamma``.
    """

    h_x: BinaryMatrix
    h_z: BinaryMatrix
    n_vv: int
    n_cc: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.h_x.cols != self.h_z.cols:
            raise ValueError("H_X and H_Z must have the same number of columns")
        if self.n_vv + self.n_cc != self.h_x.cols:
            raise ValueError(f"n_vv + n_cc = {self.n_vv + self.n_cc} != n = {self.h_x.cols}")
        if not (self.h_x @ self.h_z.T).is_zero():
            raise CssViolation("H_X H_Z^T != 0")

    @property
    def n(self) -> int:
        return self.h_x.cols

    @property
    def kind(self) -> str | None:
        return self.provenance.get("kind")

    @property
    def k(self) -> int:
        return code_parameters(self)[1]

    def swapped(self) -> "CssCode":
        """Same code with the roles of H_X and H_Z exchanged (Z-error decoding)."""
        prov = dict(self.provenance)
        prov["swapped"] = not prov.get("swapped", False)
        return CssCode(self.h_z, self.h_x, self.n_vv, self.n_cc, prov)

    def fingerprint(self) -> str:
        """Stable SHA-256 over both matrices, used in run manifests."""
        h = hashlib.sha256()
        for m in (self.h_x, self.h_z):
            h.update(f"{m.rows}x{m.cols};".encode())
            h.update(m.packed.tobytes())
        return h.hexdigest()

    def describe(self) -> dict:
        n, k = code_parameters(self)
        out = {"n": n, "k": k, "n_vv": self.n_vv, "n_cc": self.n_cc, "m_x": self.h_x.rows, "m_z": self.h_z.rows}
        if self.kind:
            out["kind"] = self.kind
        if "gamma" in self.provenance:
            out["gamma"] = self.provenance["gamma"]
        return out


def stabilizer_space(code: CssCode) -> RowSpace:
    """Row space of H_X, cached on the code; residuals inside it are harmless."""
    space = code.__dict__.get("_rs_x")
    if space is None:
        space = RowSpace(code.h_x)
        object.__setattr__(code, "_rs_x", space)
    return space


def code_parameters(code: CssCode) -> tuple[int, int]:
    """``(n, k)`` with ``k = n - rank(H_X) - rank(H_Z)``."""
    cached = code.__dict__.get("_nk")
    if cached is None:
        n = code.n
        cached = (n, n - rank(code.h_x) - rank(code.h_z))
        object.__setattr__(code, "_nk", cached)
    return cached


def hypergraph_product(h1: BinaryMatrix, h2: BinaryMatrix) -> CssCode:
    """``H_X = [h1 (x) I_n2 | I_m1 (x) h2^T]``, ``H_Z = [I_n1 (x) h2 | h1^T (x) I_m2]``.

    X-check ``i*n2 + b`` pairs check ``i`` of h1 with variable ``b`` of h2;
    Z-check ``a*m2 + j`` pairs variable ``a`` of h1 with check ``j`` of h2.
    VV qubit ``a*n2 + b`` and CC qubit ``n1*n2 + i*m2 + j`` follow the same
    coordinates.
    """
    m1, n1 = h1.shape
    m2, n2 = h2.shape
    h_x = hstack([kron(h1, BinaryMatrix.identity(n2)), kron(BinaryMatrix.identity(m1), h2.T)])
    h_z = hstack([kron(BinaryMatrix.identity(n1), h2), kron(h1.T, BinaryMatrix.identity(m2))])
    return CssCode(h_x, h_z, n1 * n2, m1 * m2, {"kind": "hp", "h1": h1, "h2": h2})


def lifted_product(w1: QcMatrix, w2: QcMatrix) -> CssCode:
    """Lifted product of two monomial QC matrices over the same ring.

    ``W_X = [w1 (x) I | I (x) w2*]`` and ``W_Z = [I (x) w2 | w1* (x) I]``,
    where ``*`` is transpose plus circulant conjugation; both are lifted.
    """
    if w1.gamma != w2.gamma:
        raise ValueError(f"lifting sizes differ: {w1.gamma} vs {w2.gamma}")
    if not (w1.is_monomial() and w2.is_monomial()):
        raise ValueError("lifted_product needs monomial weight matrices")
    g = w1.gamma
    mb1, nb1 = w1.shape
    mb2, nb2 = w2.shape
    w_x = w1.kron_identity_right(nb2).hstack(w2.star().kron_identity_left(mb1))
    w_z = w2.kron_identity_left(nb1).hstack(w1.star().kron_identity_right(mb2))
    prov = {
        "kind": "lp",
        "gamma": g,
        "w1": w1,
        "w2": w2,
        "w_x": w_x,
        "w_z": w_z,
        "h1": lift(w1),
        "h2": lift(w2),
    }
    return CssCode(lift(w_x), lift(w_z), g * nb1 * nb2, g * mb1 * mb2, prov)


# ---------------------------------------------------------------------------
# small helpers for classical inputs


def has_four_cycle(h: BinaryMatrix) -> bool:
    """True iff two columns share two or more rows."""
    d = h.dense.astype(np.int64)
    overlap = d.T @ d
    np.fill_diagonal(overlap, 0)
    return bool((overlap >= 2).any())


def random_qc_ldpc(
    col_weight: int,
    row_weight: int,
    gamma: int,
    rng: np.random.Generator,
    girth6: bool = True,
    max_tries: int = 10_000,
) -> QcMatrix:
    """Random all-ones ``col_weight x row_weight`` base with monomial shifts.

    With ``girth6`` the shifts are redrawn until the lifted graph has no
    4-cycles, i.e. ``e[i,j] - e[i,l] + e[k,l] - e[k,j] != 0 (mod gamma)``
    for all ``i != k`` and ``j != l``.
    """
    for _ in range(max_tries):
        e = rng.integers(0, gamma, size=(col_weight, row_weight))
        if not girth6 or _qc_girth6(e, gamma):
            return QcMatrix.from_exponents(e.tolist(), gamma)
    raise RuntimeError(f"no 4-cycle-free ({col_weight},{row_weight}) QC code found at gamma={gamma}")


def _qc_girth6(e: np.ndarray, gamma: int) -> bool:
    diff = e[:, :, None] - e[:, None, :]  # diff[i, j, l] = e[i,j] - e[i,l]
    for i in range(e.shape[0]):
        for k in range(i + 1, e.shape[0]):
            d = (diff[i] - diff[k]) % gamma
            np.fill_diagonal(d, 1)
            if not d.all():
                return False
    return True
