"""Linear algebra over GF(2).

Matrices are stored bit-packed row by row (``numpy.packbits`` layout) so that
row reduction works on whole words at a time. Dense ``uint8`` views and
sparse row/column supports are derived lazily and cached.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
import numpy.typing as npt

__all__ = [
    "BinaryMatrix",
    "RowSpace",
    "kron",
    "rank",
    "in_row_space",
    "row_space",
    "hstack",
    "vstack",
]


class BinaryMatrix:
    """Immutable binary matrix with packed-row storage.

    Build one with :meth:`from_dense`, :meth:`from_supports`,
    :meth:`zeros` or :meth:`identity`.
    """

    def __init__(self, packed: np.ndarray, rows: int, cols: int) -> None:
        packed = np.asarray(packed, dtype=np.uint8)
        if packed.shape != (rows, (cols + 7) // 8):
            raise ValueError(f"packed shape {packed.shape} does not match {rows}x{cols}")
        if cols % 8 and rows:
            # bits past the last column must be clear
            tail_mask = np.uint8(0xFF >> (cols % 8))
            if np.any(packed[:, -1] & tail_mask):
                raise ValueError("set bits beyond declared column count")
        packed.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self._packed = packed

    # construction -----------------------------------------------------------

    @classmethod
    def from_dense(cls, a: npt.ArrayLike) -> "BinaryMatrix":
        arr = np.asarray(a)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        bits = arr.astype(np.uint8)
        packed = np.packbits(bits, axis=1).reshape(bits.shape[0], (bits.shape[1] + 7) // 8)
        m = cls(packed, *bits.shape)
        m.__dict__["dense"] = _readonly(bits)
        return m

    @classmethod
    def from_supports(cls, supports: Sequence[Iterable[int]], cols: int) -> "BinaryMatrix":
        """Build from per-row lists of set column indices."""
        dense = np.zeros((len(supports), cols), dtype=np.uint8)
        for i, row in enumerate(supports):
            idx = np.fromiter(row, dtype=np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= cols):
                raise ValueError(f"row {i}: column index out of range for {cols} columns")
            dense[i, idx] = 1
        return cls.from_dense(dense)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls.from_dense(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    # views ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @cached_property
    def dense(self) -> np.ndarray:
        bits = np.unpackbits(self._packed, axis=1, count=self.cols) if self.rows else np.zeros((0, self.cols), np.uint8)
        return _readonly(bits.astype(np.uint8))

    @cached_property
    def _row_supports(self) -> tuple[np.ndarray, ...]:
        return tuple(_readonly(np.flatnonzero(r)) for r in self.dense)

    @cached_property
    def _col_supports(self) -> tuple[np.ndarray, ...]:
        return tuple(_readonly(np.flatnonzero(c)) for c in self.dense.T)

    def row(self, i: int) -> np.ndarray:
        return self.dense[i]

    def col(self, j: int) -> np.ndarray:
        return self.dense[:, j]

    def row_support(self, i: int) -> np.ndarray:
        return self._row_supports[i]

    def col_support(self, j: int) -> np.ndarray:
        return self._col_supports[j]

    def row_weights(self) -> np.ndarray:
        return self.dense.sum(axis=1, dtype=np.int64)

    def col_weights(self) -> np.ndarray:
        return self.dense.sum(axis=0, dtype=np.int64)

    def nonzero(self) -> Iterator[tuple[int, int]]:
        """Set bits in row-major order."""
        for i, sup in enumerate(self._row_supports):
            for j in sup:
                yield i, int(j)

    @property
    def nnz(self) -> int:
        return int(self.dense.sum(dtype=np.int64))

    # algebra ----------------------------------------------------------------

    @property
    def T(self) -> "BinaryMatrix":
        return self.transpose()

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix.from_dense(self.dense.T)

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        prod = self.dense.astype(np.int64) @ other.dense.astype(np.int64)
        return BinaryMatrix.from_dense(prod & 1)

    def __add__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} + {other.shape}")
        return BinaryMatrix(self._packed ^ other._packed, self.rows, self.cols)

    def mul_vec(self, v: npt.ArrayLike) -> np.ndarray:
        """Return ``self @ v`` over GF(2) for a bit vector ``v``."""
        v = np.asarray(v, dtype=np.int64)
        if v.shape[-1] != self.cols:
            raise ValueError(f"vector length {v.shape[-1]} != {self.cols} columns")
        return ((self.dense.astype(np.int64) @ v.T).T & 1).astype(np.uint8)

    def is_zero(self) -> bool:
        return not self._packed.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._packed, other._packed)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._packed.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def kron(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Kronecker product; entry ``(i*b.rows+k, j*b.cols+l) = a[i,j]*b[k,l]``."""
    return BinaryMatrix.from_dense(np.kron(a.dense, b.dense))


def hstack(blocks: Sequence[BinaryMatrix]) -> BinaryMatrix:
    return BinaryMatrix.from_dense(np.hstack([b.dense for b in blocks]))


def vstack(blocks: Sequence[BinaryMatrix]) -> BinaryMatrix:
    return BinaryMatrix.from_dense(np.vstack([b.dense for b in blocks]))


def _rref(packed: np.ndarray, cols: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form on packed rows.

    Pivot columns are scanned left to right and the pivot row is the first
    remaining row with that bit set, so the result is deterministic.
    """
    work = packed.copy()
    pivots: list[int] = []
    r = 0
    nrows = work.shape[0]
    for c in range(cols):
        if r == nrows:
            break
        byte, bit = divmod(c, 8)
        mask = np.uint8(0x80 >> bit)
        hits = np.flatnonzero(work[r:, byte] & mask)
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            work[[r, p]] = work[[p, r]]
        col_hits = np.flatnonzero(work[:, byte] & mask)
        col_hits = col_hits[col_hits != r]
        if col_hits.size:
            work[col_hits] ^= work[r]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rank(m: BinaryMatrix) -> int:
    """Rank over GF(2)."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref(m.packed, m.cols)[1])


class RowSpace:
    """Row space of a binary matrix with constant-cost membership queries.

    Membership uses the orthogonal complement: ``v`` lies in the row space
    iff it is orthogonal to every vector in the kernel of the matrix.
    """

    def __init__(self, m: BinaryMatrix) -> None:
        self.cols = m.cols
        if m.rows and m.cols:
            packed, pivots = _rref(m.packed, m.cols)
        else:
            packed, pivots = np.zeros((0, (m.cols + 7) // 8), np.uint8), []
        self.basis = BinaryMatrix(packed, len(pivots), m.cols)
        self.pivots = tuple(pivots)
        self.rank = len(pivots)

    @cached_property
    def dual(self) -> BinaryMatrix:
        """Basis of the kernel, one vector per non-pivot column."""
        n = self.cols
        pivot_set = set(self.pivots)
        free = [c for c in range(n) if c not in pivot_set]
        ker = np.zeros((len(free), n), dtype=np.uint8)
        basis = self.basis.dense
        pivots = list(self.pivots)
        for k, f in enumerate(free):
            ker[k, f] = 1
            # row r of the RREF reads x[pivot_r] = sum_f basis[r, f] x[f]
            ker[k, pivots] = basis[:, f]
        return BinaryMatrix.from_dense(ker)

    @cached_property
    def _dual_columns(self) -> np.ndarray:
        # column c of the kernel basis, bit-packed, so a query XORs |supp(v)| rows
        return np.packbits(self.dual.dense.T, axis=1)

    def contains(self, v: npt.ArrayLike) -> bool:
        v = np.asarray(v).ravel()
        if v.shape[0] != self.cols:
            raise ValueError(f"vector length {v.shape[0]} != {self.cols}")
        if self.dual.rows == 0:
            return True
        idx = np.flatnonzero(v & 1)
        if idx.size == 0:
            return True
        return not np.bitwise_xor.reduce(self._dual_columns[idx], axis=0).any()

    def contains_many(self, vs: npt.ArrayLike) -> np.ndarray:
        """Vectorised :meth:`contains` over the rows of ``vs``."""
        vs = np.atleast_2d(np.asarray(vs, dtype=np.int64))
        if vs.shape[1] != self.cols:
            raise ValueError(f"vector length {vs.shape[1]} != {self.cols}")
        if self.dual.rows == 0:
            return np.ones(vs.shape[0], dtype=bool)
        return ~((vs @ self.dual.dense.T.astype(np.int64)) & 1).any(axis=1)

    def __contains__(self, v: npt.ArrayLike) -> bool:
        return self.contains(v)


def row_space(m: BinaryMatrix) -> RowSpace:
    return RowSpace(m)


def in_row_space(space: RowSpace, v: npt.ArrayLike) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows spanning ``space``."""
    return space.contains(v)
