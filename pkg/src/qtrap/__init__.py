"""Quantum LDPC product codes and trapping-set-aware iterative decoders."""

from .codes import (
    CssCode,
    QcMatrix,
    QcPolynomial,
    code_parameters,
    hypergraph_product,
    lift,
    lifted_product,
    load_alist,
    load_qc,
)
from .gf2 import BinaryMatrix, RowSpace, kron, rank

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix",
    "CssCode",
    "QcMatrix",
    "QcPolynomial",
    "RowSpace",
    "code_parameters",
    "hypergraph_product",
    "kron",
    "lift",
    "lifted_product",
    "load_alist",
    "load_qc",
    "rank",
]
