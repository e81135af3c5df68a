"""Depolarizing noise in binary symplectic form and the CSS syndrome map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CssCode

__all__ = ["PauliError", "Syndrome", "sample_depolarizing", "syndrome"]


@dataclass(frozen=True, eq=False)
class PauliError:
    """``e = [e_x | e_z]``; a Y on qubit i sets both bits."""

    e_x: np.ndarray
    e_z: np.ndarray

    def __post_init__(self) -> None:
        if self.e_x.shape != self.e_z.shape or self.e_x.ndim != 1:
            raise ValueError("e_x and e_z must be 1-D vectors of equal length")

    @property
    def n(self) -> int:
        return int(self.e_x.shape[0])

    @classmethod
    def from_x(cls, e_x: np.ndarray) -> "PauliError":
        e_x = np.asarray(e_x, dtype=np.uint8)
        return cls(e_x, np.zeros_like(e_x))

    def weight(self) -> int:
        return int(np.count_nonzero(self.e_x | self.e_z))

    def __xor__(self, other: "PauliError") -> "PauliError":
        return PauliError(self.e_x ^ other.e_x, self.e_z ^ other.e_z)


@dataclass(frozen=True, eq=False)
class Syndrome:
    """``sigma_x = H_Z e_x`` (length m_Z) and ``sigma_z = H_X e_z`` (length m_X)."""

    sigma_x: np.ndarray
    sigma_z: np.ndarray


def sample_depolarizing(n: int, p: float, rng: np.random.Generator) -> PauliError:
    """I.i.d. depolarizing error: each of X, Y, Z with probability p/3.

    One uniform draw per qubit: ``[0, p/3)`` is X, ``[p/3, 2p/3)`` is Y,
    ``[2p/3, p)`` is Z.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    u = rng.random(n)
    e_x = (u < 2 * p / 3).astype(np.uint8)
    e_z = ((u >= p / 3) & (u < p)).astype(np.uint8)
    return PauliError(e_x, e_z)


def syndrome(code: CssCode, err: PauliError) -> Syndrome:
    if err.n != code.n:
        raise ValueError(f"error length {err.n} != code length {code.n}")
    return Syndrome(code.h_z.mul_vec(err.e_x), code.h_x.mul_vec(err.e_z))
