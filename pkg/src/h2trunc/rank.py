"""Observed rank of bivariate series and explicit finite-rank decompositions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankMismatch, RingMismatch, UnsupportedRing
from .linalg import Matrix, rank_mod_p, rref_mod_p, smith_normal_form
from .rings import Fp, IntZ, Ring
from .series import BiSeries, TruncSeries


@dataclass(frozen=True)
class RankReport:
    ring: Ring
    nx: int
    ny: int
    rank: int
    invariant_factors: tuple[int, ...] | None
    stabilized: bool

    def to_json(self) -> dict:
        out = {
            "ring": str(self.ring),
            "Nx": self.nx,
            "Ny": self.ny,
            "rank": self.rank,
            "stabilized": self.stabilized,
        }
        if self.invariant_factors is not None:
            out["factors"] = [str(f) if f > 2**53 else f for f in self.invariant_factors]
        return out


def coefficient_matrix(F: BiSeries) -> Matrix:
    """``Ny x Nx`` matrix whose row j holds the x-coefficients of ``f_j``."""
    return Matrix(F.ring, F.ny, F.nx, tuple(c for row in F.rows for c in row.coeffs))


def _fp_array(F: BiSeries) -> np.ndarray:
    return np.array([row.coeffs for row in F.rows], dtype=np.int64).reshape(F.ny, F.nx)


def observed_rank(F: BiSeries) -> RankReport:
    """Rank of the coefficient matrix at this truncation.

    Over F_p this is the field rank; over Z it is the lattice rank together
    with the full invariant-factor list.  ``stabilized`` compares against
    the same series with its last y-row dropped.
    """
    if isinstance(F.ring, Fp):
        A = _fp_array(F)
        r = rank_mod_p(A, F.ring.p)
        prev = rank_mod_p(A[:-1], F.ring.p) if F.ny > 1 else 0
        return RankReport(F.ring, F.nx, F.ny, r, None, r == prev)
    if isinstance(F.ring, IntZ):
        M = coefficient_matrix(F)
        snf = smith_normal_form(M)
        if F.ny > 1:
            head = Matrix(IntZ(), F.ny - 1, F.nx, M.entries[: (F.ny - 1) * F.nx])
            prev = smith_normal_form(head).rank
        else:
            prev = 0
        return RankReport(F.ring, F.nx, F.ny, snf.rank, snf.invariant_factors, snf.rank == prev)
    raise UnsupportedRing(f"observed_rank supports F_p and Z, not {F.ring}")


def finite_rank_decomposition(F: BiSeries, r: int) -> list[tuple[TruncSeries, TruncSeries]]:
    """Pairs ``(a_s(x), b_s(y))`` with ``F = sum_s a_s(x) b_s(y)`` at truncation.

    The ``a_s`` are the nonzero rows of the reduced row echelon form of the
    coefficient matrix, the ``b_s`` the matching coordinate columns read off
    at the pivot positions.
    """
    if not isinstance(F.ring, Fp):
        raise RingMismatch(f"finite_rank_decomposition works over F_p, got {F.ring}")
    p = F.ring.p
    A = _fp_array(F)
    R, pivots = rref_mod_p(A, p)
    if len(pivots) != r:
        raise RankMismatch(f"observed rank {len(pivots)} but {r} was expected")
    pairs = []
    for s, col in enumerate(pivots):
        a = TruncSeries(F.ring, F.nx, tuple(int(v) for v in R[s]))
        b = TruncSeries(F.ring, F.ny, tuple(int(v) for v in A[:, col]))
        pairs.append((a, b))
    return pairs


def recompose(pairs: list[tuple[TruncSeries, TruncSeries]], ring: Ring, nx: int, ny: int) -> BiSeries:
    out = BiSeries.zero(ring, nx, ny)
    for a, b in pairs:
        out = out + BiSeries.outer(a, b)
    return out
