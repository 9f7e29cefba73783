"""Exact dense linear algebra over F_p and Z, plus bounded F_p(x)-dependence.

F_p elimination runs on numpy ``int64`` arrays (primes below 2^31); integer
Smith normal form runs on Python ints so coefficient growth is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoundsTooSmall, PrimeMismatch, RingMismatch
from .rings import Fp, IntZ, Ring, poly_scale, poly_trim
from .series import LaurentTrunc

_MAX_P = 2**31


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix over ``IntZ`` or ``Fp``."""

    ring: Ring
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must be rows*cols")
        object.__setattr__(self, "entries", tuple(self.ring.normalize(v) for v in self.entries))

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence[int]], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        return cls(ring, len(rows), ncols, tuple(v for r in rows for v in r))

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c : (i + 1) * c]) for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_rows(), dtype=np.int64).reshape(self.rows, self.cols)

    def to_json(self) -> list[list[int]]:
        return self.to_rows()


# ---------------------------------------------------------------------------
# F_p


def rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p; returns ``(R, pivot_columns)``."""
    if p >= _MAX_P:
        raise ValueError("prime too large for int64 elimination")
    R = np.array(A, dtype=np.int64) % p
    m, n = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = pow(int(R[r, c]), -1, p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank_mod_p(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(rref_mod_p(A, p)[1])


def _kernel_from_rref(R: np.ndarray, pivots: list[int], ncols: int, p: int) -> list[tuple[int, ...]]:
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = int(-R[i, f]) % p
        basis.append(tuple(v))
    return basis


def kernel_basis_fp(M: Matrix) -> list[tuple[int, ...]]:
    """Basis of the right null space ``{v : M v = 0}`` over F_p."""
    if not isinstance(M.ring, Fp):
        raise RingMismatch(f"kernel_basis_fp needs an F_p matrix, got {M.ring}")
    p = M.ring.p
    if M.rows == 0:
        return [tuple(1 if i == j else 0 for i in range(M.cols)) for j in range(M.cols)]
    R, pivots = rref_mod_p(M.to_numpy(), p)
    return _kernel_from_rref(R, pivots, M.cols, p)


def rank_fp(M: Matrix) -> int:
    if not isinstance(M.ring, Fp):
        raise RingMismatch(f"rank_fp needs an F_p matrix, got {M.ring}")
    return rank_mod_p(M.to_numpy(), M.ring.p)


# ---------------------------------------------------------------------------
# Smith normal form over Z


@dataclass(frozen=True)
class SmithForm:
    invariant_factors: tuple[int, ...]
    rank: int

    def __post_init__(self):
        fs = self.invariant_factors
        if self.rank != len(fs) or any(f < 1 for f in fs):
            raise ValueError("invalid Smith form")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise ValueError("invariant factors must form a divisibility chain")

    def to_json(self) -> dict:
        return {"invariantFactors": list(self.invariant_factors), "rank": self.rank}


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _snf_diagonal(A: list[list[int]], U=None, V=None) -> list[int]:
    """Diagonalize ``A`` in place; apply the same row/column moves to U and V."""
    m = len(A)
    n = len(A[0]) if m else 0
    diag: list[int] = []

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        if V is not None:
            for row in V:
                row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row dst += q * row src
        a, b = A[dst], A[src]
        for j in range(n):
            if b[j]:
                a[j] += q * b[j]
        if U is not None:
            a, b = U[dst], U[src]
            for j in range(m):
                if b[j]:
                    a[j] += q * b[j]

    def add_col(dst, src, q):  # col dst += q * col src
        for row in A:
            if row[src]:
                row[dst] += q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
            if best and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    dirty = dirty or bool(A[i][t])
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    dirty = dirty or bool(A[t][j])
            if dirty:
                best = (abs(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(A[i][j] % piv for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            if U is not None:
                U[t] = [-v for v in U[t]]
        diag.append(A[t][t])
    return diag


def _bareiss_det(M: list[list[int]]) -> int:
    A = [row[:] for row in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1] if n else 1


def smith_normal_form(M: Matrix, verify: bool = False) -> SmithForm:
    """Invariant factors of an integer matrix.

    With ``verify=True`` the unimodular transforms are tracked and
    ``U M V = diag`` together with ``det U, det V = +-1`` is checked.
    """
    if not isinstance(M.ring, IntZ):
        raise RingMismatch(f"smith_normal_form needs an integer matrix, got {M.ring}")
    rows = M.to_rows()
    if verify:
        A = [r[:] for r in rows]
        U, V = _identity(M.rows), _identity(M.cols)
        diag = _snf_diagonal(A, U, V)
        prod = [[sum(U[i][k] * rows[k][j] for k in range(M.rows)) for j in range(M.cols)] for i in range(M.rows)]
        prod = [[sum(prod[i][k] * V[k][j] for k in range(M.cols)) for j in range(M.cols)] for i in range(M.rows)]
        for i in range(M.rows):
            for j in range(M.cols):
                want = diag[i] if i == j and i < len(diag) else 0
                if prod[i][j] != want:
                    raise AssertionError("U*M*V does not match the Smith diagonal")
        if abs(_bareiss_det(U)) != 1 or abs(_bareiss_det(V)) != 1:
            raise AssertionError("Smith transforms are not unimodular")
    else:
        # zero rows and columns never change the nonzero invariant factors
        live_cols = [j for j in range(M.cols) if any(r[j] for r in rows)]
        A = [[r[j] for j in live_cols] for r in rows if any(r[j] for j in live_cols)]
        diag = _snf_diagonal(A)
    return SmithForm(tuple(diag), len(diag))


# ---------------------------------------------------------------------------
# Bounded-degree dependence over F_p(x)


@dataclass(frozen=True)
class DependenceWitness:
    """Outcome of :func:`rational_dependence` at bounds ``(degree_bound, truncation)``.

    ``coeff_vectors`` holds the polynomials ``r_1..r_n`` when a relation was
    found and is ``None`` when absence is certified at these bounds.
    """

    p: int
    degree_bound: int
    truncation: int
    n: int
    coeff_vectors: tuple | None

    @property
    def found(self) -> bool:
        return self.coeff_vectors is not None

    @property
    def absent(self) -> bool:
        return self.coeff_vectors is None

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "degreeBound": self.degree_bound,
            "truncation": self.truncation,
            "n": self.n,
            "found": self.found,
            "coeffVectors": None if self.coeff_vectors is None else [list(r) for r in self.coeff_vectors],
        }

    def verify(self, g: Sequence[LaurentTrunc]) -> bool:
        """Re-check a witness by direct series arithmetic (always True for absence)."""
        if self.coeff_vectors is None:
            return True
        if len(g) != self.n or not any(self.coeff_vectors):
            return False
        if any(len(r) - 1 > self.degree_bound for r in self.coeff_vectors):
            return False
        return not relation_residual(g, self.coeff_vectors, self.truncation)


def relation_residual(g: Sequence[LaurentTrunc], r: Sequence[Sequence[int]], N: int) -> dict[int, int]:
    """Nonzero coefficients of ``sum r_i g_i`` below ``x^N`` (sparse convolution)."""
    p = g[0].p
    acc: dict[int, int] = {}
    for gi, ri in zip(g, r):
        for e, c in gi.terms().items():
            for k, a in enumerate(ri):
                if a and e + k < N:
                    acc[e + k] = (acc.get(e + k, 0) + a * c) % p
    return {e: c for e, c in acc.items() if c}


def rational_dependence(g: Sequence[LaurentTrunc], D: int, N: int) -> DependenceWitness:
    """Search for polynomials ``r_i`` of degree <= D with ``sum r_i g_i = 0 mod x^N``.

    The unknowns are the ``n*(D+1)`` coefficients of the ``r_i``; inputs are
    shifted by ``x^(-min valuation)`` first.  A ``None`` witness certifies
    that no relation exists at these bounds, nothing more.
    """
    g = list(g)
    if not g:
        raise ValueError("need at least one series")
    p = g[0].p
    if any(s.p != p for s in g):
        raise PrimeMismatch("all series must share the prime")
    if D < 0:
        raise ValueError("degree bound must be non-negative")
    vals = [s.low_exp for s in g if not s.is_zero()]
    vmin = min(vals) if vals else 0
    spread = max(vals) - vmin if vals else 0
    if N <= D + spread:
        raise BoundsTooSmall(f"N={N} must exceed D + exponent spread = {D + spread}")
    short = [s.order for s in g if s.order < N]
    if short:
        raise BoundsTooSmall(f"inputs known only below x^{min(short)}, asked for x^{N}")
    n, width = len(g), D + 1
    rows = N - vmin
    A = np.zeros((rows, n * width), dtype=np.int64)
    for i, s in enumerate(g):
        dense = np.array(s.dense(vmin - D, N), dtype=np.int64)  # exponents vmin-D .. N-1
        for k in range(width):
            # row q (exponent vmin+q) needs s at vmin+q-k, i.e. dense[q + D - k]
            A[:, i * width + k] = dense[D - k : D - k + rows]
    R, pivots = rref_mod_p(A, p)
    kernel = _kernel_from_rref(R, pivots, n * width, p)
    if not kernel:
        return DependenceWitness(p, D, N, n, None)
    v = kernel[0]
    polys = [poly_trim(v[i * width : (i + 1) * width], p) for i in range(n)]
    lead = next(r for r in polys if r)[-1]
    inv = pow(lead, -1, p)
    polys = [poly_scale(r, inv, p) for r in polys]
    return DependenceWitness(p, D, N, n, tuple(polys))
