"""n,d-sieves on series in y whose coefficients are Laurent series in x.

A series ``F = sum f_j y^j`` has an n,d-sieve at offset m when the rows
``f_{m+ld+i}`` vanish for ``0 <= l <= n``, ``1 <= i <= d-1`` and the pillar
rows ``f_{m+d}, ..., f_{m+nd}`` are linearly independent over F_p(x).
Independence is only ever certified at explicit bounds ``(D, N)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BoundsTooSmall, ConstantRatio, IndexOutOfRange, PrecViolated, RationalityViolated
from .linalg import DependenceWitness, _kernel_from_rref, rational_dependence, rref_mod_p
from .rings import (
    Fp,
    RationalFunction,
    poly_mul,
    poly_pow,
    poly_trim,
    ratfunc_normalize,
)
from .series import BiSeries, LaurentTrunc, TruncSeries, mul_trunc


@dataclass(frozen=True)
class SieveCertificate:
    p: int
    n: int
    d: int
    m: int
    pillar_indices: tuple[int, ...]
    zero_windows: tuple[tuple[int, int], ...]  # inclusive index ranges
    independence: DependenceWitness
    m_max: int
    source: dict | None = None

    @classmethod
    def layout(cls, m: int, n: int, d: int) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        pillars = tuple(m + l * d for l in range(1, n + 1))
        windows = tuple((m + l * d + 1, m + l * d + d - 1) for l in range(n + 1)) if d > 1 else ()
        return pillars, windows

    def shifted(self, k: int) -> "SieveCertificate":
        pillars, windows = self.layout(self.m + k, self.n, self.d)
        return replace(self, m=self.m + k, pillar_indices=pillars, zero_windows=windows)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "pillarIndices": list(self.pillar_indices),
            "zeroWindows": [list(w) for w in self.zero_windows],
            "independence": self.independence.to_json(),
            "searchedM": [0, self.m_max],
            "source": self.source,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SieveCertificate":
        ind = obj["independence"]
        witness = DependenceWitness(
            ind["p"],
            ind["degreeBound"],
            ind["truncation"],
            ind["n"],
            None if ind["coeffVectors"] is None else tuple(tuple(r) for r in ind["coeffVectors"]),
        )
        return cls(
            p=obj["p"],
            n=obj["n"],
            d=obj["d"],
            m=obj["m"],
            pillar_indices=tuple(obj["pillarIndices"]),
            zero_windows=tuple(tuple(w) for w in obj["zeroWindows"]),
            independence=witness,
            m_max=obj["searchedM"][1],
            source=obj.get("source"),
        )


def _rows_as_laurent(F: BiSeries, idx) -> list[LaurentTrunc]:
    return [LaurentTrunc.from_series(F.rows[j]) for j in idx]


def default_m_max(ny: int, n: int, d: int) -> int:
    return ny - n * d - d - 1


def find_sieve(
    F: BiSeries,
    n: int,
    d: int,
    m_max: int | None = None,
    D: int = 4,
    N: int | None = None,
    source: dict | None = None,
) -> SieveCertificate | None:
    """First offset ``m`` in ``0..m_max`` carrying an n,d-sieve, or ``None``.

    Window checks run first; only offsets whose windows vanish pay for a
    ``rational_dependence`` call on the pillars at bounds ``(D, N)`` (``N``
    defaults to the x-truncation).
    """
    if not isinstance(F.ring, Fp):
        raise ValueError(f"sieves are searched over F_p, got {F.ring}")
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    if m_max is None:
        m_max = default_m_max(F.ny, n, d)
    if m_max < 0 or F.ny <= m_max + n * d + d:
        raise BoundsTooSmall(f"Ny={F.ny} must exceed mMax + n*d + d = {m_max + n * d + d}")
    N = F.nx if N is None else N
    nonzero = [not row.is_zero() for row in F.rows]
    for m in range(m_max + 1):
        pillars, windows = SieveCertificate.layout(m, n, d)
        if any(nonzero[j] for lo, hi in windows for j in range(lo, hi + 1)):
            continue
        if not all(nonzero[j] for j in pillars):
            continue
        try:
            witness = rational_dependence(_rows_as_laurent(F, pillars), D, N)
        except BoundsTooSmall:
            continue
        if witness.absent:
            return SieveCertificate(F.ring.p, n, d, m, pillars, windows, witness, m_max, source)
    return None


def verify_sieve(F: BiSeries, cert: SieveCertificate) -> bool:
    """Re-check windows and pillar independence at the certificate's own bounds."""
    last = cert.m + cert.n * cert.d + cert.d - 1
    if last >= F.ny or max(cert.pillar_indices, default=0) >= F.ny:
        raise IndexOutOfRange(f"certificate reaches y^{last} but Ny = {F.ny}")
    if not isinstance(F.ring, Fp) or F.ring.p != cert.p:
        return False
    pillars, windows = SieveCertificate.layout(cert.m, cert.n, cert.d)
    if pillars != tuple(cert.pillar_indices) or windows != tuple(tuple(w) for w in cert.zero_windows):
        return False
    if any(not F.rows[j].is_zero() for lo, hi in windows for j in range(lo, hi + 1)):
        return False
    ind = cert.independence
    try:
        witness = rational_dependence(_rows_as_laurent(F, pillars), ind.degree_bound, ind.truncation)
    except BoundsTooSmall:
        return False
    return witness.absent


# ---------------------------------------------------------------------------
# Powers of U/V mod p


@dataclass(frozen=True)
class PowersResult:
    independent: bool
    relation: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.independent

    def to_json(self) -> dict:
        return {"independent": self.independent, "relation": None if self.relation is None else list(self.relation)}


def _fp_powers_relation(u: tuple, v: tuple, p: int, n: int) -> tuple[int, ...] | None:
    """Relation ``sum_j c_j u^(n-j) v^j = 0`` over F_p, normalized, or ``None``."""
    vecs = [poly_mul(poly_pow(u, n - j, p), poly_pow(v, j, p), p) for j in range(n + 1)]
    width = max((len(w) for w in vecs), default=0)
    if width == 0:
        return (1,) + (0,) * n
    A = np.zeros((width, n + 1), dtype=np.int64)
    for j, w in enumerate(vecs):
        A[: len(w), j] = w
    R, pivots = rref_mod_p(A, p)
    kernel = _kernel_from_rref(R, pivots, n + 1, p)
    if not kernel:
        return None
    c = kernel[0]
    lead = next(a for a in c if a)
    inv = pow(lead, -1, p)
    return tuple(a * inv % p for a in c)


def _is_constant_ratio(U: tuple, V: tuple) -> bool:
    n = max(len(U), len(V))
    U = tuple(U) + (0,) * (n - len(U))
    V = tuple(V) + (0,) * (n - len(V))
    return all(U[i] * V[j] == U[j] * V[i] for i in range(n) for j in range(n))


def powers_independent(U, V, p: int, n: int, check_rationality: bool = True) -> PowersResult:
    """Are ``U^j V^(n-j) mod p`` (``0 <= j <= n``) linearly independent over F_p?

    ``U`` and ``V`` are integer polynomials (coefficient sequences, low degree
    first).  Independence at ``n`` means ``1, U/V, ..., (U/V)^n`` are
    independent.  With ``check_rationality`` the hypotheses are enforced:
    ``U/V`` must not be constant and ``V(0)`` must be ``+-1``.
    """
    Fp(p)
    U, V = tuple(U), tuple(V)
    if check_rationality:
        if _is_constant_ratio(U, V):
            raise ConstantRatio("U/V is a constant")
        if not V or V[0] not in (1, -1):
            raise RationalityViolated("V(0) must be +-1 for U/V to be a rational power series")
    u, v = poly_trim(U, p), poly_trim(V, p)
    if not v:
        raise PrecViolated(f"V vanishes mod {p}")
    rel = _fp_powers_relation(u, v, p, n)
    return PowersResult(rel is None, rel)


# ---------------------------------------------------------------------------
# The sieve-vs-rank experiment


@dataclass
class SieveExperimentTrace:
    alpha: RationalFunction
    beta: RationalFunction
    v_basis: list[LaurentTrunc]
    lambdas: list[RationalFunction]
    outcome: str
    params: dict = field(default_factory=dict)
    certificate: SieveCertificate | None = None

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "Vbasis": [s.to_json() for s in self.v_basis],
            "lambdas": [lam.to_json() for lam in self.lambdas],
            "outcome": self.outcome,
            "params": self.params,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
        }


def _lacunary_row(rng: random.Random, p: int, order: int) -> TruncSeries:
    terms = {}
    e = rng.randrange(0, 3)
    while e < order:
        terms[e] = rng.randrange(1, p)
        e += rng.randint(1, 3) + e // 3
    return TruncSeries.from_terms(Fp(p), order, terms)


def _random_unit_ratfunc(rng: random.Random, p: int) -> RationalFunction:
    num = [rng.randrange(p) for _ in range(3)]
    den = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(2)]
    return ratfunc_normalize(num, den, p)


def _poly_series(coeffs: tuple, ring: Fp, order: int) -> TruncSeries:
    return TruncSeries.from_terms(ring, order, dict(enumerate(coeffs)))


def sieve_vs_rank_experiment(
    alpha: RationalFunction,
    beta: RationalFunction,
    d: int,
    n: int,
    rank_h: int,
    rank_g: int,
    seed: int,
    nx: int = 64,
    ny: int = 64,
    D: int = 4,
) -> SieveExperimentTrace:
    """Build ``F = (beta - alpha*y) H + G`` with low-rank H, G and search for a sieve.

    H's y-coefficients are random F_p-combinations of ``rank_h`` fixed
    lacunary rows; G's are random F_p(x)-combinations of ``rank_g`` rows.
    The whole F is scaled by the denominators of alpha and beta (a unit of
    F_p(x), so neither the ranks nor sieve-ness change) to keep every row a
    power series.  Every offset ``m`` is scanned.
    """
    p = alpha.p
    if beta.p != p:
        raise PrecViolated("alpha and beta live over different primes")
    if rank_h > d - 1 or rank_g > n - 1 or rank_h < 0 or rank_g < 0:
        raise PrecViolated("need 0 <= rankH <= d-1 and 0 <= rankG <= n-1")
    if alpha.is_zero() or beta.is_zero():
        raise PrecViolated("alpha and beta must be nonzero")
    ratio = alpha / beta
    exponent = max(n, d - 1)
    if _fp_powers_relation(ratio.num, ratio.den, p, exponent) is not None:
        raise PrecViolated(f"powers of alpha/beta are dependent over F_{p} up to exponent {exponent}")

    ring = Fp(p)
    rng = random.Random(seed)
    h_basis = [_lacunary_row(rng, p, nx) for _ in range(rank_h)]
    g_basis = [_lacunary_row(rng, p, nx) for _ in range(rank_g)]
    zero = TruncSeries.zero(ring, nx)

    h_rows = []
    for _ in range(ny):
        row = zero
        for base in h_basis:
            row = row + base.scale(rng.randrange(p))
        h_rows.append(row)
    g_rows = []
    for _ in range(ny):
        row = zero
        for base in g_basis:
            c = LaurentTrunc.from_ratfunc(_random_unit_ratfunc(rng, p), nx)
            row = row + mul_trunc(base, TruncSeries.from_terms(ring, nx, c.terms()))
        g_rows.append(row)

    a_poly = poly_mul(alpha.num, beta.den, p)
    b_poly = poly_mul(beta.num, alpha.den, p)
    a_ser = _poly_series(a_poly, ring, nx)
    b_ser = _poly_series(b_poly, ring, nx)
    f_rows = []
    for j in range(ny):
        row = mul_trunc(b_ser, h_rows[j]) + g_rows[j]
        if j:
            row = row - mul_trunc(a_ser, h_rows[j - 1])
        f_rows.append(row)
    F = BiSeries(ring, nx, ny, tuple(f_rows))

    cert = find_sieve(F, n, d, D=D)

    # the step of the argument that needs alpha/beta: each d consecutive H-rows
    # satisfy an F_p relation b, and lambda = sum b_i (alpha/beta)^i stays nonzero
    lambdas = []
    for l in range(n + 1):
        block = h_rows[l * d : l * d + d]
        A = np.array([r.coeffs for r in block], dtype=np.int64).T
        R, pivots = rref_mod_p(A, p)
        b = _kernel_from_rref(R, pivots, len(block), p)[0]
        lam = RationalFunction.const(0, p)
        for i, bi in enumerate(b):
            if bi:
                lam = lam + RationalFunction.const(bi, p) * ratio**i
        if lam.is_zero():
            raise AssertionError("lambda vanished although the powers of alpha/beta are independent")
        lambdas.append(lam)

    params = {
        "p": p,
        "d": d,
        "n": n,
        "rankH": rank_h,
        "rankG": rank_g,
        "seed": seed,
        "nx": nx,
        "ny": ny,
        "degreeBound": D,
        "searchedM": [0, default_m_max(ny, n, d)],
        "observedRankH": _fp_rank(h_rows, p),
    }
    outcome = "no-sieve-confirmed" if cert is None else "contradiction-found"
    return SieveExperimentTrace(
        alpha, beta, [LaurentTrunc.from_series(s) for s in g_basis], lambdas, outcome, params, cert
    )


def _fp_rank(rows: list[TruncSeries], p: int) -> int:
    from .linalg import rank_mod_p

    return rank_mod_p(np.array([r.coeffs for r in rows], dtype=np.int64), p)


def explicit_antisym_mod_p(p: int, nx: int, ny: int) -> BiSeries:
    """``F(x,y) - F(y,x)`` of the explicit series, reduced mod p (square window)."""
    from .construction import build_F
    from .series import antisymmetrize, reduce_mod

    return reduce_mod(antisymmetrize(build_F(nx, ny)), Fp(p))


def expected_sieve_offset(p: int, d: int) -> int:
    """The y-exponent ``3^d - (p+1) d`` where the explicit sieve starts."""
    return 3**d - (p + 1) * d


def pillar_families(F: BiSeries, cert: SieveCertificate) -> list[dict]:
    """Name the generator slice each pillar row equals (up to sign), if any.

    Compares every pillar row with ``g_k`` and ``h_k`` mod p for ``k < p``.
    """
    from .construction import build_generators

    p, nx = cert.p, F.nx
    out = []
    for j in cert.pillar_indices:
        row = F.rows[j]
        match = None
        for kind in ("g", "h"):
            for k in range(p):
                gen = build_generators(kind, k, nx, p)
                if gen.is_zero():
                    continue
                if row == gen or row == -gen:
                    match = {"family": kind, "k": k, "sign": 1 if row == gen else -1}
                    break
            if match:
                break
        out.append({"row": j, "match": match})
    return out


ORDERING_UNSAFE_D = (2, 3)  # the exponent chain used to place the sieve breaks for these d
