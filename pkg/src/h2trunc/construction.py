"""The explicit lacunary series and the families built from it.

The two-variable series is

    F(x, y) = sum_{i>=1} sum_{j>=1} sum_{k=0}^{min(i,j)} k! x^s(i,k) y^t(j,k)

with ``s(i,k) = 3^i + (k+1) i`` and ``t(i,k) = 3^i - (k+1) i``.  Mod p only
the slices ``k < p`` survive, which is what makes F finite-rank mod every
prime, while its antisymmetrization keeps a sieve at ``y``-exponents
``t(d, k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd

from .errors import BadIndex, NotDivisible
from .linalg import Matrix, smith_normal_form
from .rings import Fp, IntZ, ZmodPE
from .series import BiSeries, LaurentTrunc, TruncSeries, reduce_mod


@dataclass(frozen=True)
class ExpPair:
    i: int
    k: int
    s: int
    t: int


def exponents(i: int, k: int) -> ExpPair:
    if i < 1 or k < 0:
        raise BadIndex(f"need i >= 1 and k >= 0, got i={i}, k={k}")
    return ExpPair(i, k, 3**i + (k + 1) * i, 3**i - (k + 1) * i)


def _visible_i(bound: int) -> range:
    """Indices i >= 1 whose smallest exponent 3^i - i(i+1) can fall below ``bound``."""
    i = 1
    while 3**i - i * (i + 1) < bound:
        i += 1
    return range(1, i)


def explicit_sources(nx: int, ny: int) -> dict[tuple[int, int], list[tuple[int, int, int]]]:
    """All ``(i, j, k)`` contributing to each visible monomial ``x^s y^t``."""
    out: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for i in _visible_i(nx):
        for j in _visible_i(ny):
            for k in range(min(i, j) + 1):
                s = exponents(i, k).s
                t = exponents(j, k).t
                if s < nx and t < ny:
                    out.setdefault((s, t), []).append((i, j, k))
    return out


def collision_audit(nx: int, ny: int) -> list[dict]:
    """Monomials hit by more than one ``(i, j, k)`` inside the window."""
    return [
        {"x": s, "y": t, "sources": [list(src) for src in srcs]}
        for (s, t), srcs in sorted(explicit_sources(nx, ny).items())
        if len(srcs) > 1
    ]


def build_F(nx: int, ny: int) -> BiSeries:
    """The explicit series over Z truncated at ``x^nx``, ``y^ny`` (collisions summed)."""
    if nx < 4 or ny < 4:
        raise BadIndex("truncations must be at least 4")
    terms = {
        key: sum(factorial(k) for (_, _, k) in srcs) for key, srcs in explicit_sources(nx, ny).items()
    }
    return BiSeries.from_terms(IntZ(), nx, ny, terms)


def _generator_terms(kind: str, k: int, N: int) -> dict[int, int]:
    if k < 0:
        raise BadIndex("k must be non-negative")
    out: dict[int, int] = {}
    for i in range(max(k, 1), 64):
        pair = exponents(i, k)
        e = pair.s if kind == "g" else pair.t
        if 3**i - i * (i + 1) >= N:
            break
        if 0 <= e < N:
            c = 1 if kind == "h-tilde" else factorial(k)
            out[e] = out.get(e, 0) + c
    return out


def build_generators(kind: str, k: int, N: int, p: int | None = None) -> TruncSeries:
    """One slice of F.

    ``g``: ``k! * sum_{i >= max(k,1)} x^s(i,k)``; ``h``: the same with
    ``t(i,k)``; ``h-tilde``: ``sum_{j >= max(k,1)} y^t(j,k)`` without the
    factorial, so that ``F = sum_k g_k(x) * h-tilde_k(y)``.  Reduced mod
    ``p`` when given.
    """
    if kind not in ("g", "h", "h-tilde"):
        raise ValueError(f"unknown generator kind {kind!r}")
    if N < 4:
        raise BadIndex("truncation must be at least 4")
    series = TruncSeries.from_terms(IntZ(), N, _generator_terms(kind, k, N))
    return reduce_mod(series, Fp(p)) if p is not None else series


def max_visible_k(nx: int, ny: int) -> int:
    """Largest k with a term of F inside the window (-1 if none)."""
    ks = [k for srcs in explicit_sources(nx, ny).values() for (_, _, k) in srcs]
    return max(ks, default=-1)


def divisibility_witness(p: int, nx: int, ny: int) -> BiSeries:
    """``Q = (F - sum_{k<p} g_k(x) h-tilde_k(y)) / p`` over Z.

    Raises :class:`NotDivisible` if any coefficient fails exact division,
    which would mean the construction is wrong.
    """
    Fp(p)  # validates primality
    residual: dict[tuple[int, int], int] = {}
    for key, srcs in explicit_sources(nx, ny).items():
        residual[key] = sum(factorial(k) for (_, _, k) in srcs)
    for k in range(p):
        g = _generator_terms("g", k, nx)
        h = _generator_terms("h-tilde", k, ny)
        for a, ca in g.items():
            for b, cb in h.items():
                residual[(a, b)] = residual.get((a, b), 0) - ca * cb
    quotient = {}
    for key, c in residual.items():
        if c % p:
            raise NotDivisible(f"coefficient {c} at x^{key[0]} y^{key[1]} is not divisible by {p}")
        if c:
            quotient[key] = c // p
    return BiSeries.from_terms(IntZ(), nx, ny, quotient)


# ---------------------------------------------------------------------------
# p-adic diagonal series


@dataclass
class SpeckerReport:
    p: int
    k_cut: int
    order: int
    precision: int
    residual_divisible: bool
    invariant_factors: tuple[int, ...]
    factors_expected: bool
    symmetric: bool
    rank_mod_precision: int = field(default=0)

    @property
    def ok(self) -> bool:
        return self.residual_divisible and self.factors_expected and self.symmetric

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "kCut": self.k_cut,
            "order": self.order,
            "precision": self.precision,
            "residualDivisible": self.residual_divisible,
            "invariantFactors": [str(f) if f > 2**53 else f for f in self.invariant_factors],
            "factorsExpected": self.factors_expected,
            "symmetric": self.symmetric,
            "visibleTermsModPrecision": self.rank_mod_precision,
        }


def specker_padic(p: int, k_cut: int, N: int, precision: int | None = None) -> tuple[BiSeries, SpeckerReport]:
    """``f = sum_{i<N} p^i x^i y^i`` with its divisibility and Smith checks.

    ``precision`` is the exponent e of the Z/p^e shadow used in place of the
    p-adic integers; it defaults to ``N`` and is echoed in the report.
    """
    if not 0 <= k_cut < N:
        raise BadIndex("need 0 <= kCut < N")
    e = precision if precision is not None else N
    f = BiSeries.from_terms(IntZ(), N, N, {(i, i): p**i for i in range(N)})
    head = BiSeries.from_terms(IntZ(), N, N, {(i, i): p**i for i in range(k_cut)})
    modulus = p**k_cut
    divisible = all(c % modulus == 0 for c in (f - head).terms().values())
    snf = smith_normal_form(Matrix(IntZ(), N, N, tuple(c for row in f.rows for c in row.coeffs)))
    expected = tuple(p**i for i in range(N))
    shadow = reduce_mod(f, ZmodPE(p, e))
    report = SpeckerReport(
        p=p,
        k_cut=k_cut,
        order=N,
        precision=e,
        residual_divisible=divisible,
        invariant_factors=snf.invariant_factors,
        factors_expected=snf.invariant_factors == expected,
        symmetric=f == f.transpose(),
        rank_mod_precision=len(shadow.terms()),
    )
    return f, report


# ---------------------------------------------------------------------------
# Rational enumeration and the continuum family

_RATIONALS: list[Fraction] = [Fraction(0)]
_HEIGHT = [0]


def _extend_rationals(n: int) -> None:
    while len(_RATIONALS) < n:
        h = _HEIGHT[0] = _HEIGHT[0] + 1
        for den in range(h, 0, -1):
            nums = [a for a in range(1, h + 1) if gcd(a, den) == 1] if den == h else ([h] if gcd(h, den) == 1 else [])
            for num in nums:
                q = Fraction(num, den)
                _RATIONALS.extend((q, -q))


def enumerate_rationals(n: int) -> Fraction:
    """The n-th rational (1-based) of a fixed enumeration of Q.

    ``a_1 = 0``; afterwards reduced fractions come in blocks of height
    ``max(|num|, den)``, denominators descending, numerators ascending,
    each value followed by its negative:
    ``0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 2/3, -2/3, 3/2, -3/2, 3, -3, ...``
    """
    if not isinstance(n, int) or n < 1:
        raise BadIndex(f"index must be a positive int, got {n!r}")
    _extend_rationals(n)
    return _RATIONALS[n - 1]


def continuum_member(r: Fraction | int, N: int) -> TruncSeries:
    """``sum x^(2^n)`` over indices n >= 1 with ``a_n < r``, truncated at ``x^N``."""
    if N < 2:
        raise BadIndex("truncation must be at least 2")
    r = Fraction(r)
    terms = {}
    n = 1
    while 2**n < N:
        if enumerate_rationals(n) < r:
            terms[2**n] = 1
        n += 1
    return TruncSeries.from_terms(IntZ(), N, terms)


@dataclass
class IsolationCertificate:
    """Per member: an exponent ``m`` isolated by at least ``width`` on both sides."""

    p: int
    order: int
    width: int
    points: list[tuple[int, int] | None]  # (m, achieved radius) per member

    @property
    def holds(self) -> bool:
        return all(pt is not None and pt[1] >= self.width for pt in self.points)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "order": self.order,
            "width": self.width,
            "holds": self.holds,
            "points": [None if pt is None else {"m": pt[0], "radius": pt[1]} for pt in self.points],
        }


def isolation_certificate(family: list[LaurentTrunc], width: int) -> IsolationCertificate:
    """Check the isolated-coefficient hypothesis at a finite window.

    For each member we look for an exponent ``m`` where only that member is
    nonzero and every member vanishes at ``m + i`` for ``0 < |i| < width``,
    with the whole stretch visible below the truncation order.  When it
    holds, no relation ``sum r_i g_i = 0`` with ``deg r_i < width`` exists.
    """
    p = family[0].p
    order = min(s.order for s in family)
    occupied: dict[int, list[int]] = {}
    for idx, s in enumerate(family):
        for e in s.terms():
            occupied.setdefault(e, []).append(idx)
    positions = sorted(occupied)
    points: list[tuple[int, int] | None] = []
    for idx, s in enumerate(family):
        best = None
        for pos, e in enumerate(positions):
            if occupied[e] != [idx]:
                continue
            # nothing sits below the lowest occupied exponent, so only the right side can bind there
            left = e - positions[pos - 1] if pos > 0 else order
            right = positions[pos + 1] - e if pos + 1 < len(positions) else order - e
            radius = min(left, right)
            if best is None or radius > best[1]:
                best = (e, radius)
        points.append(best)
    return IsolationCertificate(p, order, width, points)


def continuum_differences(rs: list[Fraction], N: int, p: int) -> list[LaurentTrunc]:
    """``g_{r_1}, g_{r_2} - g_{r_1}, ...`` (after sorting ``rs``) reduced mod p."""
    rs = sorted(Fraction(r) for r in rs)
    members = [reduce_mod(continuum_member(r, N), Fp(p)) for r in rs]
    out = [LaurentTrunc.from_series(members[0])]
    for prev, cur in zip(members, members[1:]):
        out.append(LaurentTrunc.from_series(cur - prev))
    return out
