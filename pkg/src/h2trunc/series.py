"""Truncated power series in one and two variables, and Laurent truncations.

All series are immutable.  Truncation is order-strict: combining series of
different orders raises :class:`OrderMismatch` instead of re-truncating.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import (
    NonSquareTruncation,
    NotAUnit,
    OrderMismatch,
    ParseError,
    PrimeMismatch,
    RingMismatch,
)
from .rings import Fp, IntZ, Ring, RationalFunction, ZmodPE, poly_trim

# ---------------------------------------------------------------------------
# Univariate


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """Power series over ``ring`` known modulo ``x^order``."""

    ring: Ring
    order: int
    coeffs: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be positive, got {self.order}")
        if len(self.coeffs) != self.order:
            raise ValueError(f"expected {self.order} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(self.ring.normalize(c) for c in self.coeffs))

    @classmethod
    def zero(cls, ring: Ring, order: int) -> "TruncSeries":
        return cls(ring, order, (ring.zero(),) * order)

    @classmethod
    def one(cls, ring: Ring, order: int) -> "TruncSeries":
        return cls.from_terms(ring, order, {0: ring.one()})

    @classmethod
    def from_terms(cls, ring: Ring, order: int, terms: Mapping[int, object]) -> "TruncSeries":
        """Sparse constructor; exponents at or beyond ``order`` are dropped."""
        coeffs = [ring.zero()] * order
        for e, c in terms.items():
            if e < 0:
                raise ValueError(f"negative exponent {e} in a power series")
            if e < order:
                coeffs[e] = ring.add(coeffs[e], ring.normalize(c))
        return cls(ring, order, tuple(coeffs))

    def __getitem__(self, i: int):
        return self.coeffs[i]

    def __len__(self) -> int:
        return self.order

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coeffs)

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return i
        return None

    def support(self) -> list[int]:
        return [i for i, c in enumerate(self.coeffs) if not self.ring.is_zero(c)]

    def terms(self) -> dict[int, object]:
        return {i: c for i, c in enumerate(self.coeffs) if not self.ring.is_zero(c)}

    def _check(self, other: "TruncSeries") -> None:
        if not isinstance(other, TruncSeries):
            raise TypeError(f"expected TruncSeries, got {type(other).__name__}")
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if self.order != other.order:
            raise OrderMismatch(f"orders {self.order} and {other.order}")

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.order, self.coeffs))

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        add = self.ring.add
        return TruncSeries(self.ring, self.order, tuple(add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.ring, self.order, tuple(self.ring.neg(a) for a in self.coeffs))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        return mul_trunc(self, other)

    def scale(self, c) -> "TruncSeries":
        c = self.ring.normalize(c)
        return TruncSeries(self.ring, self.order, tuple(self.ring.mul(c, a) for a in self.coeffs))

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by ``x^k`` (k >= 0), keeping the order."""
        z = self.ring.zero()
        return TruncSeries(self.ring, self.order, ((z,) * k + self.coeffs)[: self.order])

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise OrderMismatch(f"cannot extend order {self.order} to {order}")
        return TruncSeries(self.ring, order, self.coeffs[:order])

    def to_text(self, var: str = "x") -> str:
        return format_terms({(e,): c for e, c in self.terms().items()}, (var,))

    def __repr__(self) -> str:
        return f"TruncSeries({self.ring}, O(x^{self.order}), {self.to_text()})"


def mul_trunc(F: TruncSeries, G: TruncSeries) -> TruncSeries:
    """Product of two series truncated at their common order.

    >>> R = IntZ()
    >>> mul_trunc(TruncSeries.from_terms(R, 4, {0: 1, 1: 1}),
    ...           TruncSeries.from_terms(R, 4, {0: 1, 1: -1, 2: 1, 3: -1})).to_text()
    '1'
    """
    F._check(G)
    ring, N = F.ring, F.order
    g_nz = [(j, b) for j, b in enumerate(G.coeffs) if not ring.is_zero(b)]
    if ring.int_based:
        out = [0] * N
        for i, a in enumerate(F.coeffs):
            if a:
                for j, b in g_nz:
                    if i + j >= N:
                        break
                    out[i + j] += a * b
        return TruncSeries(ring, N, tuple(out))
    out = [ring.zero()] * N
    for i, a in enumerate(F.coeffs):
        if ring.is_zero(a):
            continue
        for j, b in g_nz:
            if i + j >= N:
                break
            out[i + j] = ring.add(out[i + j], ring.mul(a, b))
    return TruncSeries(ring, N, tuple(out))


def invert_unit(F: TruncSeries) -> TruncSeries:
    """Inverse of a series whose constant term is a unit of the ring."""
    ring, N = F.ring, F.order
    a0 = F.coeffs[0]
    try:
        inv0 = ring.inv(a0)
    except NotAUnit:
        raise
    except Exception as exc:  # UnsupportedRing and friends
        raise NotAUnit(f"constant term {a0} is not a unit in {ring}") from exc
    a_nz = [(k, a) for k, a in enumerate(F.coeffs) if k and not ring.is_zero(a)]
    out = [inv0]
    for n in range(1, N):
        acc = ring.zero()
        for k, a in a_nz:
            if k > n:
                break
            acc = ring.add(acc, ring.mul(a, out[n - k]))
        out.append(ring.neg(ring.mul(inv0, acc)))
    return TruncSeries(ring, N, tuple(out))


def series_pow(F: TruncSeries, k: int) -> TruncSeries:
    if k < 0:
        return series_pow(invert_unit(F), -k)
    result = TruncSeries.one(F.ring, F.order)
    base = F
    while k:
        if k & 1:
            result = mul_trunc(result, base)
        base = mul_trunc(base, base)
        k >>= 1
    return result


# ---------------------------------------------------------------------------
# Laurent truncations over F_p


@dataclass(frozen=True, eq=False)
class LaurentTrunc:
    """Element of F_p((x)) known for exponents below ``order``.

    ``coeffs[i]`` is the coefficient of ``x^(low_exp + i)``.  Construction
    strips leading zeros so ``low_exp`` is the valuation; the zero series is
    stored as ``low_exp = 0`` with no coefficients.
    """

    p: int
    low_exp: int
    order: int
    coeffs: tuple

    def __post_init__(self):
        if self.coeffs and len(self.coeffs) != self.order - self.low_exp:
            raise ValueError("coefficient count must equal order - low_exp")
        cs = [c % self.p for c in self.coeffs]
        lead = 0
        while lead < len(cs) and cs[lead] == 0:
            lead += 1
        if lead == len(cs):
            object.__setattr__(self, "low_exp", 0)
            object.__setattr__(self, "coeffs", ())
        else:
            object.__setattr__(self, "low_exp", self.low_exp + lead)
            object.__setattr__(self, "coeffs", tuple(cs[lead:]))

    @classmethod
    def from_series(cls, F: TruncSeries) -> "LaurentTrunc":
        if not isinstance(F.ring, Fp):
            raise RingMismatch(f"Laurent truncations live over F_p, got {F.ring}")
        return cls(F.ring.p, 0, F.order, F.coeffs)

    @classmethod
    def from_terms(cls, p: int, order: int, terms: Mapping[int, int]) -> "LaurentTrunc":
        live = {e: c % p for e, c in terms.items() if e < order and c % p}
        if not live:
            return cls(p, 0, order, ())
        low = min(live)
        return cls(p, low, order, tuple(live.get(e, 0) for e in range(low, order)))

    @classmethod
    def from_ratfunc(cls, rf: RationalFunction, order: int) -> "LaurentTrunc":
        """Laurent expansion of a rational function, known below ``order``."""
        p = rf.p
        if rf.is_zero():
            return cls(p, 0, order, ())
        den = list(rf.den)
        v = 0
        while den[0] == 0:
            den.pop(0)
            v += 1
        count = order + v
        if count <= 0:
            return cls(p, 0, order, ())
        ring = Fp(p)
        num = TruncSeries.from_terms(ring, count, dict(enumerate(rf.num)))
        u = TruncSeries.from_terms(ring, count, dict(enumerate(den)))
        quotient = mul_trunc(num, invert_unit(u))
        return cls(p, -v, order, quotient.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int | None:
        return None if self.is_zero() else self.low_exp

    def coeff(self, e: int) -> int:
        if e >= self.order:
            raise IndexError(f"x^{e} is beyond the truncation order {self.order}")
        if self.is_zero() or e < self.low_exp:
            return 0
        return self.coeffs[e - self.low_exp]

    def dense(self, start: int, stop: int) -> list[int]:
        return [self.coeff(e) for e in range(start, stop)]

    def terms(self) -> dict[int, int]:
        return {self.low_exp + i: c for i, c in enumerate(self.coeffs) if c}

    def _check(self, other: "LaurentTrunc") -> None:
        if self.p != other.p:
            raise PrimeMismatch(f"F_{self.p} vs F_{other.p}")
        if self.order != other.order:
            raise OrderMismatch(f"orders {self.order} and {other.order}")

    def __eq__(self, other):
        if not isinstance(other, LaurentTrunc):
            return NotImplemented
        self._check(other)
        return self.low_exp == other.low_exp and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.low_exp, self.order, self.coeffs))

    def __add__(self, other: "LaurentTrunc") -> "LaurentTrunc":
        self._check(other)
        a, b = self.terms(), other.terms()
        return LaurentTrunc.from_terms(self.p, self.order, {e: a.get(e, 0) + b.get(e, 0) for e in a.keys() | b.keys()})

    def __neg__(self) -> "LaurentTrunc":
        return self.scale(-1)

    def __sub__(self, other: "LaurentTrunc") -> "LaurentTrunc":
        return self + (-other)

    def scale(self, c: int) -> "LaurentTrunc":
        return LaurentTrunc.from_terms(self.p, self.order, {e: c * v for e, v in self.terms().items()})

    def shift(self, k: int) -> "LaurentTrunc":
        """Multiply by ``x^k``; the known range shifts with it."""
        if self.is_zero():
            return LaurentTrunc(self.p, 0, self.order + k, ())
        return LaurentTrunc(self.p, self.low_exp + k, self.order + k, self.coeffs)

    def to_text(self) -> str:
        return format_terms({(e,): c for e, c in self.terms().items()}, ("x",))

    def to_json(self) -> dict:
        return {"p": self.p, "order": self.order, "terms": self.to_text()}

    def __repr__(self) -> str:
        return f"LaurentTrunc(F_{self.p}, O(x^{self.order}), {self.to_text()})"


# ---------------------------------------------------------------------------
# Bivariate


@dataclass(frozen=True, eq=False)
class BiSeries:
    """Series in x and y; ``rows[j]`` is the coefficient of ``y^j`` (a series in x)."""

    ring: Ring
    nx: int
    ny: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.ny:
            raise ValueError(f"expected {self.ny} rows, got {len(self.rows)}")
        for row in self.rows:
            if row.ring != self.ring or row.order != self.nx:
                raise ValueError("every row must share the ring and x-order")

    @classmethod
    def zero(cls, ring: Ring, nx: int, ny: int) -> "BiSeries":
        z = TruncSeries.zero(ring, nx)
        return cls(ring, nx, ny, (z,) * ny)

    @classmethod
    def from_terms(cls, ring: Ring, nx: int, ny: int, terms: Mapping[tuple[int, int], object]) -> "BiSeries":
        """Sparse constructor keyed by ``(x exponent, y exponent)``; out-of-range terms drop."""
        by_row: dict[int, dict[int, object]] = {}
        for (a, b), c in terms.items():
            if a < nx and b < ny:
                row = by_row.setdefault(b, {})
                row[a] = ring.add(row.get(a, ring.zero()), ring.normalize(c))
        z = TruncSeries.zero(ring, nx)
        rows = tuple(TruncSeries.from_terms(ring, nx, by_row[j]) if j in by_row else z for j in range(ny))
        return cls(ring, nx, ny, rows)

    @classmethod
    def from_rows(cls, rows: Sequence[TruncSeries]) -> "BiSeries":
        rows = tuple(rows)
        return cls(rows[0].ring, rows[0].order, len(rows), rows)

    @classmethod
    def outer(cls, f: TruncSeries, g: TruncSeries) -> "BiSeries":
        """``f(x) * g(y)``; the y-order is ``g.order``."""
        if f.ring != g.ring:
            raise RingMismatch(f"{f.ring} vs {g.ring}")
        return cls(f.ring, f.order, g.order, tuple(f.scale(c) for c in g.coeffs))

    def coeff(self, a: int, b: int):
        """Coefficient of ``x^a y^b``."""
        return self.rows[b].coeffs[a]

    def terms(self) -> dict[tuple[int, int], object]:
        out = {}
        for b, row in enumerate(self.rows):
            for a, c in row.terms().items():
                out[(a, b)] = c
        return out

    def is_zero(self) -> bool:
        return all(row.is_zero() for row in self.rows)

    def _check(self, other: "BiSeries") -> None:
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if (self.nx, self.ny) != (other.nx, other.ny):
            raise OrderMismatch(f"truncations {(self.nx, self.ny)} and {(other.nx, other.ny)}")

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        self._check(other)
        return all(a.coeffs == b.coeffs for a, b in zip(self.rows, other.rows))

    def __hash__(self):
        return hash((self.ring, self.nx, self.ny, tuple(r.coeffs for r in self.rows)))

    def __add__(self, other: "BiSeries") -> "BiSeries":
        self._check(other)
        return BiSeries(self.ring, self.nx, self.ny, tuple(a + b for a, b in zip(self.rows, other.rows)))

    def __neg__(self) -> "BiSeries":
        return BiSeries(self.ring, self.nx, self.ny, tuple(-r for r in self.rows))

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + (-other)

    def scale(self, c) -> "BiSeries":
        return BiSeries(self.ring, self.nx, self.ny, tuple(r.scale(c) for r in self.rows))

    def transpose(self) -> "BiSeries":
        """Swap the variables: ``F(x, y) -> F(y, x)``."""
        cols = list(zip(*(r.coeffs for r in self.rows)))
        return BiSeries(self.ring, self.ny, self.nx, tuple(TruncSeries(self.ring, self.ny, col) for col in cols))

    def truncate(self, nx: int, ny: int) -> "BiSeries":
        if nx > self.nx or ny > self.ny:
            raise OrderMismatch("cannot extend a truncation")
        return BiSeries(self.ring, nx, ny, tuple(r.truncate(nx) for r in self.rows[:ny]))

    def to_text(self) -> str:
        return format_terms(self.terms(), ("x", "y"))

    def __repr__(self) -> str:
        return f"BiSeries({self.ring}, O(x^{self.nx}, y^{self.ny}), {self.to_text()})"


def antisymmetrize(F: BiSeries) -> BiSeries:
    """``F(x, y) - F(y, x)``; needs a square truncation."""
    if F.nx != F.ny:
        raise NonSquareTruncation(f"({F.nx}, {F.ny}) is not square")
    return F - F.transpose()


def mul_by_poly(F: BiSeries, P: Mapping[tuple[int, int], int]) -> BiSeries:
    """Multiply by a bivariate polynomial given as ``{(a, b): c}`` for ``c*x^a*y^b``."""
    ring = F.ring
    if not ring.int_based:
        raise RingMismatch(f"mul_by_poly expects an integer-based ring, got {ring}")
    out = [[0] * F.nx for _ in range(F.ny)]
    for (a, b), c in P.items():
        c = ring.normalize(c)
        if ring.is_zero(c):
            continue
        for j in range(F.ny - b):
            src = F.rows[j].coeffs
            dst = out[j + b]
            for i in range(F.nx - a):
                v = src[i]
                if v:
                    dst[a + i] += c * v
    return BiSeries(ring, F.nx, F.ny, tuple(TruncSeries(ring, F.nx, tuple(r)) for r in out))


def reduce_mod(F, tag: Ring):
    """Coefficientwise residue of an integer series in F_p or Z/p^e."""
    if not isinstance(tag, (Fp, ZmodPE)):
        raise RingMismatch(f"reduction target must be F_p or Z/p^e, got {tag}")
    if not isinstance(F.ring, IntZ):
        raise RingMismatch(f"reduce_mod expects a series over Z, got {F.ring}")
    if isinstance(F, TruncSeries):
        return TruncSeries(tag, F.order, F.coeffs)
    return BiSeries(tag, F.nx, F.ny, tuple(TruncSeries(tag, F.nx, r.coeffs) for r in F.rows))


# ---------------------------------------------------------------------------
# Laurent polynomials in t and the map t -> 1 + x


class LaurentPoly:
    """Integer Laurent polynomial in ``t``; stored as ``{exponent: coefficient}``."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | None = None):
        self._terms = {int(e): int(c) for e, c in (terms or {}).items() if c}

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    def to_text(self) -> str:
        return format_terms({(e,): c for e, c in self._terms.items()}, ("t",))

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()})"


def phi_map(q: LaurentPoly, N: int) -> TruncSeries:
    """Image of ``q`` under ``t -> 1 + x`` in Z[[x]] mod x^N.

    Negative powers go through :func:`invert_unit` applied to ``1 + x``.
    """
    if N < 1:
        raise ValueError("order must be positive")
    ring = IntZ()
    out = TruncSeries.zero(ring, N)
    inv = None
    for e, c in q.terms.items():
        if e >= 0:
            term = TruncSeries.from_terms(ring, N, {i: comb(e, i) for i in range(min(e, N - 1) + 1)})
        else:
            if inv is None:
                inv = invert_unit(TruncSeries.from_terms(ring, N, {0: 1, 1: 1}))
            term = series_pow(inv, -e)
        out = out + term.scale(c)
    return out


# ---------------------------------------------------------------------------
# Sparse text format: "c*x^a*y^b + ..."

_SPLIT = re.compile(r"(?<![\^*])(?=[+-])")
_FACTOR = re.compile(r"^(?:(\d+)|([a-z])(?:\^(-?\d+))?)$")


def parse_terms(text: str, variables: Sequence[str] = ("x", "y"), allow_negative: bool = False) -> dict[tuple, int]:
    """Parse a sparse sum such as ``1*x^4*y^2 + 2*x^15*y^3``.

    Returns ``{exponent tuple: coefficient}`` in the order of ``variables``;
    repeated monomials are summed and zero results dropped.
    """
    src = text.replace(" ", "")
    if not src:
        raise ParseError("empty series literal")
    out: dict[tuple, int] = {}
    for chunk in _SPLIT.split(src):
        if not chunk:
            continue
        sign = 1
        if chunk[0] in "+-":
            sign = -1 if chunk[0] == "-" else 1
            chunk = chunk[1:]
        if not chunk:
            raise ParseError(f"dangling sign in {text!r}")
        coeff = sign
        exps = [0] * len(variables)
        for factor in chunk.split("*"):
            m = _FACTOR.match(factor)
            if not m:
                raise ParseError(f"cannot parse factor {factor!r} in {text!r}")
            if m.group(1) is not None:
                coeff *= int(m.group(1))
                continue
            var = m.group(2)
            if var not in variables:
                raise ParseError(f"unexpected variable {var!r}; expected one of {list(variables)}")
            e = int(m.group(3)) if m.group(3) is not None else 1
            if e < 0 and not allow_negative:
                raise ParseError(f"negative exponent in {factor!r}")
            exps[variables.index(var)] += e
        key = tuple(exps)
        out[key] = out.get(key, 0) + coeff
    return {k: c for k, c in out.items() if c}


def format_terms(terms: Mapping[tuple, object], variables: Sequence[str]) -> str:
    parts = []
    for key in sorted(terms, key=lambda k: tuple(reversed(k))):
        c = terms[key]
        if not c:
            continue
        factors = [str(c)] + [f"{v}^{e}" for v, e in zip(variables, key) if e]
        parts.append("*".join(factors))
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def series_from_text(text: str, ring: Ring, order: int) -> TruncSeries:
    return TruncSeries.from_terms(ring, order, {k[0]: c for k, c in parse_terms(text, ("x",)).items()})


def biseries_from_text(text: str, ring: Ring, nx: int, ny: int) -> BiSeries:
    return BiSeries.from_terms(ring, nx, ny, parse_terms(text, ("x", "y")))


def laurent_poly_from_text(text: str) -> LaurentPoly:
    return LaurentPoly({k[0]: c for k, c in parse_terms(text, ("t",), allow_negative=True).items()})


def int_poly_from_text(text: str) -> tuple[int, ...]:
    """Integer polynomial in x as a coefficient tuple (low degree first)."""
    terms = parse_terms(text, ("x",))
    if not terms:
        return ()
    deg = max(k[0] for k in terms)
    coeffs = [0] * (deg + 1)
    for (e,), c in terms.items():
        coeffs[e] += c
    return tuple(coeffs)


def fp_poly(coeffs: Iterable[int], p: int) -> tuple[int, ...]:
    return poly_trim(list(coeffs), p)
