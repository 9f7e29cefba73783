"""Coefficient rings: Z, F_p, Z/p^e and the rational function field F_p(x).

Ring elements for ``IntZ``, ``Fp`` and ``ZmodPE`` are plain Python ints kept
in canonical form (``0 <= a < modulus`` for the modular rings).  Elements of
``RatFuncFp`` are :class:`RationalFunction` instances.  Polynomials over F_p
are tuples of coefficients, lowest degree first, with no trailing zeros; the
zero polynomial is ``()``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
from typing import Sequence, Union

from .errors import NotAUnit, NotPrime, PrimeMismatch, UnsupportedRing, ZeroDenominator

Poly = tuple  # tuple[int, ...] over F_p, low degree first


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for q in range(3, isqrt(n) + 1, 2):
        if n % q == 0:
            return False
    return True


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p!r} is not prime")


# ---------------------------------------------------------------------------
# Polynomials over F_p


def poly_trim(coeffs: Sequence[int], p: int) -> Poly:
    out = [c % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_deg(a: Poly) -> int:
    """Degree, with ``-1`` for the zero polynomial."""
    return len(a) - 1


def poly_add(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    return poly_trim(
        [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p
    )


def poly_neg(a: Poly, p: int) -> Poly:
    return poly_trim([-c for c in a], p)


def poly_sub(a: Poly, b: Poly, p: int) -> Poly:
    return poly_add(a, poly_neg(b, p), p)


def poly_scale(a: Poly, c: int, p: int) -> Poly:
    return poly_trim([c * v for v in a], p)


def poly_mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return poly_trim(out, p)


def poly_pow(a: Poly, k: int, p: int) -> Poly:
    result: Poly = (1,)
    base = a
    while k:
        if k & 1:
            result = poly_mul(result, base, p)
        base = poly_mul(base, base, p)
        k >>= 1
    return result


def poly_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    inv_lead = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    for shift in range(len(a) - len(b), -1, -1):
        c = rem[shift + len(b) - 1] * inv_lead % p
        quot[shift] = c
        if c:
            for i, v in enumerate(b):
                rem[shift + i] = (rem[shift + i] - c * v) % p
    return poly_trim(quot, p), poly_trim(rem, p)


def poly_monic(a: Poly, p: int) -> Poly:
    if not a:
        return a
    return poly_scale(a, pow(a[-1], -1, p), p)


def poly_gcd(a: Poly, b: Poly, p: int) -> Poly:
    """Monic gcd by the Euclidean algorithm (``()`` if both are zero)."""
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    return poly_monic(a, p)


def poly_eval(a: Poly, x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


# ---------------------------------------------------------------------------
# Rational functions


@dataclass(frozen=True)
class RationalFunction:
    """Reduced fraction ``num/den`` of F_p polynomials with monic ``den``.

    Build instances with :func:`ratfunc_normalize` (or the helpers below);
    the constructor only checks the cheap invariants.
    """

    p: int
    num: Poly
    den: Poly

    def __post_init__(self):
        if not self.den:
            raise ZeroDenominator("denominator is zero")
        if self.den[-1] != 1:
            raise ValueError("denominator must be monic; use ratfunc_normalize")

    @classmethod
    def const(cls, c: int, p: int) -> "RationalFunction":
        return cls(p, poly_trim([c], p), (1,))

    @classmethod
    def poly(cls, coeffs: Sequence[int], p: int) -> "RationalFunction":
        return cls(p, poly_trim(coeffs, p), (1,))

    def is_zero(self) -> bool:
        return not self.num

    def _check(self, other: "RationalFunction") -> None:
        if self.p != other.p:
            raise PrimeMismatch(f"F_{self.p}(x) vs F_{other.p}(x)")

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        self._check(other)
        p = self.p
        num = poly_add(poly_mul(self.num, other.den, p), poly_mul(other.num, self.den, p), p)
        return ratfunc_normalize(num, poly_mul(self.den, other.den, p), p)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(self.p, poly_neg(self.num, self.p), self.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        self._check(other)
        p = self.p
        return ratfunc_normalize(poly_mul(self.num, other.num, p), poly_mul(self.den, other.den, p), p)

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise NotAUnit("zero has no inverse in F_p(x)")
        return ratfunc_normalize(self.den, self.num, self.p)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return self * other.inverse()

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.p, poly_pow(self.num, k, self.p), poly_pow(self.den, k, self.p))

    def to_json(self) -> dict:
        return {"p": self.p, "num": list(self.num), "den": list(self.den)}

    def __str__(self) -> str:
        def fmt(a: Poly) -> str:
            terms = [str(c) if i == 0 else f"{c}*x^{i}" for i, c in enumerate(a) if c]
            return " + ".join(terms) or "0"

        if self.den == (1,):
            return fmt(self.num)
        return f"({fmt(self.num)})/({fmt(self.den)})"


def ratfunc_normalize(num: Sequence[int], den: Sequence[int], p: int) -> RationalFunction:
    """Reduce ``num/den`` over F_p: coprime parts, monic denominator.

    >>> ratfunc_normalize((4, 0, 1), (4, 1), 5)   # (x^2 - 1)/(x - 1)
    RationalFunction(p=5, num=(1, 1), den=(1,))
    """
    _check_prime(p)
    num = poly_trim(num, p)
    den = poly_trim(den, p)
    if not den:
        raise ZeroDenominator("denominator is zero")
    if not num:
        return RationalFunction(p, (), (1,))
    g = poly_gcd(num, den, p)
    num = poly_divmod(num, g, p)[0]
    den = poly_divmod(den, g, p)[0]
    lead_inv = pow(den[-1], -1, p)
    return RationalFunction(p, poly_scale(num, lead_inv, p), poly_scale(den, lead_inv, p))


# ---------------------------------------------------------------------------
# Ring tags


class Ring:
    """Common ring contract; concrete tags are frozen dataclasses below."""

    def zero(self):
        return 0

    def one(self):
        return 1

    def normalize(self, a):
        return a

    def is_zero(self, a) -> bool:
        return a == 0

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def neg(self, a):
        return self.normalize(-a)

    def mul(self, a, b):
        return self.normalize(a * b)

    def inv(self, a):
        raise NotImplementedError

    @property
    def int_based(self) -> bool:
        return True

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IntZ(Ring):
    def normalize(self, a):
        return int(a)

    def inv(self, a):
        if a in (1, -1):
            return a
        raise NotAUnit(f"{a} is not a unit in Z")

    def to_json(self) -> dict:
        return {"ring": "Z"}

    def __str__(self) -> str:
        return "Z"


@dataclass(frozen=True)
class Fp(Ring):
    p: int

    def __post_init__(self):
        _check_prime(self.p)

    @property
    def modulus(self) -> int:
        return self.p

    def normalize(self, a):
        return int(a) % self.p

    def inv(self, a):
        return modular_inverse(a, self)

    def to_json(self) -> dict:
        return {"ring": "Fp", "p": self.p}

    def __str__(self) -> str:
        return f"F_{self.p}"


@dataclass(frozen=True)
class ZmodPE(Ring):
    p: int
    e: int

    def __post_init__(self):
        _check_prime(self.p)
        if not isinstance(self.e, int) or self.e < 1:
            raise ValueError(f"exponent e must be a positive int, got {self.e!r}")

    @property
    def modulus(self) -> int:
        return self.p**self.e

    def normalize(self, a):
        return int(a) % self.modulus

    def inv(self, a):
        return modular_inverse(a, self)

    def to_json(self) -> dict:
        return {"ring": "ZmodPE", "p": self.p, "e": self.e}

    def __str__(self) -> str:
        return f"Z/{self.p}^{self.e}"


@dataclass(frozen=True)
class RatFuncFp(Ring):
    p: int

    def __post_init__(self):
        _check_prime(self.p)

    def zero(self):
        return RationalFunction(self.p, (), (1,))

    def one(self):
        return RationalFunction(self.p, (1,), (1,))

    def normalize(self, a):
        if isinstance(a, RationalFunction):
            return a
        return RationalFunction.const(int(a), self.p)

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    @property
    def int_based(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"ring": "RatFuncFp", "p": self.p}

    def __str__(self) -> str:
        return f"F_{self.p}(x)"


RingTag = Union[IntZ, Fp, ZmodPE, RatFuncFp]


def modular_inverse(a: int, tag: Ring) -> int:
    """Inverse of ``a`` in F_p or Z/p^e (and of +-1 in Z).

    >>> modular_inverse(2, Fp(5))
    3
    """
    if isinstance(tag, IntZ):
        if a in (1, -1):
            return a
        raise UnsupportedRing("modular_inverse over Z is only defined for +-1")
    if not isinstance(tag, (Fp, ZmodPE)):
        raise UnsupportedRing(f"modular_inverse is not defined over {tag}")
    m = tag.modulus
    a %= m
    if gcd(a, m) != 1:
        raise NotAUnit(f"{a} is not a unit modulo {m}")
    return pow(a, -1, m)


def ring_from_json(obj: dict) -> Ring:
    kind = obj["ring"]
    if kind == "Z":
        return IntZ()
    if kind == "Fp":
        return Fp(obj["p"])
    if kind == "ZmodPE":
        return ZmodPE(obj["p"], obj["e"])
    if kind == "RatFuncFp":
        return RatFuncFp(obj["p"])
    raise ValueError(f"unknown ring {kind!r}")
