import random

import pytest

from h2trunc.errors import NotAUnit, NotPrime, UnsupportedRing, ZeroDenominator
from h2trunc.rings import (
    Fp,
    IntZ,
    RatFuncFp,
    RationalFunction,
    ZmodPE,
    modular_inverse,
    poly_gcd,
    poly_mul,
    ratfunc_normalize,
    ring_from_json,
)


def test_modular_inverse_examples():
    assert modular_inverse(2, Fp(5)) == 3
    assert modular_inverse(1, Fp(7)) == 1
    with pytest.raises(NotAUnit):
        modular_inverse(0, Fp(5))


def test_modular_inverse_over_z_and_prime_powers():
    assert modular_inverse(-1, IntZ()) == -1
    with pytest.raises(UnsupportedRing):
        modular_inverse(2, IntZ())
    assert modular_inverse(2, ZmodPE(3, 2)) == 5
    with pytest.raises(NotAUnit):
        modular_inverse(3, ZmodPE(3, 2))


@pytest.mark.parametrize("tag", [Fp(7), Fp(11), ZmodPE(2, 5), ZmodPE(5, 3)])
def test_inverse_is_involution(tag):
    m = tag.modulus
    for a in range(1, m):
        try:
            b = modular_inverse(a, tag)
        except NotAUnit:
            continue
        assert a * b % m == 1
        assert modular_inverse(b, tag) == a


def test_primality_checked():
    with pytest.raises(NotPrime):
        Fp(9)
    with pytest.raises(NotPrime):
        ZmodPE(4, 2)
    with pytest.raises(ValueError):
        ZmodPE(3, 0)


def test_ratfunc_normalize_examples():
    rf = ratfunc_normalize((4, 0, 1), (4, 1), 5)  # (x^2 - 1)/(x - 1)
    assert (rf.num, rf.den) == ((1, 1), (1,))
    zero = ratfunc_normalize((), (2, 0, 0, 1), 5)
    assert (zero.num, zero.den) == ((), (1,))
    with pytest.raises(ZeroDenominator):
        ratfunc_normalize((0, 1), (), 5)


def _random_rf(rng, p):
    num = [rng.randrange(p) for _ in range(rng.randint(1, 4))]
    den = [rng.randrange(p) for _ in range(rng.randint(1, 4))]
    if not any(den):
        den[-1] = 1
    return ratfunc_normalize(num, den, p)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_ratfunc_field_axioms(p):
    rng = random.Random(p)
    one = RationalFunction.const(1, p)
    for _ in range(200):
        a, b, c = (_random_rf(rng, p) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a and a * b == b * a
        assert (a - a).is_zero()
        if not a.is_zero():
            assert a * a.inverse() == one


@pytest.mark.parametrize("p", [2, 3, 5])
def test_ratfunc_canonical_and_idempotent(p):
    rng = random.Random(100 + p)
    for _ in range(100):
        a = _random_rf(rng, p)
        assert a.den[-1] == 1
        assert poly_gcd(a.num, a.den, p) in ((1,), ()) or not a.num
        assert ratfunc_normalize(a.num, a.den, p) == a


def test_ratfunc_powers_and_text():
    p = 5
    x = RationalFunction.poly((0, 1), p)
    assert x ** 2 == RationalFunction.poly((0, 0, 1), p)
    assert (x ** -1) * x == RationalFunction.const(1, p)
    assert str(RationalFunction.const(3, p)) == "3"
    assert str(ratfunc_normalize((0, 1), (1, 1), p)) == "(1*x^1)/(1 + 1*x^1)"


def test_ring_contract_and_json_roundtrip():
    for tag in (IntZ(), Fp(5), ZmodPE(3, 2), RatFuncFp(3)):
        assert ring_from_json(tag.to_json()) == tag
    assert Fp(5).normalize(-1) == 4
    assert ZmodPE(3, 2).normalize(10) == 1
    rf = RatFuncFp(3)
    assert rf.is_zero(rf.zero())
    assert rf.mul(rf.one(), rf.one()) == rf.one()


def test_poly_mul_matches_naive():
    rng = random.Random(3)
    p = 7
    for _ in range(50):
        a = tuple(rng.randrange(p) for _ in range(rng.randint(1, 5)))
        b = tuple(rng.randrange(p) for _ in range(rng.randint(1, 5)))
        naive = [0] * (len(a) + len(b))
        for i, u in enumerate(a):
            for j, v in enumerate(b):
                naive[i + j] = (naive[i + j] + u * v) % p
        while naive and naive[-1] == 0:
            naive.pop()
        assert poly_mul(a, b, p) == tuple(naive)
