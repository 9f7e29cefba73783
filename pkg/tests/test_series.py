import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h2trunc.errors import NonSquareTruncation, NotAUnit, OrderMismatch, ParseError, RingMismatch
from h2trunc.rings import Fp, IntZ, RatFuncFp, RationalFunction, ZmodPE
from h2trunc.series import (
    BiSeries,
    LaurentPoly,
    LaurentTrunc,
    TruncSeries,
    antisymmetrize,
    biseries_from_text,
    format_terms,
    invert_unit,
    mul_by_poly,
    mul_trunc,
    parse_terms,
    phi_map,
    reduce_mod,
    series_from_text,
    series_pow,
)

RINGS = [IntZ(), Fp(2), Fp(5), Fp(7), ZmodPE(3, 4)]

Z = IntZ()


def S(text, order, ring=Z):
    return series_from_text(text, ring, order)


def B(text, nx, ny, ring=Z):
    return biseries_from_text(text, ring, nx, ny)


def random_series(rng, ring, order):
    bound = 5 if isinstance(ring, IntZ) else ring.modulus
    return TruncSeries(ring, order, tuple(rng.randrange(-bound, bound + 1) for _ in range(order)))


def test_mul_trunc_examples():
    assert mul_trunc(S("1+x", 4), S("1-x+x^2-x^3", 4)) == TruncSeries.one(Z, 4)
    geo = S("1+x+x^2+x^3+x^4", 5)
    assert mul_trunc(geo, geo) == S("1+2*x+3*x^2+4*x^3+5*x^4", 5)
    assert mul_trunc(TruncSeries.zero(Z, 5), geo).is_zero()


def test_mul_trunc_errors():
    with pytest.raises(OrderMismatch):
        mul_trunc(S("x", 3), S("x", 4))
    with pytest.raises(RingMismatch):
        mul_trunc(S("x", 3), S("x", 3, Fp(3)))
    with pytest.raises(OrderMismatch):
        _ = S("x", 3) == S("x", 4)


@pytest.mark.parametrize("ring", RINGS, ids=str)
def test_ring_axioms(ring):
    rng = random.Random(str(ring))
    for _ in range(500):
        f, g, h = (random_series(rng, ring, 6) for _ in range(3))
        assert mul_trunc(mul_trunc(f, g), h) == mul_trunc(f, mul_trunc(g, h))
        assert mul_trunc(f, g + h) == mul_trunc(f, g) + mul_trunc(f, h)
        assert mul_trunc(f, g) == mul_trunc(g, f)


def test_invert_unit_examples():
    assert invert_unit(S("1+x", 3)) == S("1-x+x^2", 3)
    with pytest.raises(NotAUnit):
        invert_unit(S("2+x", 3))


def test_invert_unit_over_rational_functions():
    p = 5
    K = RatFuncFp(p)
    alpha = RationalFunction.poly((0, 1), p)  # an element of F_p(x), here the series variable is separate
    f = TruncSeries.from_terms(K, 4, {0: K.one(), 1: -alpha})
    inv = invert_unit(f)
    assert [inv.coeffs[j] for j in range(4)] == [alpha**j for j in range(4)]


@pytest.mark.parametrize("ring", [Z, Fp(5), ZmodPE(2, 3)], ids=str)
def test_invert_unit_two_sided(ring):
    rng = random.Random(7)
    one = TruncSeries.one(ring, 8)
    for _ in range(200):
        f = random_series(rng, ring, 8)
        f = f + TruncSeries.from_terms(ring, 8, {0: 1 - f.coeffs[0]})  # constant term 1
        g = invert_unit(f)
        assert mul_trunc(f, g) == one and mul_trunc(g, f) == one


def test_phi_map_examples():
    assert phi_map(LaurentPoly({1: 1}), 4) == S("1+x", 4)
    assert phi_map(LaurentPoly({-1: 1}), 3) == S("1-x+x^2", 3)
    assert phi_map(LaurentPoly({1: 1, 0: -1}), 5) == S("x", 5)


def test_phi_map_is_multiplicative():
    rng = random.Random(11)
    for _ in range(100):
        q1 = LaurentPoly({rng.randint(-3, 3): rng.randint(-3, 3) for _ in range(3)})
        q2 = LaurentPoly({rng.randint(-3, 3): rng.randint(-3, 3) for _ in range(3)})
        N = 7
        assert phi_map(q1 * q2, N) == mul_trunc(phi_map(q1, N), phi_map(q2, N))
        assert phi_map(q1 + q2, N) == phi_map(q1, N) + phi_map(q2, N)


def test_antisymmetrize_examples():
    assert antisymmetrize(B("x", 3, 3)) == B("x-y", 3, 3)
    assert antisymmetrize(B("x*y+x+y", 3, 3)).is_zero()
    assert antisymmetrize(B("x^2*y", 3, 3)) == B("x^2*y-x*y^2", 3, 3)
    with pytest.raises(NonSquareTruncation):
        antisymmetrize(B("x", 3, 4))


def test_antisymmetrize_properties():
    rng = random.Random(5)
    for _ in range(50):
        F = BiSeries.from_terms(Z, 5, 5, {(rng.randrange(5), rng.randrange(5)): rng.randint(-4, 4) for _ in range(6)})
        A = antisymmetrize(F)
        assert antisymmetrize(A) == A.scale(2)
        assert antisymmetrize(F.transpose()) == A.scale(-1)


def test_reduce_mod_examples():
    assert reduce_mod(S("2*x+3*x^2", 4), Fp(2)) == S("x^2", 4, Fp(2))
    assert reduce_mod(S("6*x", 3), ZmodPE(3, 2)) == S("6*x", 3, ZmodPE(3, 2))
    with pytest.raises(RingMismatch):
        reduce_mod(S("x", 3, Fp(3)), Fp(3))


def test_reduce_mod_is_homomorphic():
    rng = random.Random(17)
    tag = Fp(3)
    P = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    for _ in range(200):
        f, g = random_series(rng, Z, 6), random_series(rng, Z, 6)
        assert reduce_mod(mul_trunc(f, g), tag) == mul_trunc(reduce_mod(f, tag), reduce_mod(g, tag))
        F = BiSeries.outer(f, g)
        assert reduce_mod(mul_by_poly(F, P), tag) == mul_by_poly(reduce_mod(F, tag), P)


def test_mul_by_poly_examples():
    P = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    assert mul_by_poly(B("1", 3, 3), P) == B("x+y+x*y", 3, 3)
    assert mul_by_poly(B("y", 3, 3), {(1, 0): 1}) == B("x*y", 3, 3)
    # y^2 only arises as y * y, so its coefficient is 1; xy^2 arises twice
    assert mul_by_poly(B("1+y+y^2", 2, 3), P) == B("x + y + 2*x*y + y^2 + 2*x*y^2", 2, 3)


def test_mul_by_poly_matches_sympy_expansion():
    import sympy

    x, y = sympy.symbols("x y")
    rng = random.Random(23)
    for _ in range(30):
        F_terms = {(rng.randrange(4), rng.randrange(5)): rng.randint(-3, 3) for _ in range(5)}
        P_terms = {(rng.randrange(3), rng.randrange(3)): rng.randint(-3, 3) for _ in range(3)}
        F = BiSeries.from_terms(Z, 4, 5, F_terms)
        expr = sympy.expand(
            sum(c * x**a * y**b for (a, b), c in F.terms().items())
            * sum(c * x**a * y**b for (a, b), c in P_terms.items())
        )
        want = {
            (a, b): int(c) for (a, b), c in sympy.Poly(expr, x, y).terms() if a < 4 and b < 5 and c
        } if expr != 0 else {}
        assert mul_by_poly(F, P_terms).terms() == want


def test_laurent_trunc_normalization():
    s = LaurentTrunc(3, -2, 4, (0, 0, 1, 2, 0, 0))
    assert (s.low_exp, s.coeffs) == (0, (1, 2, 0, 0))
    z = LaurentTrunc(3, 5, 9, (0, 0, 0, 0))
    assert (z.low_exp, z.coeffs) == (0, ())
    rf = RationalFunction(5, (1,), (0, 1))  # 1/x
    lt = LaurentTrunc.from_ratfunc(rf, 3)
    assert lt.terms() == {-1: 1} and lt.valuation() == -1
    with pytest.raises(IndexError):
        lt.coeff(3)


def test_biseries_coefficient_layout():
    F = B("x*y", 2, 2)
    assert F.coeff(1, 1) == 1 and F.coeff(0, 1) == 0
    assert F.rows[1] == S("x", 2)


def test_text_roundtrip_and_errors():
    terms = parse_terms("1*x^4*y^2 + 2*x^15*y^3 - x")
    assert terms == {(4, 2): 1, (15, 3): 2, (1, 0): -1}
    assert parse_terms(format_terms(terms, ("x", "y"))) == terms
    assert parse_terms("t^-2 + 3", ("t",), allow_negative=True) == {(-2,): 1, (0,): 3}
    for bad in ("", "x^", "2**x", "z", "x^-1"):
        with pytest.raises(ParseError):
            parse_terms(bad)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 9), st.integers(0, 9)), st.integers(-50, 50).filter(bool), max_size=8))
def test_text_roundtrip_property(terms):
    assert parse_terms(format_terms(terms, ("x", "y"))) == terms


def test_series_pow():
    assert series_pow(S("1+x", 4), 3) == S("1+3*x+3*x^2+x^3", 4)
    assert series_pow(S("1+x", 4), 0) == TruncSeries.one(Z, 4)
