import random
from itertools import product

import pytest

from h2trunc.acceptance import exhaustive_f2_relation, invariant_factors_by_minors, rank_mod_p_pure
from h2trunc.construction import build_generators
from h2trunc.errors import BoundsTooSmall, PrimeMismatch, RingMismatch
from h2trunc.linalg import (
    Matrix,
    SmithForm,
    kernel_basis_fp,
    rank_fp,
    rational_dependence,
    relation_residual,
    smith_normal_form,
)
from h2trunc.rings import Fp, IntZ
from h2trunc.series import LaurentTrunc, TruncSeries


def M(ring, rows):
    return Matrix.from_rows(ring, rows)


def L(p, terms, order):
    return LaurentTrunc.from_terms(p, order, terms)


def test_kernel_examples():
    assert kernel_basis_fp(M(Fp(2), [[1, 1], [1, 1]])) == [(1, 1)]
    assert kernel_basis_fp(M(Fp(5), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == []
    assert kernel_basis_fp(M(Fp(5), [[1, 2]])) == [(3, 1)]
    with pytest.raises(RingMismatch):
        kernel_basis_fp(M(IntZ(), [[1, 2]]))


def test_kernel_exhaustive_f5():
    # every kernel vector of [[1, 2]] over F_5 is a multiple of the returned one
    kernel = {v for v in product(range(5), repeat=2) if (v[0] + 2 * v[1]) % 5 == 0 and any(v)}
    assert kernel == {tuple(c * a % 5 for a in (3, 1)) for c in range(1, 5)}


def test_kernel_rank_nullity():
    for seed in range(500):
        rng = random.Random(seed)
        p = rng.choice([2, 3, 5, 7, 13])
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[rng.randrange(p) for _ in range(c)] for _ in range(r)]
        basis = kernel_basis_fp(M(Fp(p), rows))
        rank = rank_mod_p_pure(rows, p)
        assert rank_fp(M(Fp(p), rows)) == rank
        assert len(basis) == c - rank
        for v in basis:
            assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows)


def test_smith_examples():
    assert smith_normal_form(M(IntZ(), [[1, 0], [0, 1]])).invariant_factors == (1, 1)
    assert smith_normal_form(M(IntZ(), [[2, 4], [6, 8]])).invariant_factors == (2, 4)
    zero = smith_normal_form(M(IntZ(), [[0, 0], [0, 0]]))
    assert zero.invariant_factors == () and zero.rank == 0
    with pytest.raises(RingMismatch):
        smith_normal_form(M(Fp(3), [[1]]))


def test_smith_form_validates_chain():
    with pytest.raises(ValueError):
        SmithForm((2, 3), 2)


def test_smith_vs_minors():
    rng = random.Random(42)
    for _ in range(500):
        rows = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)]
        ours = smith_normal_form(M(IntZ(), rows), verify=True)
        assert ours.invariant_factors == invariant_factors_by_minors(rows)


def test_smith_rectangular_and_verified():
    rng = random.Random(8)
    for _ in range(50):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        a = smith_normal_form(M(IntZ(), rows), verify=True)
        b = smith_normal_form(M(IntZ(), rows))
        assert a == b == SmithForm(invariant_factors_by_minors(rows), len(invariant_factors_by_minors(rows)))


def test_rational_dependence_examples():
    one, x = L(5, {0: 1}, 4), L(5, {1: 1}, 4)
    w = rational_dependence([one, x], 1, 4)
    assert w.found and w.coeff_vectors == ((0, 1), (4,))  # x * 1 - 1 * x
    assert w.verify([one, x])

    lac = L(3, {3**i: 1 for i in range(5)}, 300)
    for D in (0, 2, 5):
        assert rational_dependence([lac], D, 300).absent

    h = [LaurentTrunc.from_series(build_generators("h", k, 60, 2)) for k in range(2)]
    assert rational_dependence(h, 2, 60).absent
    assert not exhaustive_f2_relation([[h[i].coeff(e) for e in range(60)] for i in range(2)], 2, 60)


def test_rational_dependence_errors():
    with pytest.raises(PrimeMismatch):
        rational_dependence([L(2, {0: 1}, 5), L(3, {0: 1}, 5)], 1, 5)
    with pytest.raises(BoundsTooSmall):
        rational_dependence([L(2, {0: 1}, 5), L(2, {3: 1}, 5)], 2, 5)
    with pytest.raises(BoundsTooSmall):
        rational_dependence([L(2, {0: 1}, 5)], 1, 8)


def test_rational_dependence_vs_exhaustive_f2():
    mismatches = 0
    for seed in range(200):
        rng = random.Random(seed)
        D, N, n = seed % 3, 12, rng.randint(1, 2)
        dense = [[rng.randrange(2) for _ in range(N)] for _ in range(n)]
        if n == 2 and seed % 2:
            k = rng.randint(0, D)
            dense[1] = [(dense[0][e] + (dense[0][e - k] if e >= k else 0)) % 2 for e in range(N)]
        fam = [L(2, dict(enumerate(row)), N) for row in dense]
        if any(s.is_zero() for s in fam):
            continue
        try:
            w = rational_dependence(fam, D, N)
        except BoundsTooSmall:
            continue
        assert w.verify(fam)
        mismatches += w.found != exhaustive_f2_relation(dense, D, N)
    assert mismatches == 0


def test_absence_is_monotone_in_degree():
    rng = random.Random(4)
    for _ in range(40):
        fam = [L(3, {e: rng.randrange(3) for e in range(30)}, 30) for _ in range(3)]
        if any(s.is_zero() for s in fam):
            continue
        for D in range(4, 0, -1):
            if rational_dependence(fam, D, 30).absent:
                assert all(rational_dependence(fam, d, 30).absent for d in range(D))
                break


def test_common_multiplier_preserves_dependence():
    rng = random.Random(6)
    p, N = 3, 40
    mult = TruncSeries.from_terms(Fp(p), N, {0: 1, 2: 1, 3: 2})  # a unit polynomial
    from h2trunc.series import mul_trunc

    for _ in range(30):
        base = [TruncSeries(Fp(p), N, tuple(rng.randrange(p) for _ in range(N))) for _ in range(2)]
        if rng.random() < 0.5:
            base[1] = mul_trunc(base[0], TruncSeries.from_terms(Fp(p), N, {0: 1, 1: 1}))
        plain = [LaurentTrunc.from_series(s) for s in base]
        scaled = [LaurentTrunc.from_series(mul_trunc(s, mult)) for s in base]
        if any(s.is_zero() for s in plain):
            continue
        assert rational_dependence(plain, 2, N).found == rational_dependence(scaled, 2, N).found


def test_relation_residual_direct():
    one, x = L(5, {0: 1}, 6), L(5, {1: 1}, 6)
    assert relation_residual([one, x], [(0, 1), (4,)], 6) == {}
    assert relation_residual([one, x], [(1,), (1,)], 6) == {0: 1, 1: 1}
