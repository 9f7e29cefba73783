import random

import pytest

from h2trunc.acceptance import random_int_biseries
from h2trunc.construction import build_F, exponents
from h2trunc.errors import RankMismatch, RingMismatch, UnsupportedRing
from h2trunc.rank import coefficient_matrix, finite_rank_decomposition, observed_rank, recompose
from h2trunc.rings import Fp, IntZ, ZmodPE
from h2trunc.series import BiSeries, TruncSeries, biseries_from_text, reduce_mod

Z = IntZ()


def test_coefficient_matrix_examples():
    assert coefficient_matrix(biseries_from_text("x*y", Z, 2, 2)).to_rows() == [[0, 0], [0, 1]]
    f = TruncSeries.from_terms(Z, 3, {0: 1, 2: 5})
    assert coefficient_matrix(BiSeries.from_rows([f])).to_rows() == [[1, 0, 5]]
    diag = biseries_from_text("1 + x*y + x^2*y^2", Z, 3, 3)
    assert coefficient_matrix(diag).to_rows() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_observed_rank_examples():
    f = TruncSeries.from_terms(Z, 5, {1: 2, 3: 1})
    g = TruncSeries.from_terms(Z, 6, {0: 1, 4: -1})
    assert observed_rank(BiSeries.outer(f, g)).rank == 1
    diag = BiSeries.from_terms(Z, 6, 6, {(i, i): 1 for i in range(6)})
    rep = observed_rank(diag)
    assert rep.rank == 6 and rep.invariant_factors == (1,) * 6 and not rep.stabilized
    assert observed_rank(reduce_mod(build_F(250, 250), Fp(2))).rank == 2
    with pytest.raises(UnsupportedRing):
        observed_rank(reduce_mod(diag, ZmodPE(2, 3)))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rank_counts_visible_slices(p):
    for ny in (40, 60, 100, 300):
        F = reduce_mod(build_F(300, ny), Fp(p))
        visible = sum(1 for k in range(p) if exponents(max(k, 1), k).t < ny and exponents(max(k, 1), k).s < 300)
        assert observed_rank(F).rank == visible


def test_decomposition_examples():
    g = TruncSeries.from_terms(Fp(3), 4, {0: 1, 2: 2})
    x = TruncSeries.from_terms(Fp(3), 4, {1: 1})
    F = BiSeries.outer(x, g)
    pairs = finite_rank_decomposition(F, 1)
    assert len(pairs) == 1 and recompose(pairs, Fp(3), 4, 4) == F
    assert finite_rank_decomposition(BiSeries.zero(Fp(2), 3, 3), 0) == []
    F2 = reduce_mod(build_F(100, 100), Fp(2))
    pairs = finite_rank_decomposition(F2, 2)
    assert len(pairs) == 2 and recompose(pairs, Fp(2), 100, 100) == F2
    with pytest.raises(RankMismatch):
        finite_rank_decomposition(F2, 3)
    with pytest.raises(RingMismatch):
        finite_rank_decomposition(build_F(10, 10), 1)


def test_decomposition_multiplies_back_random():
    for seed in range(30):
        rng = random.Random(seed)
        p = rng.choice([2, 3, 7])
        F = reduce_mod(random_int_biseries(rng, 12, 9), Fp(p))
        r = observed_rank(F).rank
        assert recompose(finite_rank_decomposition(F, r), Fp(p), 12, 9) == F


def test_torsion_free_shadow():
    for seed in range(100):
        F = random_int_biseries(random.Random(seed), 40, 40)
        base = observed_rank(F)
        for n in (2, 3, 6):
            scaled = observed_rank(F.scale(n))
            assert scaled.rank == base.rank
            assert scaled.invariant_factors == tuple(n * f for f in base.invariant_factors)


def test_rank_monotone_in_truncation():
    for seed in range(50):
        rng = random.Random(seed)
        F = reduce_mod(random_int_biseries(rng, 10, 10), Fp(5))
        ranks = [[observed_rank(F.truncate(a, b)).rank for b in range(1, 11)] for a in range(1, 11)]
        for a in range(10):
            for b in range(10):
                if a + 1 < 10:
                    assert ranks[a][b] <= ranks[a + 1][b]
                if b + 1 < 10:
                    assert ranks[a][b] <= ranks[a][b + 1]


def test_rank_report_json():
    rep = observed_rank(biseries_from_text("2*x*y", Z, 3, 3))
    assert rep.to_json() == {"ring": "Z", "Nx": 3, "Ny": 3, "rank": 1, "stabilized": True, "factors": [2]}
