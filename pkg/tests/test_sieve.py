import json
import random

import pytest

from h2trunc.construction import exponents
from h2trunc.errors import BoundsTooSmall, ConstantRatio, IndexOutOfRange, PrecViolated, RationalityViolated
from h2trunc.rings import Fp, ratfunc_normalize
from h2trunc.series import BiSeries, TruncSeries
from h2trunc.sieve import (
    SieveCertificate,
    explicit_antisym_mod_p,
    expected_sieve_offset,
    find_sieve,
    pillar_families,
    powers_independent,
    sieve_vs_rank_experiment,
    verify_sieve,
)


@pytest.fixture(scope="module")
def antisym():
    return {p: explicit_antisym_mod_p(p, 300, 300) for p in (2, 3, 5)}


@pytest.mark.parametrize("p,d,m,pillars", [(2, 4, 69, (73, 77)), (3, 4, 65, (69, 73, 77)), (5, 5, 213, (218, 223, 228, 233, 238))])
def test_explicit_sieves(antisym, p, d, m, pillars):
    F = antisym[p]
    cert = find_sieve(F, p, d, D=4)
    assert cert.m == m == expected_sieve_offset(p, d) == exponents(d, p).t
    assert cert.pillar_indices == pillars
    assert cert.independence.absent and cert.independence.degree_bound == 4
    assert verify_sieve(F, cert)
    assert find_sieve(F, p, d, D=4) == cert  # first-m policy is deterministic


def test_pillars_are_g_slices(antisym):
    cert = find_sieve(antisym[2], 2, 4, D=4)
    fams = pillar_families(antisym[2], cert)
    assert [(f["match"]["family"], f["match"]["k"]) for f in fams] == [("g", 1), ("g", 0)]


def test_zero_series_has_no_sieve():
    Z = BiSeries.zero(Fp(3), 40, 40)
    assert find_sieve(Z, 2, 3) is None


def test_bounds(antisym):
    with pytest.raises(BoundsTooSmall):
        find_sieve(antisym[2], 2, 4, m_max=300)
    with pytest.raises(ValueError):
        find_sieve(antisym[2], 0, 4)


def test_verify_rejects_shift_and_corruption(antisym):
    F = antisym[2]
    cert = find_sieve(F, 2, 4, D=4)
    assert not verify_sieve(F, cert.shifted(1))
    rows = list(F.rows)
    rows[70] = rows[70] + TruncSeries.from_terms(Fp(2), 300, {0: 1})
    assert not verify_sieve(BiSeries(Fp(2), 300, 300, tuple(rows)), cert)
    small = BiSeries(Fp(2), 300, 78, F.rows[:78])
    with pytest.raises(IndexOutOfRange):
        verify_sieve(small, cert)


def test_certificate_json_roundtrip(antisym):
    cert = find_sieve(antisym[3], 3, 4, D=4, source={"kind": "antisym-F", "p": 3, "nx": 300, "ny": 300})
    back = SieveCertificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert back == cert
    assert back.zero_windows == tuple((65 + 4 * l + 1, 65 + 4 * l + 3) for l in range(4))


def test_certificate_layout():
    pillars, windows = SieveCertificate.layout(10, 3, 2)
    assert pillars == (12, 14, 16)
    assert windows == ((11, 11), (13, 13), (15, 15), (17, 17))
    assert SieveCertificate.layout(0, 2, 1)[1] == ()


def test_planted_sieve_is_found():
    p, nx, ny = 3, 20, 30
    rows = [TruncSeries.zero(Fp(p), nx)] * ny
    rows = list(rows)
    rows[8] = TruncSeries.from_terms(Fp(p), nx, {0: 1})
    rows[11] = TruncSeries.from_terms(Fp(p), nx, {1: 1, 5: 1})
    rows[1] = TruncSeries.from_terms(Fp(p), nx, {3: 1})
    F = BiSeries(Fp(p), nx, ny, tuple(rows))
    cert = find_sieve(F, 2, 3, D=2)
    assert cert is not None and cert.m == 5 and cert.pillar_indices == (8, 11)
    assert verify_sieve(F, cert)


def test_powers_examples():
    assert powers_independent((0, 1), (-1, -1), 5, 8).independent
    res = powers_independent((0, 1), (0, 2), 3, 1, check_rationality=False)
    assert not res.independent and res.relation == (1, 1)
    with pytest.raises(ConstantRatio):
        powers_independent((0, 1), (0, 2), 3, 1)
    with pytest.raises(ConstantRatio):
        powers_independent((2,), (1,), 5, 3)
    with pytest.raises(RationalityViolated):
        powers_independent((0, 1), (2, 1), 5, 3)
    with pytest.raises(PrecViolated):
        powers_independent((0, 1), (0, 3), 3, 2, check_rationality=False)


def test_powers_small_prime_dependence():
    # x^j (1+x)^(n-j) have distinct lowest terms, so they stay independent mod every p
    assert powers_independent((0, 1), (-1, -1), 2, 10).independent
    # U = V + p*W collapses to a constant ratio mod p
    res = powers_independent((1, 3), (1, 0), 3, 2)
    assert not res.independent


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_powers_monotone(p):
    rng = random.Random(p)
    for _ in range(30):
        U = tuple(rng.randint(-3, 3) for _ in range(3))
        V = (rng.choice([1, -1]),) + tuple(rng.randint(-3, 3) for _ in range(2))
        try:
            top = powers_independent(U, V, p, 6)
        except (ConstantRatio, PrecViolated):
            continue
        if top.independent:
            assert all(powers_independent(U, V, p, n).independent for n in range(6))


def test_experiment_lamplighter_pair():
    alpha = ratfunc_normalize((0, 1), (1,), 5)
    beta = ratfunc_normalize((1, 1), (1,), 5)
    trace = sieve_vs_rank_experiment(alpha, beta, 5, 5, 4, 4, seed=1)
    assert trace.outcome == "no-sieve-confirmed"
    assert len(trace.v_basis) <= 4 and all(not lam.is_zero() for lam in trace.lambdas)
    assert trace.params["observedRankH"] <= 4
    again = sieve_vs_rank_experiment(alpha, beta, 5, 5, 4, 4, seed=1)
    assert again.to_json() == trace.to_json()


def test_experiment_preconditions():
    one = ratfunc_normalize((1,), (1,), 5)
    with pytest.raises(PrecViolated):
        sieve_vs_rank_experiment(one, one, 5, 5, 4, 4, seed=0)
    x = ratfunc_normalize((0, 1), (1,), 5)
    with pytest.raises(PrecViolated):
        sieve_vs_rank_experiment(x, one, 5, 5, 5, 4, seed=0)
    trace = sieve_vs_rank_experiment(x, ratfunc_normalize((1, 1), (1,), 5), 5, 5, 0, 0, seed=0)
    assert trace.outcome == "no-sieve-confirmed"


def test_experiment_many_seeds():
    alpha = ratfunc_normalize((0, 1), (1,), 5)
    beta = ratfunc_normalize((1, 1), (1,), 5)
    for seed in range(10):
        assert sieve_vs_rank_experiment(alpha, beta, 5, 5, 4, 4, seed).outcome == "no-sieve-confirmed"
