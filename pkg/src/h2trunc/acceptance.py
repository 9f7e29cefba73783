"""The acceptance suite: thirteen finite checks, each with its own oracle.

``run_acceptance`` returns one :class:`CriterionResult` per criterion.  The
``ACCEPTANCE_SCALE`` environment variable (``small`` or ``full``) picks the
preset; ``full`` uses the stated seed counts and truncations, ``small``
keeps every truncation but runs fewer random seeds.
"""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import gcd
from typing import Callable

import numpy as np

from .construction import (
    build_F,
    build_generators,
    continuum_member,
    divisibility_witness,
    explicit_sources,
    isolation_certificate,
    continuum_differences,
    specker_padic,
)
from .errors import AlgebraError, ConstantRatio, NotDivisible
from .homology import ce_h2, h2hat_quotient_presentation, lambda2_coinvariants
from .linalg import Matrix, kernel_basis_fp, rational_dependence, smith_normal_form
from .rank import finite_rank_decomposition, observed_rank
from .rings import Fp, IntZ, ratfunc_normalize
from .series import BiSeries, LaurentTrunc, TruncSeries, reduce_mod
from .sieve import (
    explicit_antisym_mod_p,
    expected_sieve_offset,
    find_sieve,
    powers_independent,
    sieve_vs_rank_experiment,
    verify_sieve,
)

PRESETS = {
    "full": {
        "experimentSeeds": 100,
        "torsionSeeds": 100,
        "snfMatrices": 500,
        "dependenceSeeds": 200,
        "kernelSeeds": 100,
    },
    "small": {
        "experimentSeeds": 10,
        "torsionSeeds": 20,
        "snfMatrices": 100,
        "dependenceSeeds": 40,
        "kernelSeeds": 20,
    },
}


def current_scale() -> str:
    scale = os.environ.get("ACCEPTANCE_SCALE", "full").strip().lower()
    if scale not in PRESETS:
        raise ValueError(f"ACCEPTANCE_SCALE must be one of {sorted(PRESETS)}, got {scale!r}")
    return scale


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.name} ({self.elapsed_s:.1f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "elapsedS": round(self.elapsed_s, 3),
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# independent oracles


def _det(M: list[list[int]]) -> int:
    """Permutation-expansion determinant (only used on tiny matrices)."""
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= M[i][perm[i]]
            if not term:
                break
        total += term
    return total


def invariant_factors_by_minors(M: list[list[int]]) -> tuple[int, ...]:
    """Invariant factors as ratios of successive gcds of k x k minors."""
    rows, cols = len(M), len(M[0]) if M else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, _det([[M[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        divisors.append(g)
    return tuple(divisors[k] // divisors[k - 1] for k in range(1, len(divisors)))


def rank_mod_p_pure(rows: list[list[int]], p: int) -> int:
    """Plain Gaussian elimination on Python lists."""
    A = [[v % p for v in r] for r in rows]
    rank = 0
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [v * inv % p for v in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def exhaustive_f2_relation(dense: list[list[int]], D: int, N: int) -> bool:
    """Does some nonzero tuple of F_2 polynomials of degree <= D kill every coefficient below ``N``?"""
    n = len(dense)
    for bits in product((0, 1), repeat=n * (D + 1)):
        if not any(bits):
            continue
        acc = [0] * N
        for i in range(n):
            for k in range(D + 1):
                if bits[i * (D + 1) + k]:
                    for e in range(N - k):
                        acc[e + k] ^= dense[i][e]
        if not any(acc):
            return True
    return False


def h2hat_bruteforce(N: int) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion factors) of the truncated quotient, computed with sympy."""
    import sympy
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    x, y = sympy.symbols("x y")
    monos = [(a, b) for a in range(N) for b in range(N)]

    def vector(expr) -> list[int]:
        poly = sympy.Poly(sympy.expand(expr), x, y)
        coeffs = dict(poly.terms())
        return [int(coeffs.get((a, b), 0)) for (a, b) in monos]

    rows = [vector((x + y + x * y) * x**a * y**b) for (a, b) in monos]
    rows += [vector(x**a * y**b + x**b * y**a) for a in range(N) for b in range(N)]
    rows += [vector(x**a * y**a) for a in range(N)]  # symmetric in its own right
    rows = [r for r in rows if any(r)]
    if not rows:
        return len(monos), ()
    S = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    return len(monos) - len(diag), tuple(sorted(d for d in diag if d > 1))


def orbit_count(W: int) -> int:
    """Orbits of ``(a, b) -> (a+1, b+1)`` on pairs ``0 <= a < b < W`` (union-find)."""
    pairs = list(combinations(range(W), 2))
    parent = {pr: pr for pr in pairs}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in pairs:
        if b + 1 < W:
            parent[find((a, b))] = find((a + 1, b + 1))
    return len({find(pr) for pr in pairs})


# ---------------------------------------------------------------------------
# criteria


def _c1_sieve_existence(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for p, d in ((2, 4), (3, 4), (5, 5)):
        t0 = time.perf_counter()
        F = explicit_antisym_mod_p(p, 300, 300)
        cert = find_sieve(F, p, d, D=4, source={"kind": "antisym-F", "p": p, "nx": 300, "ny": 300})
        elapsed = time.perf_counter() - t0
        want = expected_sieve_offset(p, d)
        good = cert is not None and cert.m == want and verify_sieve(F, cert) and elapsed < 60
        detail[f"p={p},d={d}"] = {"m": None if cert is None else cert.m, "expected": want, "seconds": round(elapsed, 2)}
        ok &= good
    return ok, detail


def _c2_divisibility(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for p, size in ((2, 300), (3, 300), (5, 300), (7, 800)):
        try:
            Q = divisibility_witness(p, size, size)
        except NotDivisible as exc:
            detail[f"p={p}"] = {"divisible": False, "error": str(exc)}
            ok = False
            continue
        # multiply back sparsely: p*Q + sum_{k<p} g_k h~_k must be F
        target: dict[tuple[int, int], int] = {}
        for key, srcs in explicit_sources(size, size).items():
            target[key] = sum(_fact(k) for (_, _, k) in srcs)
        rebuilt: dict[tuple[int, int], int] = {key: p * c for key, c in Q.terms().items()}
        for k in range(p):
            g = build_generators("g", k, size).terms()
            h = build_generators("h-tilde", k, size).terms()
            for a, ca in g.items():
                for b, cb in h.items():
                    rebuilt[(a, b)] = rebuilt.get((a, b), 0) + ca * cb
        rebuilt = {k: v for k, v in rebuilt.items() if v}
        good = rebuilt == {k: v for k, v in target.items() if v}
        detail[f"p={p}"] = {"size": size, "divisible": True, "multipliesBack": good, "quotientTerms": len(Q.terms())}
        ok &= good
    return ok, detail


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _c3_finite_rank(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for p, size in ((2, 300), (3, 300), (5, 300), (7, 800)):
        F = reduce_mod(build_F(size, size), Fp(p))
        report = observed_rank(F)
        pairs = finite_rank_decomposition(F, p) if report.rank == p else []
        A = np.array([r.coeffs for r in F.rows], dtype=np.int64)
        if pairs:
            left = np.array([b.coeffs for _, b in pairs], dtype=np.int64).T  # ny x r
            right = np.array([a.coeffs for a, _ in pairs], dtype=np.int64)  # r x nx
            back = bool(np.array_equal((left @ right) % p, A))
        else:
            back = False
        detail[f"p={p}"] = {"size": size, "rank": report.rank, "multipliesBack": back}
        ok &= report.rank == p and back
    return ok, detail


def _c4_sieve_vs_rank(preset: dict) -> tuple[bool, dict]:
    p = 5
    alpha = ratfunc_normalize((0, 1), (1,), p)
    beta = ratfunc_normalize((1, 1), (1,), p)
    outcomes = {}
    t0 = time.perf_counter()
    for seed in range(preset["experimentSeeds"]):
        trace = sieve_vs_rank_experiment(alpha, beta, 5, 5, 4, 4, seed)
        outcomes[trace.outcome] = outcomes.get(trace.outcome, 0) + 1
    elapsed = time.perf_counter() - t0
    ok = set(outcomes) == {"no-sieve-confirmed"} and elapsed < 600
    return ok, {"seeds": preset["experimentSeeds"], "outcomes": outcomes, "seconds": round(elapsed, 1)}


def random_int_biseries(rng: random.Random, nx: int, ny: int) -> BiSeries:
    """Sum of a few random integer outer products (so the rank is small and varied)."""
    ring = IntZ()
    r = rng.randint(1, 8)
    out = BiSeries.zero(ring, nx, ny)
    for _ in range(r):
        a = TruncSeries(ring, nx, tuple(rng.randint(-3, 3) for _ in range(nx)))
        b = TruncSeries(ring, ny, tuple(rng.randint(-3, 3) for _ in range(ny)))
        out = out + BiSeries.outer(a, b)
    return out


def _c5_torsion_free(preset: dict) -> tuple[bool, dict]:
    failures = []
    for seed in range(preset["torsionSeeds"]):
        rng = random.Random(seed)
        F = random_int_biseries(rng, 40, 40)
        base = observed_rank(F)
        for n in (2, 3, 6):
            scaled = observed_rank(F.scale(n))
            if scaled.rank != base.rank or scaled.invariant_factors != tuple(n * f for f in base.invariant_factors):
                failures.append([seed, n])
    return not failures, {"seeds": preset["torsionSeeds"], "multipliers": [2, 3, 6], "failures": failures}


def _primes_upto(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if all(q % r for r in range(2, int(q**0.5) + 1))]


def _c6_powers(preset: dict) -> tuple[bool, dict]:
    dependent = [p for p in _primes_upto(50) if not powers_independent((0, 1), (-1, -1), p, 10)]
    try:
        powers_independent((2,), (1,), 5, 3)
        constant_error = False
    except ConstantRatio:
        constant_error = True
    return not dependent and constant_error, {"dependentPrimes": dependent, "constantRatioRaised": constant_error}


def _c7_independence(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for p in (2, 3, 5):
        fam = [LaurentTrunc.from_series(build_generators("g", k, 300, p)) for k in range(p)]
        w = rational_dependence(fam, 4, 300)
        detail[f"p={p}"] = {"absent": w.absent}
        ok &= w.absent
    # exhaustive F_2 search at D = 2 on the first stretch of the same family
    N2 = 64
    fam2 = [build_generators("g", k, N2, 2) for k in range(2)]
    oracle = exhaustive_f2_relation([list(s.coeffs) for s in fam2], 2, N2)
    ours = rational_dependence([LaurentTrunc.from_series(s) for s in fam2], 2, N2).found
    detail["exhaustiveF2"] = {"N": N2, "D": 2, "oracleFound": oracle, "found": ours}
    ok &= oracle == ours
    return ok, detail


def _c8_coinvariants(preset: dict) -> tuple[bool, dict]:
    bad = []
    for W in range(2, 13):
        pres = lambda2_coinvariants("group", W)
        if pres.free_rank != W - 1 or pres.torsion_factors or orbit_count(W) != pres.free_rank:
            bad.append(W)
    c3 = lambda2_coinvariants("completion", 3)
    rels = sorted(sorted(r.items()) for r in c3.relations())
    want = sorted([sorted({"x^0^x^2": 1, "x^1^x^2": 1}.items()), sorted({"x^1^x^2": 1}.items())])
    ok_c3 = c3.free_rank == 1 and rels == want
    return not bad and ok_c3, {"badWindows": bad, "completionN3": c3.to_json()}


def _c9_h2hat(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for N in (1, 2, 3, 4):
        pres = h2hat_quotient_presentation(N)
        ours = (pres.free_rank, pres.torsion_factors)
        oracle = h2hat_bruteforce(N)
        detail[f"N={N}"] = {"ours": list(ours), "oracle": list(oracle)}
        ok &= ours == oracle
    return ok, detail


def _c10_ce(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for N in range(2, 9):
        slice_, cmp = ce_h2(N)
        good = slice_.complex_ok and cmp["rankIdentity"]
        detail[f"N={N}"] = {"h2Rank": slice_.h2_rank, "predicted": cmp["predictedRank"], "d2d3Zero": slice_.complex_ok}
        ok &= good
    return ok, detail


def _c11_specker(preset: dict) -> tuple[bool, dict]:
    detail, ok = {}, True
    for p in (2, 3):
        for k in range(7):
            _, rep = specker_padic(p, k, 8)
            ok &= rep.ok
            if k == 6:
                detail[f"p={p}"] = rep.to_json()
    return ok, detail


def _c12_continuum(preset: dict) -> tuple[bool, dict]:
    N = 2**12
    rs = [Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1)]
    members = [continuum_member(r, N) for r in rs]
    supports = [set(m.support()) for m in members]
    monotone = all(supports[i] <= supports[i + 1] for i in range(len(rs) - 1))
    detail = {"monotone": monotone, "supportSizes": [len(s) for s in supports]}
    ok = monotone
    for p in (2, 3):
        diffs = continuum_differences(rs, N, p)
        cert = isolation_certificate(diffs, 4)
        fam = [LaurentTrunc.from_series(reduce_mod(m, Fp(p))) for m in members]
        w = rational_dependence(fam, 3, N)
        detail[f"p={p}"] = {"isolation": cert.holds, "absent": w.absent}
        ok &= cert.holds and w.absent
    return ok, detail


def _c13_infrastructure(preset: dict) -> tuple[bool, dict]:
    rng = random.Random(13)
    snf_bad = 0
    for _ in range(preset["snfMatrices"]):
        M = [[rng.randint(-6, 6) for _ in range(4)] for _ in range(4)]
        ours = smith_normal_form(Matrix.from_rows(IntZ(), M), verify=True).invariant_factors
        if ours != invariant_factors_by_minors(M):
            snf_bad += 1
    kernel_bad = 0
    for seed in range(preset["kernelSeeds"]):
        r = random.Random(seed)
        p = r.choice([2, 3, 5, 7, 11])
        rows, cols = r.randint(1, 7), r.randint(1, 7)
        M = [[r.randrange(p) for _ in range(cols)] for _ in range(rows)]
        basis = kernel_basis_fp(Matrix.from_rows(Fp(p), M))
        rank = rank_mod_p_pure(M, p)
        kills = all(sum(M[i][j] * v[j] for j in range(cols)) % p == 0 for v in basis for i in range(rows))
        if not kills or len(basis) != cols - rank or (basis and rank_mod_p_pure([list(v) for v in basis], p) != len(basis)):
            kernel_bad += 1
    dep_bad = 0
    for seed in range(preset["dependenceSeeds"]):
        r = random.Random(1000 + seed)
        D = seed % 3
        N = 14
        n = r.randint(1, 2)
        dense = [[r.randrange(2) for _ in range(N)] for _ in range(n)]
        if n == 2 and r.random() < 0.5:
            # plant a relation: second series = (1 + x^k) * first
            k = r.randint(0, D)
            dense[1] = [(dense[0][e] + (dense[0][e - k] if e >= k else 0)) % 2 for e in range(N)]
        fam = [LaurentTrunc.from_terms(2, N, dict(enumerate(row))) for row in dense]
        if any(s.is_zero() for s in fam):
            continue
        try:
            w = rational_dependence(fam, D, N)
        except AlgebraError:
            continue
        if w.found != exhaustive_f2_relation(dense, D, N) or not w.verify(fam):
            dep_bad += 1
    ok = snf_bad == 0 and kernel_bad == 0 and dep_bad == 0
    return ok, {
        "snfMatrices": preset["snfMatrices"],
        "snfDiscrepancies": snf_bad,
        "kernelSeeds": preset["kernelSeeds"],
        "kernelDiscrepancies": kernel_bad,
        "dependenceSeeds": preset["dependenceSeeds"],
        "dependenceDiscrepancies": dep_bad,
    }


CRITERIA: list[tuple[int, str, Callable[[dict], tuple[bool, dict]]]] = [
    (1, "sieve existence on the antisymmetrized explicit series", _c1_sieve_existence),
    (2, "divisibility witness is integral", _c2_divisibility),
    (3, "finite rank mod p with exact decomposition", _c3_finite_rank),
    (4, "sieve-vs-rank experiments find no sieve", _c4_sieve_vs_rank),
    (5, "rank over Q unchanged by integer multiples", _c5_torsion_free),
    (6, "powers independence of x / -(1+x)", _c6_powers),
    (7, "independence certificates for g_k mod p", _c7_independence),
    (8, "lamplighter exterior-square coinvariants", _c8_coinvariants),
    (9, "truncated quotient matches brute-force Smith form", _c9_h2hat),
    (10, "Chevalley-Eilenberg rank identity", _c10_ce),
    (11, "p-adic diagonal series divisibility and Smith form", _c11_specker),
    (12, "continuum family isolation and independence", _c12_continuum),
    (13, "infrastructure oracles", _c13_infrastructure),
]


def run_acceptance(scale: str | None = None, only=None, progress: Callable[[str], None] | None = None) -> list[CriterionResult]:
    scale = scale or current_scale()
    preset = PRESETS[scale]
    results = []
    for number, name, fn in CRITERIA:
        if only is not None and number not in only:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(preset)
        except AlgebraError as exc:
            passed, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        res = CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)
        if progress:
            progress(res.line())
        results.append(res)
    return results
