"""Window presentations for second homology of the lamplighter group and its relatives.

Everything here is a finite presentation ``Z^g / (relations)`` read through
its Smith form.  Windows are explicit: the group side uses the t-span
``1, t, ..., t^(W-1)``, the completion side ``Z[x]/x^N`` with ``t = 1 + x``.
Outputs describe these windows and nothing beyond them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import BadWindow, OrderMismatch, RingMismatch
from .linalg import Matrix, SmithForm, smith_normal_form
from .rings import IntZ
from .series import BiSeries, LaurentPoly, TruncSeries, mul_by_poly, mul_trunc, phi_map


@dataclass(frozen=True)
class CoinvariantPresentation:
    """``Z^generator_count / rowspan(relation_matrix)`` with its Smith data."""

    generators: tuple[str, ...]
    relation_matrix: Matrix
    smith: SmithForm
    window: dict = field(default_factory=dict)

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def free_rank(self) -> int:
        return self.generator_count - self.smith.rank

    @property
    def torsion_factors(self) -> tuple[int, ...]:
        return tuple(f for f in self.smith.invariant_factors if f > 1)

    def relations(self) -> list[dict[str, int]]:
        """Relations as sparse ``{generator label: coefficient}`` maps."""
        return [
            {self.generators[j]: c for j, c in enumerate(row) if c} for row in self.relation_matrix.to_rows()
        ]

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": self.relations(),
            "invariantFactors": list(self.smith.invariant_factors),
            "torsionFactors": list(self.torsion_factors),
            "freeRank": self.free_rank,
            "window": self.window,
        }


def _present(labels: list[str], relations: list[dict[int, int]], window: dict) -> CoinvariantPresentation:
    """Assemble a presentation, dropping relations that vanish identically."""
    rows = []
    for rel in relations:
        row = [0] * len(labels)
        for j, c in rel.items():
            row[j] += c
        if any(row):
            rows.append(row)
    M = Matrix.from_rows(IntZ(), rows, cols=len(labels))
    return CoinvariantPresentation(tuple(labels), M, smith_normal_form(M), window)


def _pair_index(size: int) -> tuple[list[tuple[int, int]], dict[tuple[int, int], int]]:
    pairs = list(combinations(range(size), 2))
    return pairs, {pr: i for i, pr in enumerate(pairs)}


def _wedge_add(acc: dict[int, int], index: dict, a: int, b: int, c: int, size: int) -> None:
    """Add ``c * e_a ^ e_b`` (antisymmetry applied, indices at or past ``size`` dropped)."""
    if a >= size or b >= size or a == b or not c:
        return
    if a > b:
        a, b, c = b, a, -c
    j = index[(a, b)]
    acc[j] = acc.get(j, 0) + c


def group_window_relations(W: int) -> tuple[list[tuple[int, int]], list[dict[int, int]]]:
    """Basis pairs and shift relations ``e_ab - e_(a+1)(b+1)`` on the t-span window."""
    pairs, index = _pair_index(W)
    rels = [{index[(a, b)]: 1, index[(a + 1, b + 1)]: -1} for (a, b) in pairs if b <= W - 2]
    return pairs, rels


def completion_window_relations(N: int) -> tuple[list[tuple[int, int]], list[dict[int, int]]]:
    """Basis pairs and ``(t - 1) e_ab`` on ``Lambda^2(Z[x]/x^N)`` with ``t = 1 + x``.

    ``t(x^a ^ x^b) - x^a ^ x^b = x^a ^ x^(b+1) + x^(a+1) ^ x^b + x^(a+1) ^ x^(b+1)``.
    """
    pairs, index = _pair_index(N)
    rels = []
    for a, b in pairs:
        acc: dict[int, int] = {}
        for da, db in ((0, 1), (1, 0), (1, 1)):
            _wedge_add(acc, index, a + da, b + db, 1, N)
        rels.append(acc)
    return pairs, rels


def lambda2_coinvariants(model: str, size: int) -> CoinvariantPresentation:
    """Coinvariants of the exterior square on a window.

    ``model="group"``: ``Z[t, t^-1]`` seen through ``1, ..., t^(W-1)``, t
    acting by shift.  ``model="completion"``: ``Z[x]/x^N`` with t acting as
    ``1 + x``.  Only relations whose images are fully visible are used.
    """
    if model not in ("group", "completion"):
        raise BadWindow(f"unknown model {model!r}; use 'group' or 'completion'")
    if size < 2:
        raise BadWindow(f"window size must be at least 2, got {size}")
    if model == "group":
        pairs, rels = group_window_relations(size)
        labels = [f"t^{a}^t^{b}" for a, b in pairs]
        window = {"model": "group", "W": size}
    else:
        pairs, rels = completion_window_relations(size)
        labels = [f"x^{a}^x^{b}" for a, b in pairs]
        window = {"model": "completion", "N": size}
    return _present(labels, rels, window)


def wedge_coordinates(f: TruncSeries, g: TruncSeries) -> dict[tuple[int, int], int]:
    """Coordinates of ``f ^ g`` in the basis ``x^a ^ x^b`` (``a < b``)."""
    if f.order != g.order:
        raise OrderMismatch(f"orders {f.order} and {g.order}")
    out: dict[tuple[int, int], int] = {}
    for a, fa in f.terms().items():
        for b, gb in g.terms().items():
            if a == b:
                continue
            key, sign = ((a, b), 1) if a < b else ((b, a), -1)
            out[key] = out.get(key, 0) + sign * fa * gb
    return {k: v for k, v in out.items() if v}


@dataclass
class FunctorialityReport:
    W: int
    N: int
    checked: int
    failures: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"W": self.W, "N": self.N, "checked": self.checked, "failures": [list(f) for f in self.failures]}


def phi_functoriality(W: int, N: int) -> FunctorialityReport:
    """Check that ``t -> 1 + x`` carries group-window relations into completion-window relations.

    The relation ``e_ab - e_(a+1)(b+1)`` maps to ``v - t v`` with
    ``v = phi(t^a) ^ phi(t^b)``; we confirm it equals ``-sum_ij c_ij (t - 1) e_ij``
    where ``c`` are the coordinates of ``v``.
    """
    if W < 2 or N < 2:
        raise BadWindow("need W >= 2 and N >= 2")
    pairs_n, index_n = _pair_index(N)
    _, t_minus_one = completion_window_relations(N)
    images = [phi_map(LaurentPoly({a: 1}), N) for a in range(W)]
    failures = []
    checked = 0
    for a, b in combinations(range(W - 1), 2):
        # relation e_ab - e_(a+1)(b+1); both ends inside the window since b <= W-2
        lhs: dict[int, int] = {}
        for (i, j), c in wedge_coordinates(images[a], images[b]).items():
            lhs[index_n[(i, j)]] = lhs.get(index_n[(i, j)], 0) + c
        for (i, j), c in wedge_coordinates(images[a + 1], images[b + 1]).items():
            lhs[index_n[(i, j)]] = lhs.get(index_n[(i, j)], 0) - c
        rhs: dict[int, int] = {}
        for (i, j), c in wedge_coordinates(images[a], images[b]).items():
            for k, v in t_minus_one[index_n[(i, j)]].items():
                rhs[k] = rhs.get(k, 0) - c * v
        checked += 1
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            failures.append((a, b))
    return FunctorialityReport(W, N, checked, failures)


def theta_image(f: TruncSeries, g: TruncSeries) -> BiSeries:
    """``f(x) g(y)`` as a two-variable series."""
    if f.order != g.order:
        raise OrderMismatch(f"orders {f.order} and {g.order}")
    if f.ring != g.ring:
        raise RingMismatch(f"{f.ring} vs {g.ring}")
    return BiSeries.outer(f, g)


LAMPLIGHTER_POLY = {(1, 0): 1, (0, 1): 1, (1, 1): 1}  # x + y + xy = (1+x)(1+y) - 1


def h2hat_quotient_presentation(N: int) -> CoinvariantPresentation:
    """Truncation of ``Z[[x]] Z[[y]] / ((x + y + xy) + symmetric series)``.

    Generators are ``x^a y^b`` with ``a, b < N``; relations are
    ``(x + y + xy) x^a y^b`` (truncated), ``x^a y^b + x^b y^a`` and ``x^a y^a``.
    At a finite truncation every series is a polynomial, so the finite-rank
    subring is the whole truncated space.
    """
    if N < 1:
        raise BadWindow(f"truncation must be at least 1, got {N}")
    idx = {(a, b): b * N + a for b in range(N) for a in range(N)}
    labels = [f"x^{a}*y^{b}" for b in range(N) for a in range(N)]
    rels: list[dict[int, int]] = []
    for (a, b), j in idx.items():
        rel: dict[int, int] = {}
        for (da, db), c in LAMPLIGHTER_POLY.items():
            key = (a + da, b + db)
            if key in idx:
                rel[idx[key]] = rel.get(idx[key], 0) + c
        rels.append(rel)
    for a in range(N):
        rels.append({idx[(a, a)]: 1})
        for b in range(a + 1, N):
            rels.append({idx[(a, b)]: 1, idx[(b, a)]: 1})
    window = {"N": N, "finiteRankSubring": "equals the full truncated space"}
    return _present(labels, rels, window)


def theta_equivariance_holds(f: TruncSeries, g: TruncSeries) -> bool:
    """``theta((1+x)f, (1+x)g) == (1+x)(1+y) theta(f, g)`` at the common truncation."""
    one_plus_x = TruncSeries.from_terms(f.ring, f.order, {0: 1, 1: 1})
    lhs = theta_image(mul_trunc(one_plus_x, f), mul_trunc(one_plus_x, g))
    rhs = mul_by_poly(theta_image(f, g), {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    return lhs == rhs


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg slice for Z e + Z[x]/x^N


@dataclass
class CEComplexSlice:
    """``Lambda^3 g -> Lambda^2 g -> g`` for ``g = Z e + Z[x]/x^N`` with ``[e, x^a] = x^(a+1)``.

    Matrices act on column vectors: ``d3`` is ``dim Lambda^2 x dim Lambda^3``.
    """

    N: int
    basis1: list[str]
    basis2: list[str]
    basis3: list[str]
    d2: Matrix
    d3: Matrix
    h2_rank: int
    h2_torsion: tuple[int, ...]
    complex_ok: bool

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "dims": [len(self.basis1), len(self.basis2), len(self.basis3)],
            "d2d3Zero": self.complex_ok,
            "h2Rank": self.h2_rank,
            "h2Torsion": list(self.h2_torsion),
        }


def _bracket(u: int, v: int, N: int) -> dict[int, int]:
    """``[u, v]`` on basis indices (0 = e, 1+a = x^a)."""
    if u == v:
        return {}
    if u == 0:
        a = v - 1
        return {v + 1: 1} if a + 1 < N else {}
    if v == 0:
        a = u - 1
        return {u + 1: -1} if a + 1 < N else {}
    return {}


def _matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def ce_h2(N: int) -> tuple[CEComplexSlice, dict]:
    """Build the slice, check ``d2 d3 = 0`` and compare H_2 with the window prediction.

    ``H_2 = ker d2 / im d3`` splits as ``(Lambda^2 M)_x`` plus the invariants
    ``M^x`` (spanned by ``x^(N-1)``), so its rank should be the sum of the two.
    """
    if N < 2:
        raise BadWindow(f"truncation must be at least 2, got {N}")
    dim = N + 1
    names = ["e"] + [f"x^{a}" for a in range(N)]
    pairs2 = list(combinations(range(dim), 2))
    pairs3 = list(combinations(range(dim), 3))
    idx2 = {pr: i for i, pr in enumerate(pairs2)}

    d2 = [[0] * len(pairs2) for _ in range(dim)]
    for col, (u, v) in enumerate(pairs2):
        for k, c in _bracket(u, v, N).items():
            d2[k][col] += c

    d3 = [[0] * len(pairs3) for _ in range(len(pairs2))]
    for col, (a, b, c) in enumerate(pairs3):
        # [a,b]^c + [b,c]^a + [c,a]^b
        for (u, v), w in (((a, b), c), ((b, c), a), ((c, a), b)):
            for k, coef in _bracket(u, v, N).items():
                if k == w:
                    continue
                lo, hi, sign = (k, w, 1) if k < w else (w, k, -1)
                d3[idx2[(lo, hi)]][col] += sign * coef

    complex_ok = all(v == 0 for row in _matmul(d2, d3) for v in row) if pairs3 else True

    d2m = Matrix.from_rows(IntZ(), d2, cols=len(pairs2))
    d3m = Matrix.from_rows(IntZ(), d3, cols=len(pairs3))
    rank_d2 = smith_normal_form(d2m).rank
    snf_d3 = smith_normal_form(d3m)
    ker_d2 = len(pairs2) - rank_d2
    h2_rank = ker_d2 - snf_d3.rank
    h2_torsion = tuple(f for f in snf_d3.invariant_factors if f > 1)

    # window prediction: (Lambda^2 M)_x is Lambda^2 M modulo x acting as a derivation
    m_pairs, m_index = _pair_index(N)
    deriv_rels = []
    for a, b in m_pairs:
        acc: dict[int, int] = {}
        _wedge_add(acc, m_index, a + 1, b, 1, N)
        _wedge_add(acc, m_index, a, b + 1, 1, N)
        deriv_rels.append(acc)
    coinv = _present([f"x^{a}^x^{b}" for a, b in m_pairs], deriv_rels, {"model": "lie", "N": N})
    invariants_rank = 1  # ker(x on Z[x]/x^N) = Z x^(N-1)

    slice_ = CEComplexSlice(
        N,
        names,
        [f"{names[u]}^{names[v]}" for u, v in pairs2],
        [f"{names[u]}^{names[v]}^{names[w]}" for u, v, w in pairs3],
        d2m,
        d3m,
        h2_rank,
        h2_torsion,
        complex_ok,
    )
    comparison = {
        "coinvariantRank": coinv.free_rank,
        "coinvariantTorsion": list(coinv.torsion_factors),
        "invariantRank": invariants_rank,
        "predictedRank": coinv.free_rank + invariants_rank,
        "h2Rank": h2_rank,
        "rankIdentity": h2_rank == coinv.free_rank + invariants_rank,
        "torsionMatches": h2_torsion == coinv.torsion_factors,
    }
    return slice_, comparison
