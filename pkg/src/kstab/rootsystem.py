"""Root-system input data: positive coroot vectors and derived polynomials.

The only Lie-theoretic data the rest of the package consumes is the list of
integer vectors M^a expanding each positive coroot in the simple coroots.
From those come the degree-N weight polynomial

    q(l) = prod_a (|M^a| + l . M^a),        |M^a| = sum_j M^a_j,

whose top homogeneous part p = q_N is the Duistermaat-Heckman density and
whose next part satisfies q_{N-1} = sum_j d/dx_j p. Dimensions of highest
weight representations are q(l) divided by prod_a |M^a|.

Coroot vectors are used uniformly (rather than root expansions) because the
dimension formula pairs weights against coroots; this is what makes the
non simply-laced tables (B, C, G2, F4) come out right.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .polynomial import MultivariatePolynomial, Poly

# q_{N-1} as a fraction of p * f_G. With f_G = 2 * sum_j d_j log p this is
# exactly 1/2; kept as a named constant because the literature also floats
# 1/4, and 1/2 is the value under which the average-scalar identity closes.
QN1_PFG_RATIO = Fraction(1, 2)

_CLASSICAL = ("A", "B", "C", "D", "G2", "F4")


class RootSystemError(ValueError):
    """Invalid root-system input (bad series, rank, or Cartan matrix)."""


@dataclass(frozen=True)
class RootSystem:
    """Positive coroots of a semisimple group, as coefficient vectors.

    ``positive_roots`` holds one integer vector M^a per positive root;
    ``denom`` is the product of the coordinate sums |M^a|.
    """

    rank: int
    positive_roots: tuple[tuple[int, ...], ...]
    denom: int

    @classmethod
    def from_m_vectors(cls, vectors: Sequence[Sequence[int]]) -> "RootSystem":
        vecs = sorted(tuple(int(x) for x in v) for v in vectors)
        if not vecs:
            raise RootSystemError("no positive roots given")
        rank = len(vecs[0])
        if any(len(v) != rank for v in vecs):
            raise RootSystemError("coroot vectors of mixed length")
        if any(any(x < 0 for x in v) for v in vecs) or any(
            all(x == 0 for x in v) for v in vecs
        ):
            raise RootSystemError("coroot vectors must be nonzero and nonnegative")
        if len(set(vecs)) != len(vecs):
            raise RootSystemError("duplicate coroot vectors")
        for j in range(rank):
            basis = tuple(int(i == j) for i in range(rank))
            if basis not in vecs:
                raise RootSystemError("simple coroot e_%d missing" % (j + 1))
        if len(vecs) < rank:
            raise RootSystemError("fewer positive roots than the rank")
        denom = 1
        for v in vecs:
            denom *= sum(v)
        return cls(rank=rank, positive_roots=tuple(vecs), denom=denom)

    @property
    def num_positive_roots(self) -> int:
        return len(self.positive_roots)

    def to_json_dict(self) -> dict:
        return {"rank": self.rank, "m_vectors": [list(v) for v in self.positive_roots]}


# ---------------------------------------------------------------------------
# Cartan matrices and root-string closure
# ---------------------------------------------------------------------------

def cartan_matrix(series: str, rank: int) -> list[list[int]]:
    """Cartan matrix of a classical series, rows indexed by coroots."""
    series = series.upper()
    if series == "G2":
        if rank != 2:
            raise RootSystemError("G2 has rank 2")
        return [[2, -1], [-3, 2]]
    if series == "F4":
        if rank != 4:
            raise RootSystemError("F4 has rank 4")
        return [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -2, 2, -1], [0, 0, -1, 2]]
    if series not in ("A", "B", "C", "D"):
        raise RootSystemError("unknown series %r" % (series,))
    if rank < 1 or (series == "D" and rank < 2):
        raise RootSystemError("rank %d not supported for series %s" % (rank, series))
    n = rank
    C = [[2 * (i == j) for j in range(n)] for i in range(n)]
    if series == "D" and n >= 2:
        for i in range(n - 2):
            C[i][i + 1] = C[i + 1][i] = -1
        if n >= 3:
            C[n - 3][n - 1] = C[n - 1][n - 3] = -1
        # n == 2 is A1 x A1: no edges
    else:
        for i in range(n - 1):
            C[i][i + 1] = C[i + 1][i] = -1
        if series == "B" and n >= 2:
            C[n - 1][n - 2] = -2
        if series == "C" and n >= 2:
            C[n - 2][n - 1] = -2
    return C


def _validate_cartan(C: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(C)
    M = [[int(x) for x in row] for row in C]
    if any(len(row) != n for row in M):
        raise RootSystemError("Cartan matrix must be square")
    for i in range(n):
        if M[i][i] != 2:
            raise RootSystemError("Cartan diagonal entries must equal 2")
        for j in range(n):
            if i != j and M[i][j] > 0:
                raise RootSystemError("off-diagonal Cartan entries must be <= 0")
            if i != j and (M[i][j] == 0) != (M[j][i] == 0):
                raise RootSystemError("Cartan zero pattern must be symmetric")
    # Symmetrizability: propagate diagonal weights over the Dynkin graph.
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i == j or M[i][j] == 0:
                    continue
                want = d[i] * Fraction(M[i][j], M[j][i])
                if d[j] is None:
                    d[j] = want
                    stack.append(j)
                elif d[j] != want:
                    raise RootSystemError("Cartan matrix is not symmetrizable")
    sym = [[d[i] * M[i][j] for j in range(n)] for i in range(n)]
    # Finite type means the symmetrization is positive definite (Sylvester).
    from .polytope import _det

    for m in range(1, n + 1):
        minor = [row[:m] for row in sym[:m]]
        if _det(minor) <= 0:
            raise RootSystemError(
                "Cartan matrix is not of finite type (root closure would not terminate)"
            )
    return M


def _positive_root_closure(C: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Coefficient vectors of all positive roots of a finite-type matrix.

    Standard root-string construction: a root b extends to b + a_j exactly
    when the j-string through b has room, i.e. q = p - <b, a_j coroot> > 0
    where p counts how far the string continues downward.
    """
    n = len(C)
    roots: set[tuple[int, ...]] = set()
    level = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    roots.update(level)
    height = 1
    while level:
        height += 1
        if height > 1 + sum(sum(abs(x) for x in row) for row in C) * n:
            raise RootSystemError("root closure failed to terminate")
        nxt: set[tuple[int, ...]] = set()
        for c in level:
            for j in range(n):
                pairing = sum(C[j][k] * c[k] for k in range(n))
                p = 0
                down = list(c)
                while True:
                    down[j] -= 1
                    t = tuple(down)
                    if any(x < 0 for x in t) or (t not in roots and any(t)):
                        break
                    if not any(t):
                        break
                    p += 1
                if p - pairing > 0:
                    up = list(c)
                    up[j] += 1
                    cand = tuple(up)
                    if cand not in roots:
                        nxt.add(cand)
        roots.update(nxt)
        level = sorted(nxt)
    return sorted(roots)


def build_from_cartan(cartan: Sequence[Sequence[int]]) -> RootSystem:
    """Root system from a Cartan matrix: coroot vectors via the dual closure.

    The positive coroots expanded in simple coroots are the positive roots of
    the dual root system, whose Cartan matrix is the transpose.
    """
    C = _validate_cartan(cartan)
    n = len(C)
    dual = [[C[j][i] for j in range(n)] for i in range(n)]
    return RootSystem.from_m_vectors(_positive_root_closure(dual))


def _runs(n: int) -> list[tuple[int, ...]]:
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(tuple(1 if i <= k <= j else 0 for k in range(n)))
    return out


def _b_series_m_vectors(n: int) -> list[tuple[int, ...]]:
    # Dual of B_n is C_n; list C_n's positive roots in its simple-root basis.
    out = [tuple(1 if i <= k < j else 0 for k in range(n)) for i in range(n) for j in range(i + 1, n)]
    for i in range(n):
        for j in range(i + 1, n):
            vec = [0] * n
            for k in range(i, j):
                vec[k] = 1
            for k in range(j, n - 1):
                vec[k] = 2
            vec[n - 1] += 1
            out.append(tuple(vec))
    for i in range(n):
        vec = [0] * n
        for k in range(i, n - 1):
            vec[k] = 2
        vec[n - 1] = 1
        out.append(tuple(vec))
    return out


def _c_series_m_vectors(n: int) -> list[tuple[int, ...]]:
    # Dual of C_n is B_n.
    out = [tuple(1 if i <= k < j else 0 for k in range(n)) for i in range(n) for j in range(i + 1, n)]
    for i in range(n):
        out.append(tuple(1 if k >= i else 0 for k in range(n)))
    for i in range(n):
        for j in range(i + 1, n):
            vec = [1 if i <= k < j else 0 for k in range(n)]
            for k in range(j, n):
                vec[k] = 2
            out.append(tuple(vec))
    return out


def _d_series_m_vectors(n: int) -> list[tuple[int, ...]]:
    out = [tuple(1 if i <= k < j else 0 for k in range(n)) for i in range(n) for j in range(i + 1, n)]
    for i in range(n - 1):
        vec = [0] * n
        for k in range(i, n - 2):
            vec[k] = 1
        vec[n - 1] = 1
        out.append(tuple(vec))
    for i in range(n - 1):
        for j in range(i + 1, n - 1):
            vec = [0] * n
            for k in range(i, j):
                vec[k] = 1
            for k in range(j, n - 2):
                vec[k] = 2
            vec[n - 2] = 1
            vec[n - 1] = 1
            out.append(tuple(vec))
    return out


_G2_M_VECTORS = [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)]


def build_classical(series: str, rank: int) -> RootSystem:
    """Built-in series A/B/C/D/G2/F4 from explicit coroot combinatorics."""
    series = series.upper()
    if series not in _CLASSICAL:
        raise RootSystemError("unknown series %r" % (series,))
    cartan_matrix(series, rank)  # validates the series/rank combination
    if series == "A":
        vecs = _runs(rank)
    elif series == "B":
        vecs = _b_series_m_vectors(rank) if rank >= 2 else [(1,)]
    elif series == "C":
        vecs = _c_series_m_vectors(rank) if rank >= 2 else [(1,)]
    elif series == "D":
        vecs = _d_series_m_vectors(rank)
    elif series == "G2":
        vecs = list(_G2_M_VECTORS)
    else:  # F4: no pleasant closed form; run the dual closure once
        return build_from_cartan(cartan_matrix("F4", 4))
    return RootSystem.from_m_vectors(vecs)


# ---------------------------------------------------------------------------
# derived polynomials
# ---------------------------------------------------------------------------

def weyl_polynomial(rs: RootSystem) -> MultivariatePolynomial:
    """q(l) = prod_a (|M^a| + l . M^a), degree N with positive coefficients."""
    q = Poly.constant(rs.rank, 1)
    for m in rs.positive_roots:
        q = q * Poly.affine([Fraction(x) for x in m], sum(m))
    return q


def homogeneous_parts(
    q: MultivariatePolynomial, N: int
) -> tuple[MultivariatePolynomial, MultivariatePolynomial, MultivariatePolynomial]:
    """Split q into (q_N, q_{N-1}, remainder of degree <= N-2)."""
    if q.degree() != N:
        raise ValueError("polynomial degree %d does not match N=%d" % (q.degree(), N))
    qN = q.homogeneous_part(N)
    qN1 = q.homogeneous_part(N - 1) if N >= 1 else Poly.zero(q.nvars)
    return qN, qN1, q - qN - qN1


@lru_cache(maxsize=None)
def dh_weight(rs: RootSystem) -> MultivariatePolynomial:
    """Duistermaat-Heckman density p(x) = prod_a (M^a . x), expanded."""
    p = Poly.constant(rs.rank, 1)
    for m in rs.positive_roots:
        p = p * Poly.affine([Fraction(x) for x in m], 0)
    return p


@lru_cache(maxsize=None)
def dh_weight_gradient_sum(rs: RootSystem) -> MultivariatePolynomial:
    """q_{N-1} = sum_j d/dx_j p, the subleading homogeneous part."""
    p = dh_weight(rs)
    out = Poly.zero(rs.rank)
    for j in range(rs.rank):
        out = out + p.partial(j)
    return out


def f_g_fraction(rs: RootSystem) -> tuple[MultivariatePolynomial, MultivariatePolynomial]:
    """The fibration correction f_G = 2 sum_j d_j log p as (numerator, p)."""
    return 2 * dh_weight_gradient_sum(rs), dh_weight(rs)


def dimension(rs: RootSystem, lam: Sequence[int]) -> Fraction:
    """Dimension of the highest weight representation, q(lambda)/denom.

    Evaluated factor by factor so large systems never need the expanded q.
    """
    lam = [int(x) for x in lam]
    if len(lam) != rs.rank:
        raise ValueError("weight length does not match the rank")
    if any(x < 0 for x in lam):
        raise ValueError("dominant integral weights have nonnegative entries")
    num = 1
    for m in rs.positive_roots:
        num *= sum(m) + sum(a * b for a, b in zip(m, lam))
    return Fraction(num, rs.denom)


def weyl_eval(rs: RootSystem, lam: Sequence[int]) -> int:
    """q(lambda) at an integer point, without expanding the product."""
    total = 1
    for m in rs.positive_roots:
        total *= sum(m) + sum(a * b for a, b in zip(m, lam))
    return total
