"""Rational polytopes with exact dual representations and lattice machinery.

Everything here is exact: convex hulls, vertex enumeration, facet charts and
lattice point walks all run on ``Fraction`` arithmetic with no epsilon
comparisons. Polytopes are tiny at the scale this package targets (a few
hundred vertices at most), so brute-force subset enumeration is the right
tool and removes an entire class of robustness failures.

Facet geometry follows the lattice normalization: each facet carries the
primitive integer inward normal v_F, the affine form l_F(x) = <v_F, x> - c_F
is nonnegative on the polytope, and the canonical boundary measure of a facet
is the Lebesgue measure induced by giving a fundamental cell of the facet's
integer lattice volume one. Unimodular facet charts turn that measure into
ordinary Lebesgue measure one dimension down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .polynomial import MultivariatePolynomial, as_fraction

Point = tuple[Fraction, ...]
IntVec = tuple[int, ...]
Halfspace = tuple[IntVec, Fraction]  # (inward primitive normal, offset)


class GeometryError(ValueError):
    """Raised for degenerate, unbounded or otherwise invalid geometry."""


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------

def _det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    n = len(rows)
    a = [[as_fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] == 0:
                continue
            f = a[r][col] * inv
            for c in range(col, n):
                a[r][c] -= f * a[col][c]
    return det


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    a = [[as_fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = 1 / a[rank][col]
        for r in range(m):
            if r != rank and a[r][col] != 0:
                f = a[r][col] * inv
                for c in range(n):
                    a[r][c] -= f * a[rank][c]
        rank += 1
        if rank == m:
            break
    return rank


def affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine span of a point set."""
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return matrix_rank([[x - y for x, y in zip(p, p0)] for p in points[1:]])


def solve_unique(rows, rhs):
    """Solve a square linear system; return None when singular."""
    n = len(rows)
    a = [[as_fraction(x) for x in row] + [as_fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] * inv
                for c in range(col, n + 1):
                    a[r][c] -= f * a[col][c]
    return tuple(a[r][n] / a[r][r] for r in range(n))


def invert_matrix(rows) -> list[list[Fraction]]:
    n = len(rows)
    a = [[as_fraction(x) for x in row] + [Fraction(i == r) for i in range(n)]
         for r, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise GeometryError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _normal_from_span(diffs: Sequence[Point], n: int) -> tuple[Fraction, ...]:
    """Generalized cross product: a vector orthogonal to n-1 span vectors.

    Returns the zero vector when the span is rank deficient.
    """
    if not diffs:
        if n != 1:
            raise GeometryError("empty span only defines a normal in dimension 1")
        return (Fraction(1),)
    w = []
    for j in range(n):
        minor = [[row[c] for c in range(n) if c != j] for row in diffs]
        w.append((-1) ** j * _det(minor))
    return tuple(w)


def primitivize(vec: Sequence) -> IntVec:
    """Scale a nonzero rational vector to a primitive integer vector.

    The positive scaling is dropped; direction is preserved.
    """
    fracs = [as_fraction(x) for x in vec]
    if all(x == 0 for x in fracs):
        raise GeometryError("cannot primitivize the zero vector")
    denom = math.lcm(*(x.denominator for x in fracs))
    ints = [int(x * denom) for x in fracs]
    g = math.gcd(*(abs(v) for v in ints))
    return tuple(v // g for v in ints)


def unimodular_complete_last_row(v: Sequence[int]) -> list[list[int]]:
    """A GL(n, Z) matrix whose last row is the primitive vector v.

    Built Hermite-style: integer column operations reduce v to a unit vector,
    and the inverse of the accumulated operation has v as its last row.
    """
    n = len(v)
    w = [int(x) for x in v]
    if math.gcd(*(abs(x) for x in w)) != 1:
        raise GeometryError("normal vector is not primitive")
    V = [[int(i == j) for j in range(n)] for i in range(n)]  # right operations

    def col_addmul(dst: int, src: int, q: int) -> None:
        for r in range(n):
            V[r][dst] -= q * V[r][src]
        w[dst] -= q * w[src]

    while True:
        nz = [i for i in range(n) if w[i] != 0]
        if len(nz) == 1:
            break
        nz.sort(key=lambda i: abs(w[i]))
        i, j = nz[0], nz[1]
        col_addmul(j, i, w[j] // w[i])
        if w[j] == 0 and len([k for k in range(n) if w[k] != 0]) == 1:
            break
    p = next(i for i in range(n) if w[i] != 0)
    if p != n - 1:
        for r in range(n):
            V[r][p], V[r][n - 1] = V[r][n - 1], V[r][p]
        w[p], w[n - 1] = w[n - 1], w[p]
    if w[n - 1] == -1:
        for r in range(n):
            V[r][n - 1] = -V[r][n - 1]
        w[n - 1] = 1
    U = [[int(x) for x in row] for row in invert_matrix(V)]
    assert tuple(U[n - 1]) == tuple(int(x) for x in v)
    return U


def _pairs_lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out


# ---------------------------------------------------------------------------
# hull and vertex enumeration
# ---------------------------------------------------------------------------

def _hull_facets(points: list[Point], n: int) -> list[Halfspace]:
    facets: set[Halfspace] = set()
    for subset in combinations(range(len(points)), n):
        base = points[subset[0]]
        diffs = [tuple(points[i][c] - base[c] for c in range(n)) for i in subset[1:]]
        if diffs and matrix_rank(diffs) != n - 1:
            continue
        w = _normal_from_span(diffs, n)
        if all(x == 0 for x in w):
            continue
        wp = primitivize(w)
        c = Fraction(sum(a * b for a, b in zip(wp, base)))
        vals = [sum(a * b for a, b in zip(wp, p)) - c for p in points]
        if all(v >= 0 for v in vals):
            facets.add((wp, c))
        elif all(v <= 0 for v in vals):
            facets.add((tuple(-x for x in wp), -c))
    return sorted(facets)


def _enumerate_vertices(facets: list[Halfspace], n: int) -> list[Point]:
    verts: set[Point] = set()
    for subset in combinations(facets, n):
        sol = solve_unique([list(f[0]) for f in subset], [f[1] for f in subset])
        if sol is None:
            continue
        if all(
            sum(a * b for a, b in zip(v, sol)) >= c for v, c in facets
        ):
            verts.add(tuple(sol))
    return sorted(verts)


def _check_bounded(facets: list[Halfspace], n: int) -> None:
    normals = [f[0] for f in facets]
    if matrix_rank(normals) < n:
        raise GeometryError("halfspace intersection is unbounded (normals do not span)")
    # A nontrivial pointed recession cone has an extreme ray cut out by n-1
    # linearly independent active constraints; scan all candidates.
    for subset in combinations(normals, n - 1):
        if subset and matrix_rank(subset) != n - 1:
            continue
        d = _normal_from_span([tuple(map(Fraction, s)) for s in subset], n)
        if all(x == 0 for x in d):
            continue
        for ray in (d, tuple(-x for x in d)):
            if all(sum(a * b for a, b in zip(v, ray)) >= 0 for v in normals):
                raise GeometryError("halfspace intersection is unbounded")


@dataclass(frozen=True)
class RationalPolytope:
    """Bounded full-dimensional rational polytope with both representations.

    ``facets`` are (primitive integer inward normal v_F, rational offset c_F)
    pairs defining l_F(x) = <v_F, x> - c_F >= 0; ``vertices`` are the extreme
    points. Construction cross-verifies the two representations.
    """

    dim: int
    facets: tuple[Halfspace, ...]
    vertices: tuple[Point, ...]

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_vertices(cls, points: Sequence[Sequence]) -> "RationalPolytope":
        pts = sorted({tuple(as_fraction(x) for x in p) for p in points})
        if not pts:
            raise GeometryError("no points given")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise GeometryError("points of mixed dimension")
        if n == 0 or affine_rank(pts) < n:
            raise GeometryError("points do not span the ambient space")
        facets = _hull_facets(pts, n)
        vertices = _enumerate_vertices(facets, n)
        if affine_rank(vertices) < n:
            raise GeometryError("degenerate hull")
        return cls(n, tuple(facets), tuple(vertices))

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence) -> "RationalPolytope":
        cleaned: list[Halfspace] = []
        for normal, offset in halfspaces:
            prim = primitivize(normal)
            # scale the offset by the same positive factor used on the normal
            fr = [as_fraction(x) for x in normal]
            k = next(i for i, x in enumerate(fr) if x != 0)
            scale = Fraction(prim[k]) / fr[k]
            cleaned.append((prim, as_fraction(offset) * scale))
        cleaned = sorted(set(cleaned))
        if not cleaned:
            raise GeometryError("no halfspaces given")
        n = len(cleaned[0][0])
        if any(len(v) != n for v, _ in cleaned):
            raise GeometryError("halfspaces of mixed dimension")
        _check_bounded(cleaned, n)
        vertices = _enumerate_vertices(cleaned, n)
        if not vertices or affine_rank(vertices) < n:
            raise GeometryError("halfspace intersection is empty or lower-dimensional")
        facets = _hull_facets(vertices, n)
        vertices = _enumerate_vertices(facets, n)
        return cls(n, tuple(facets), tuple(vertices))

    # -- basic queries -------------------------------------------------------

    def support_value(self, facet_index: int, x: Sequence) -> Fraction:
        v, c = self.facets[facet_index]
        return sum(a * as_fraction(b) for a, b in zip(v, x)) - c

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        vals = [self.support_value(i, x) for i in range(len(self.facets))]
        return all(v > 0 for v in vals) if strict else all(v >= 0 for v in vals)

    def facet_vertices(self, facet_index: int) -> list[Point]:
        return [p for p in self.vertices if self.support_value(facet_index, p) == 0]

    @property
    def is_integer(self) -> bool:
        return all(
            x.denominator == 1 for p in self.vertices for x in p
        ) and all(c.denominator == 1 for _, c in self.facets)

    def centroid(self) -> Point:
        n = len(self.vertices)
        return tuple(
            sum(p[i] for p in self.vertices) / n for i in range(self.dim)
        )

    def bounding_box(self) -> list[tuple[Fraction, Fraction]]:
        return [
            (min(p[i] for p in self.vertices), max(p[i] for p in self.vertices))
            for i in range(self.dim)
        ]

    def volume(self) -> Fraction:
        total = Fraction(0)
        nfact = math.factorial(self.dim)
        for simplex in triangulate(self):
            base = simplex[0]
            rows = [
                [x - y for x, y in zip(p, base)] for p in simplex[1:]
            ]
            total += abs(_det(rows)) / nfact
        return total

    def to_json_dict(self) -> dict:
        from .polynomial import format_fraction

        return {
            "vertices": [[format_fraction(x) for x in p] for p in self.vertices]
        }


# ---------------------------------------------------------------------------
# facet charts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FacetChart:
    """Unimodular affine chart flattening a facet onto {last coordinate = 0}.

    The map is y = U x - c_F e_n with U in GL(n, Z), so for an integer
    polytope it identifies the facet's lattice with Z^(n-1) and pushes the
    canonical boundary measure to Lebesgue measure on the image polytope.
    """

    facet_index: int
    matrix: tuple[IntVec, ...]
    inverse: tuple[IntVec, ...]
    offset: Fraction
    image: RationalPolytope

    def map_point(self, x: Sequence) -> Point:
        y = [
            Fraction(sum(a * as_fraction(b) for a, b in zip(row, x)))
            for row in self.matrix
        ]
        y[-1] -= self.offset
        return tuple(y[:-1])

    def unmap_point(self, y: Sequence) -> Point:
        full = list(y) + [Fraction(0)]
        full[-1] += self.offset
        # x = U^{-1} (y + c e_n)
        return tuple(
            Fraction(sum(a * as_fraction(b) for a, b in zip(row, full)))
            for row in self.inverse
        )

    def pullback_polynomial(self, h: MultivariatePolynomial) -> MultivariatePolynomial:
        """h composed with the inverse chart, as a polynomial on the image."""
        n = len(self.matrix)
        cols = [[Fraction(self.inverse[r][c]) for c in range(n - 1)] for r in range(n)]
        shift = [Fraction(self.inverse[r][n - 1]) * self.offset for r in range(n)]
        return h.substitute_affine(cols, shift)

    def unmap_affine_data(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        n = len(self.matrix)
        cols = [[Fraction(self.inverse[r][c]) for c in range(n - 1)] for r in range(n)]
        shift = [Fraction(self.inverse[r][n - 1]) * self.offset for r in range(n)]
        return cols, shift


def facet_chart(P: RationalPolytope, facet_index: int) -> FacetChart:
    """Chart a facet of an n-polytope (n >= 2) onto an (n-1)-polytope."""
    if P.dim < 2:
        raise GeometryError("facet charts need ambient dimension >= 2")
    v, c = P.facets[facet_index]
    c = as_fraction(c)
    U = unimodular_complete_last_row(v)
    Uinv = [[int(x) for x in row] for row in invert_matrix(U)]
    image_pts = []
    for p in P.facet_vertices(facet_index):
        y = [sum(Fraction(a) * b for a, b in zip(row, p)) for row in U]
        assert y[-1] == c
        image_pts.append(tuple(y[:-1]))
    image = RationalPolytope.from_vertices(image_pts)
    return FacetChart(
        facet_index=facet_index,
        matrix=tuple(tuple(row) for row in U),
        inverse=tuple(tuple(row) for row in Uinv),
        offset=c,
        image=image,
    )


def facet_measure(P: RationalPolytope, facet_index: int) -> Fraction:
    """Total canonical boundary measure of a facet (exact)."""
    if P.dim == 1:
        return Fraction(1)
    return facet_chart(P, facet_index).image.volume()


# ---------------------------------------------------------------------------
# lattice point enumeration
# ---------------------------------------------------------------------------

def dilated_lattice_points(
    P: RationalPolytope, k: int, threads: int = 1
) -> list[IntVec]:
    """Integer points of the dilate k*P, in lexicographic order.

    Walks bounding-box slabs over the leading coordinates and intersects the
    halfspace constraints exactly on the last coordinate.
    """
    if k < 1:
        raise ValueError("dilation factor must be >= 1")
    n = P.dim
    # Integer constraint data: den * <v, x> >= k * num.
    constraints = []
    for v, c in P.facets:
        constraints.append((v, c.numerator * k, c.denominator))
    box = []
    for lo, hi in P.bounding_box():
        box.append((math.ceil(lo * k), math.floor(hi * k)))
    if any(lo > hi for lo, hi in box):
        return []

    def walk(prefix: list[int], depth: int, out: list[IntVec]) -> None:
        if depth == n - 1:
            lo, hi = box[n - 1]
            for v, num, den in constraints:
                partial = sum(a * b for a, b in zip(v[: n - 1], prefix))
                a = den * v[n - 1]
                rhs = num - den * partial
                if a > 0:
                    lo = max(lo, -((-rhs) // a))
                elif a < 0:
                    hi = min(hi, rhs // a)
                elif rhs > 0:
                    return
            for z in range(lo, hi + 1):
                out.append(tuple(prefix) + (z,))
            return
        for t in range(box[depth][0], box[depth][1] + 1):
            walk(prefix + [t], depth + 1, out)

    if threads > 1 and n >= 2 and box[0][1] >= box[0][0]:
        from concurrent.futures import ThreadPoolExecutor

        slabs = list(range(box[0][0], box[0][1] + 1))

        def run(t0: int) -> list[IntVec]:
            chunk: list[IntVec] = []
            walk([t0], 1, chunk)
            return chunk

        out: list[IntVec] = []
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(run, slabs):
                out.extend(chunk)  # slab order is fixed, merge deterministic
        return out
    out: list[IntVec] = []
    walk([], 0, out)
    return out


def lattice_points(P: RationalPolytope, k: int, threads: int = 1) -> list[Point]:
    """Points of closure(P) intersected with (1/k) Z^n, lexicographic."""
    return [
        tuple(Fraction(c, k) for c in pt)
        for pt in dilated_lattice_points(P, k, threads=threads)
    ]


def facet_lattice_count(P: RationalPolytope, facet_index: int, k: int) -> int:
    """Number of points of the closed facet meeting (1/k) Z^n.

    Enumerates integer solutions of <v_F, x> = k c_F directly over the
    facet's bounding box, pivoting on one coordinate of the normal.
    """
    if not P.is_integer:
        raise GeometryError("facet lattice counts need an integer polytope")
    if k < 1:
        raise ValueError("dilation factor must be >= 1")
    n = P.dim
    v, c = P.facets[facet_index]
    fverts = P.facet_vertices(facet_index)
    if n == 1:
        return 1  # a facet is a single integer point
    fbox = [
        (
            math.ceil(min(p[i] for p in fverts) * k),
            math.floor(max(p[i] for p in fverts) * k),
        )
        for i in range(n)
    ]
    # Solve for the coordinate whose range is widest; the walk covers the rest.
    pivot = max(
        (i for i in range(n) if v[i] != 0),
        key=lambda i: fbox[i][1] - fbox[i][0],
    )
    rest = [i for i in range(n) if i != pivot]
    box = [fbox[i] for i in rest]
    target = int(c) * k
    others = [(w, int(d) * k) for w, d in P.facets]
    count = 0

    def rec(idx: int, partial: list[int]) -> None:
        nonlocal count
        if idx == len(rest):
            s = target - sum(v[i] * t for i, t in zip(rest, partial))
            if s % v[pivot]:
                return
            z = s // v[pivot]
            pt = [0] * n
            for i, t in zip(rest, partial):
                pt[i] = t
            pt[pivot] = z
            if all(sum(a * b for a, b in zip(w, pt)) >= d for w, d in others):
                count += 1
            return
        for t in range(box[idx][0], box[idx][1] + 1):
            rec(idx + 1, partial + [t])

    rec(0, [])
    return count


# ---------------------------------------------------------------------------
# piecewise affine functions (max-of-affine, hence convex)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseAffine:
    """Convex rational PL function f(x) = max_i (a_i . x + b_i)."""

    pieces: tuple[tuple[tuple[Fraction, ...], Fraction], ...]

    @classmethod
    def from_pieces(cls, pieces: Sequence) -> "PiecewiseAffine":
        if not pieces:
            raise ValueError("a piecewise affine function needs at least one piece")
        norm = []
        nvars = len(pieces[0][0])
        for a, b in pieces:
            if len(a) != nvars:
                raise ValueError("pieces of mixed dimension")
            norm.append((tuple(as_fraction(x) for x in a), as_fraction(b)))
        return cls(tuple(norm))

    @classmethod
    def constant(cls, nvars: int, c) -> "PiecewiseAffine":
        return cls.from_pieces([((0,) * nvars, c)])

    @property
    def nvars(self) -> int:
        return len(self.pieces[0][0])

    def value(self, x: Sequence) -> Fraction:
        pt = [as_fraction(t) for t in x]
        return max(sum(a * t for a, t in zip(piece, pt)) + b for piece, b in self.pieces)

    __call__ = value

    def value_float(self, x: Sequence[float]) -> float:
        return max(
            sum(float(a) * t for a, t in zip(piece, x)) + float(b)
            for piece, b in self.pieces
        )

    def active_index(self, x: Sequence) -> int:
        pt = [as_fraction(t) for t in x]
        vals = [
            sum(a * t for a, t in zip(piece, pt)) + b for piece, b in self.pieces
        ]
        best = max(vals)
        return vals.index(best)

    @property
    def denominator_lcm(self) -> int:
        """lcm of all coefficient denominators (the global denominator m)."""
        dens = [b.denominator for _, b in self.pieces]
        dens += [x.denominator for a, _ in self.pieces for x in a]
        return _pairs_lcm(dens)

    def scale(self, c) -> "PiecewiseAffine":
        c = as_fraction(c)
        if c < 0:
            raise ValueError("scaling by a negative constant breaks convexity")
        return PiecewiseAffine(
            tuple((tuple(c * x for x in a), c * b) for a, b in self.pieces)
        )

    def add_constant(self, c) -> "PiecewiseAffine":
        c = as_fraction(c)
        return PiecewiseAffine(tuple((a, b + c) for a, b in self.pieces))

    def compose_affine(self, matrix: Sequence[Sequence], shift: Sequence) -> "PiecewiseAffine":
        """The function x -> f(matrix @ x + shift) (still max-of-affine)."""
        rows = [[as_fraction(x) for x in row] for row in matrix]
        sh = [as_fraction(s) for s in shift]
        m = len(rows[0]) if rows else 0
        out = []
        for a, b in self.pieces:
            new_a = [
                sum(a[r] * rows[r][c] for r in range(len(rows))) for c in range(m)
            ]
            new_b = b + sum(a[r] * sh[r] for r in range(len(rows)))
            out.append((tuple(new_a), new_b))
        return PiecewiseAffine(tuple(out))

    def to_json_dict(self) -> dict:
        from .polynomial import format_fraction

        return {
            "pieces": [
                {"a": [format_fraction(x) for x in a], "b": format_fraction(b)}
                for a, b in self.pieces
            ]
        }


def try_from_halfspaces(halfspaces: Sequence) -> RationalPolytope | None:
    """from_halfspaces, but empty or lower-dimensional input gives None."""
    try:
        return RationalPolytope.from_halfspaces(halfspaces)
    except GeometryError:
        return None


def pl_cells(P: RationalPolytope, f: PiecewiseAffine) -> list[tuple[int, RationalPolytope]]:
    """Full-dimensional cells of P on which a single piece of f is active.

    Cells partition P up to measure zero; duplicated pieces contribute once.
    """
    if f.nvars != P.dim:
        raise ValueError("dimension mismatch between polytope and PL function")
    seen: set = set()
    cells = []
    for i, (a_i, b_i) in enumerate(f.pieces):
        if (a_i, b_i) in seen:
            continue
        seen.add((a_i, b_i))
        halfspaces: list = list(P.facets)
        dead = False
        for j, (a_j, b_j) in enumerate(f.pieces):
            if j == i:
                continue
            diff = [x - y for x, y in zip(a_i, a_j)]
            if all(x == 0 for x in diff):
                if b_i < b_j:
                    dead = True
                    break
                continue
            halfspaces.append((diff, b_j - b_i))
        if dead:
            continue
        cell = try_from_halfspaces(halfspaces)
        if cell is not None:
            cells.append((i, cell))
    return cells


# ---------------------------------------------------------------------------
# lifting, triangulation, transforms
# ---------------------------------------------------------------------------

def lift_polytope(P: RationalPolytope, f: PiecewiseAffine, R) -> RationalPolytope:
    """Closure of the region above P between t = 0 and t = R - f(x).

    Requires f <= R - 1 on the polytope (checked at the vertices, where the
    maximum of a convex function is attained).
    """
    R = as_fraction(R)
    if f.nvars != P.dim:
        raise ValueError("dimension mismatch between polytope and PL function")
    for vtx in P.vertices:
        if f.value(vtx) > R - 1:
            raise GeometryError(
                "headroom violated: f(%s) = %s > R - 1 = %s"
                % (vtx, f.value(vtx), R - 1)
            )
    halfspaces: list = [
        (tuple(v) + (0,), c) for v, c in P.facets
    ]
    halfspaces.append(((0,) * P.dim + (1,), Fraction(0)))  # t >= 0
    for a, b in f.pieces:
        halfspaces.append((tuple(-x for x in a) + (-1,), b - R))
    return RationalPolytope.from_halfspaces(halfspaces)


def triangulate(P: RationalPolytope) -> list[list[Point]]:
    """Exact triangulation: cone the lex-least vertex over opposite facets."""
    n = P.dim
    if len(P.vertices) == n + 1:
        return [list(P.vertices)]
    apex = P.vertices[0]
    simplices: list[list[Point]] = []
    for i in range(len(P.facets)):
        if P.support_value(i, apex) == 0:
            continue
        if n == 1:
            simplices.append([apex, P.facet_vertices(i)[0]])
            continue
        chart = facet_chart(P, i)
        for sub in triangulate(chart.image):
            simplices.append([apex] + [chart.unmap_point(y) for y in sub])
    return simplices


def transform(P: RationalPolytope, g: Sequence[Sequence[int]]) -> RationalPolytope:
    """Image of P under a unimodular integer matrix."""
    rows = [[int(x) for x in row] for row in g]
    if abs(_det(rows)) != 1:
        raise GeometryError("transform matrix is not unimodular")
    return RationalPolytope.from_vertices(
        [
            tuple(sum(Fraction(a) * b for a, b in zip(row, p)) for row in rows)
            for p in P.vertices
        ]
    )


def is_in_positive_chamber(P: RationalPolytope) -> bool:
    """True when every vertex has strictly positive coordinates."""
    return all(x > 0 for p in P.vertices for x in p)
