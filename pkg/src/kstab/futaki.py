"""Futaki invariant of piecewise-linear degenerations, two independent ways.

The closed form assembles exact integrals of the weight density p, its
gradient sum q_{N-1} and the boundary measure:

    F1 = -(1/(2 Vol_W)) ( int_P f f_G W dmu
                          + int_bd f W dsigma - a int_P f W dmu ),

with W = p, f_G W = q_{N-1} / ratio and the average scalar curvature

    a = 2 ( int_P q_{N-1} dmu + 1/2 int_bd p dsigma ) / int_P p dmu.

The oracle never touches those integrals: it enumerates weighted lattice
point counts d_k and weighted weights w_k over dilates of the polytope,
interpolates them exactly as polynomials in k, and reads

    F(k) = w_k / (k d_k) = F0 + F1 / k + ...   =>   F1 = (BC - AD) / C^2

from the leading coefficients. Exact agreement of the two routes is the
package's primary self-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polynomial import as_fraction, format_fraction
from .polytope import (
    GeometryError,
    PiecewiseAffine,
    RationalPolytope,
    dilated_lattice_points,
    is_in_positive_chamber,
    lift_polytope,
    pl_cells,
)
from .quadrature import (
    boundary_integral,
    boundary_integral_pl_poly,
    integral_polytope,
    integral_pl_poly,
)
from .rootsystem import (
    QN1_PFG_RATIO,
    RootSystem,
    dh_weight,
    dh_weight_gradient_sum,
    weyl_eval,
)


class AmplenessError(ValueError):
    """The moment polytope leaves the open positive chamber."""


def _require_positive_chamber(P: RationalPolytope) -> None:
    if not is_in_positive_chamber(P):
        bad = next(p for p in P.vertices if any(x <= 0 for x in p))
        raise AmplenessError(
            "polytope must lie in the open positive chamber; vertex %s does not"
            % (tuple(map(str, bad)),)
        )


def _require_match(rs: RootSystem, P: RationalPolytope) -> None:
    if rs.rank != P.dim:
        raise ValueError("root system rank %d != polytope dimension %d" % (rs.rank, P.dim))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def volume_w(rs: RootSystem, P: RationalPolytope) -> Fraction:
    """Weighted volume int_P W dmu (exact)."""
    _require_match(rs, P)
    _require_positive_chamber(P)
    return integral_polytope(dh_weight(rs), P)


def average_scalar(rs: RootSystem, P: RationalPolytope) -> Fraction:
    """Average scalar curvature: the same for every metric in the class."""
    _require_match(rs, P)
    _require_positive_chamber(P)
    if not P.is_integer:
        raise GeometryError("the boundary term needs an integer polytope")
    p = dh_weight(rs)
    q1 = dh_weight_gradient_sum(rs)
    bulk = integral_polytope(q1, P)
    bd = boundary_integral(p, P)
    return 2 * (bulk + bd / 2) / integral_polytope(p, P)


def futaki_closed_form(
    rs: RootSystem, P: RationalPolytope, f: PiecewiseAffine
) -> Fraction:
    """Exact Futaki invariant of the degeneration encoded by convex PL f."""
    _require_match(rs, P)
    _require_positive_chamber(P)
    if not P.is_integer:
        raise GeometryError("the boundary term needs an integer polytope")
    p = dh_weight(rs)
    q1 = dh_weight_gradient_sum(rs)
    a = average_scalar(rs, P)
    bracket = (
        integral_pl_poly(f, q1, P) / QN1_PFG_RATIO
        + boundary_integral_pl_poly(f, p, P)
        - a * integral_pl_poly(f, p, P)
    )
    return -bracket / (2 * integral_polytope(p, P))


# ---------------------------------------------------------------------------
# lattice-count oracle
# ---------------------------------------------------------------------------

def weighted_count_dk(
    rs: RootSystem, P: RationalPolytope, k: int, threads: int = 1
) -> Fraction:
    """d_k: dimension of sections at level k, by direct lattice enumeration."""
    _require_match(rs, P)
    total = 0
    for lam in dilated_lattice_points(P, k, threads=threads):
        total += weyl_eval(rs, lam)
    return Fraction(total, rs.denom)


def admissible_modulus(f: PiecewiseAffine, P: RationalPolytope, R=None) -> int:
    """Smallest progression step m such that w_k is a polynomial on k in m Z.

    Clears the denominators of the PL coefficients, of R, and of the vertices
    of the subdivision of P into single-piece cells: those vertices are where
    the lattice sums change shape, and each scaled cell must be an integer
    polytope for the sampled weight sum to interpolate exactly.
    """
    dens = [f.denominator_lcm]
    if R is not None:
        dens.append(as_fraction(R).denominator)
    for _, cell in pl_cells(P, f):
        for v in cell.vertices:
            dens.extend(x.denominator for x in v)
    return math.lcm(*dens)


def weighted_weight_wk(
    rs: RootSystem,
    P: RationalPolytope,
    f: PiecewiseAffine,
    R,
    k: int,
    threads: int = 1,
) -> Fraction:
    """w_k: total weight sum_lambda q(lambda) k (R - f(lambda/k)) / denom."""
    _require_match(rs, P)
    R = as_fraction(R)
    m = admissible_modulus(f, P, R)
    if k % m:
        raise ValueError("k=%d is not a multiple of the admissible modulus %d" % (k, m))
    total = Fraction(0)
    for lam in dilated_lattice_points(P, k, threads=threads):
        kf = max(
            sum(a_j * l for a_j, l in zip(a, lam)) + k * b for a, b in f.pieces
        )
        total += weyl_eval(rs, lam) * (k * R - kf)
    return total / rs.denom


def wk_via_lift(
    rs: RootSystem,
    P: RationalPolytope,
    f: PiecewiseAffine,
    R,
    k: int,
    threads: int = 1,
) -> Fraction:
    """w_k recomputed as a lattice count over the lifted polytope.

    Counts weighted points of the k-dilate of the region between the graph of
    R - f and the base, then removes the base layer. Equality with the direct
    sum needs every weight k(R - f(lambda/k)) to be an integer, so the PL
    gradients must be integer vectors here (scale f if they are not).
    """
    _require_match(rs, P)
    R = as_fraction(R)
    for a, _ in f.pieces:
        if any(x.denominator != 1 for x in a):
            raise ValueError(
                "lift-based weights need integer PL gradients; scale f first"
            )
    m = math.lcm(admissible_modulus(f, P), R.denominator)
    if k % m:
        raise ValueError("k=%d is not a multiple of the admissible modulus %d" % (k, m))
    Q = lift_polytope(P, f, R)
    n = P.dim
    total = 0
    for mu in dilated_lattice_points(Q, k, threads=threads):
        total += weyl_eval(rs, mu[:n])
    return Fraction(total, rs.denom) - weighted_count_dk(rs, P, k, threads=threads)


# ---------------------------------------------------------------------------
# exact interpolation and the cross-check report
# ---------------------------------------------------------------------------

def interpolate_coefficients(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients (low to high) of the unique interpolating polynomial."""
    n = len(xs)
    if len(ys) != n or len(set(xs)) != n:
        raise ValueError("need distinct sample points with matching values")
    # Newton divided differences, then expansion to the monomial basis.
    coef = [as_fraction(y) for y in ys]
    pts = [as_fraction(x) for x in xs]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (pts[i] - pts[i - j])
    out = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - pts[i]) + coef[i]
        new = [Fraction(0)] * n
        for d in range(n - 1):
            new[d + 1] += out[d]
        for d in range(n):
            new[d] -= pts[i] * out[d]
        new[0] += coef[i]
        out = new
    return out


def _poly_value(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(list(coeffs)):
        total = total * x + c
    return total


@dataclass(frozen=True)
class EhrhartFit:
    """Interpolated count and weight polynomials with extracted leaders."""

    ks: tuple[int, ...]
    d_values: tuple[Fraction, ...]
    w_values: tuple[Fraction, ...]
    d_coeffs: tuple[Fraction, ...]  # d(k), degree N + n
    w_coeffs: tuple[Fraction, ...]  # w(k), degree N + n + 1
    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction
    F0: Fraction
    F1: Fraction

    def to_json_dict(self) -> dict:
        return {
            "k": list(self.ks),
            "d_k": [format_fraction(v) for v in self.d_values],
            "w_k": [format_fraction(v) for v in self.w_values],
            "d_poly": [format_fraction(c) for c in self.d_coeffs],
            "w_poly": [format_fraction(c) for c in self.w_coeffs],
            "A": format_fraction(self.A),
            "B": format_fraction(self.B),
            "C": format_fraction(self.C),
            "D": format_fraction(self.D),
            "F0": format_fraction(self.F0),
            "F1": format_fraction(self.F1),
        }


def ehrhart_fit(
    rs: RootSystem,
    P: RationalPolytope,
    f: PiecewiseAffine,
    R,
    samples: Sequence[int] | None = None,
    threads: int = 1,
) -> EhrhartFit:
    """Fit d(k) and w(k) exactly from lattice sums and extract F0, F1.

    Samples must be distinct multiples of the admissible modulus; defaults to
    the first N + n + 3 of them. Held-out samples are predicted exactly or
    the fit is rejected.
    """
    _require_match(rs, P)
    _require_positive_chamber(P)
    R = as_fraction(R)
    N, n = rs.num_positive_roots, rs.rank
    m = admissible_modulus(f, P, R)
    if samples is None:
        samples = [m * t for t in range(1, N + n + 4)]
    ks = sorted(int(k) for k in samples)
    if len(set(ks)) != len(ks) or len(ks) < N + n + 3:
        raise ValueError("need at least N + n + 3 distinct sample dilations")
    if any(k % m for k in ks):
        raise ValueError("all samples must be multiples of the admissible modulus %d" % m)
    d_vals = [weighted_count_dk(rs, P, k, threads=threads) for k in ks]
    w_vals = [weighted_weight_wk(rs, P, f, R, k, threads=threads) for k in ks]

    deg_d, deg_w = N + n, N + n + 1
    d_coeffs = interpolate_coefficients(
        [Fraction(k) for k in ks[: deg_d + 1]], d_vals[: deg_d + 1]
    )
    # w(k) is only polynomial along the sampled progression; interpolate in
    # t = k/m and rescale the coefficients back to the k variable.
    w_t = interpolate_coefficients(
        [Fraction(k, m) for k in ks[: deg_w + 1]], w_vals[: deg_w + 1]
    )
    w_coeffs = [c / Fraction(m) ** j for j, c in enumerate(w_t)]
    for k, dv, wv in zip(ks, d_vals, w_vals):
        if _poly_value(d_coeffs, Fraction(k)) != dv:
            raise ArithmeticError("count interpolation failed at held-out k=%d" % k)
        if _poly_value(w_coeffs, Fraction(k)) != wv:
            raise ArithmeticError("weight interpolation failed at held-out k=%d" % k)

    A = w_coeffs[deg_w] if len(w_coeffs) > deg_w else Fraction(0)
    B = w_coeffs[deg_w - 1]
    C = d_coeffs[deg_d] if len(d_coeffs) > deg_d else Fraction(0)
    D = d_coeffs[deg_d - 1]
    if C == 0:
        raise ArithmeticError("degenerate fit: vanishing leading count coefficient")
    pad_d = tuple(d_coeffs) + (Fraction(0),) * (deg_d + 1 - len(d_coeffs))
    pad_w = tuple(w_coeffs) + (Fraction(0),) * (deg_w + 1 - len(w_coeffs))
    return EhrhartFit(
        ks=tuple(ks),
        d_values=tuple(d_vals),
        w_values=tuple(w_vals),
        d_coeffs=pad_d,
        w_coeffs=pad_w,
        A=A,
        B=B,
        C=C,
        D=D,
        F0=A / C,
        F1=(B * C - A * D) / (C * C),
    )


@dataclass(frozen=True)
class FutakiReport:
    """Closed form versus oracle, with exact agreement as the verdict."""

    vol_W: Fraction
    a: Fraction
    F1_closed: Fraction
    F1_oracle: Fraction | None
    oracle_details: EhrhartFit | None
    agreement: bool | None

    def to_json_dict(self) -> dict:
        return {
            "vol_W": format_fraction(self.vol_W),
            "a": format_fraction(self.a),
            "F1_closed": format_fraction(self.F1_closed),
            "F1_oracle": None
            if self.F1_oracle is None
            else format_fraction(self.F1_oracle),
            "oracle_details": None
            if self.oracle_details is None
            else self.oracle_details.to_json_dict(),
            "agreement": self.agreement,
        }


def futaki_cross_check(
    rs: RootSystem,
    P: RationalPolytope,
    f: PiecewiseAffine,
    R,
    kmax: int | None = None,
    threads: int = 1,
) -> FutakiReport:
    """Run both routes; the oracle is repeated at a shifted R.

    F1 must not depend on the headroom constant R, so the fit runs at R and
    R + 1 and both leading extractions must coincide with the closed form.
    """
    R = as_fraction(R)
    closed = futaki_closed_form(rs, P, f)
    N, n = rs.num_positive_roots, rs.rank

    def sample_list(Rv) -> list[int] | None:
        if kmax is None:
            return None
        m = admissible_modulus(f, P, Rv)
        count = max(N + n + 3, kmax // m)
        return [m * t for t in range(1, count + 1)]

    fit = ehrhart_fit(rs, P, f, R, samples=sample_list(R), threads=threads)
    fit_shift = ehrhart_fit(rs, P, f, R + 1, samples=sample_list(R + 1), threads=threads)
    agreement = closed == fit.F1 == fit_shift.F1
    return FutakiReport(
        vol_W=volume_w(rs, P),
        a=average_scalar(rs, P),
        F1_closed=closed,
        F1_oracle=fit.F1,
        oracle_details=fit,
        agreement=agreement,
    )
