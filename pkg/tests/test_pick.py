"""Lattice-sum asymptotics harness: exact sums, fits and decay checks."""
import math
from fractions import Fraction

from kstab.polynomial import MultivariatePolynomial as Poly
from kstab.polytope import RationalPolytope, facet_lattice_count, facet_measure
from kstab.pick import pick_check, pick_fit, pick_sum
from kstab.quadrature import boundary_integral, integral_polytope
from kstab.rootsystem import weyl_polynomial
from kstab.futaki import weighted_count_dk
from conftest import slanted_facet_index


def test_pick_sum_unit_interval_constant():
    P = RationalPolytope.from_vertices([[0], [1]])
    one = Poly.constant(1, 1)
    for k in (1, 2, 5, 9):
        assert pick_sum(P, one, k) == k + 1


def test_pick_sum_square_closed_form(unit_square):
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    h = x * x + y * y
    for k in range(1, 9):
        expected = (
            Fraction(2, 3) * k**2 + Fraction(5, 3) * k + Fraction(4, 3) + Fraction(1, 3 * k)
        )
        assert pick_sum(unit_square, h, k) == expected
        # independent double-sum oracle
        brute = Fraction(
            sum(i * i + j * j for i in range(k + 1) for j in range(k + 1)), k * k
        )
        assert pick_sum(unit_square, h, k) == brute


def test_pick_sum_interval_x(interval_12):
    x = Poly.variable(1, 0)
    for k in (1, 2, 3, 8):
        assert pick_sum(interval_12, x, k) == Fraction(3 * k + 3, 2)


def test_pick_fit_exact_coefficients(unit_square):
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    h = x * x + y * y
    fit = pick_fit(unit_square, h, ks=(2, 4, 8, 16))
    assert fit.exact
    assert fit.c_top == integral_polytope(h, unit_square) == Fraction(2, 3)
    assert fit.c_next == boundary_integral(h, unit_square) / 2 == Fraction(5, 3)
    for k, r in zip(fit.ks, fit.residuals):
        assert r == Fraction(4, 3) + Fraction(1, 3 * k)


def test_pick_check_square(unit_square):
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    passed, fit = pick_check(unit_square, x * x + y * y, ks=(4, 8, 16, 32, 64))
    assert passed
    assert not fit.informational


def test_pick_check_interval_exact_zero_residual(interval_12):
    passed, fit = pick_check(interval_12, Poly.variable(1, 0), ks=(4, 8, 16, 32))
    assert passed
    assert all(r == 0 for r in fit.residuals)


def test_pick_check_triangle(triangle_23):
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    h = (x + y) * (x + y)
    passed, fit = pick_check(triangle_23, h, ks=(4, 8, 16, 32, 64))
    assert passed
    assert fit.c_top == integral_polytope(h, triangle_23)
    assert fit.c_next == boundary_integral(h, triangle_23) / 2


def test_pick_callback_least_squares(unit_square):
    h = lambda p: math.exp(p[0] + p[1])
    passed, fit = pick_check(unit_square, h, ks=(8, 16, 32, 64, 128))
    assert passed
    assert not fit.exact
    expected = (math.e - 1.0) ** 2  # int over the square of e^(x+y)
    assert abs(fit.c_top - expected) < 0.02 * expected


def test_pick_check_fails_on_noise():
    # deterministic per-point noise has no two-term expansion; the decay
    # check must report failure rather than silently pass
    P = RationalPolytope.from_vertices([[0], [1]])
    noise = lambda p: (p[0] * 12345.6789) % 1.0
    passed, fit = pick_check(P, noise, ks=(4, 8, 16, 32, 64))
    assert passed is False
    assert not fit.exact


def test_pick_nonconvex_informational(unit_square):
    x = Poly.variable(2, 0)
    passed, fit = pick_check(unit_square, -(x * x), ks=(4, 8, 16, 32), convex=False)
    assert fit.informational
    assert isinstance(passed, bool)


def test_pick_consistency_with_weighted_counts(rs_a1, rs_a2, interval_12, square_11_22):
    # d_k equals the pick sum of q(k x) over the refined lattice, up to denom
    for rs, P in [(rs_a1, interval_12), (rs_a2, square_11_22)]:
        q = weyl_polynomial(rs)
        for k in (1, 2, 3, 4):
            scaled = q.scale_vars(k)
            assert weighted_count_dk(rs, P, k) == pick_sum(P, scaled, k) / rs.denom


def test_lemma5_limit_shared_with_polytope(triangle_23):
    i = slanted_facet_index(triangle_23)
    sigma = facet_measure(triangle_23, i)
    vals = [Fraction(facet_lattice_count(triangle_23, i, k), k) for k in (8, 16, 32, 64)]
    errs = [abs(v - sigma) for v in vals]
    for e1, e2 in zip(errs, errs[1:]):
        assert 0.3 <= float(e2 / e1) <= 0.7


def test_pick_fit_serialization(unit_square):
    x = Poly.variable(2, 0)
    fit = pick_fit(unit_square, x, ks=(2, 4, 8))
    data = fit.to_json_dict()
    assert data["k"] == [2, 4, 8]
    assert Fraction(data["c_top"]) == fit.c_top
