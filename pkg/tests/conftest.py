"""Shared geometry and root-system fixtures for the test suite."""
import pytest

from kstab.polytope import PiecewiseAffine, RationalPolytope
from kstab.rootsystem import build_classical


@pytest.fixture(scope="session")
def interval_12():
    return RationalPolytope.from_vertices([[1], [2]])


@pytest.fixture(scope="session")
def interval_13():
    return RationalPolytope.from_vertices([[1], [3]])


@pytest.fixture(scope="session")
def unit_square():
    return RationalPolytope.from_vertices([[0, 0], [1, 0], [0, 1], [1, 1]])


@pytest.fixture(scope="session")
def square_11_22():
    """Integer square inside the open positive quadrant."""
    return RationalPolytope.from_vertices([[1, 1], [2, 1], [1, 2], [2, 2]])


@pytest.fixture(scope="session")
def triangle_23():
    """conv{0, 2 e1, 3 e2}: coprime slanted facet."""
    return RationalPolytope.from_vertices([[0, 0], [2, 0], [0, 3]])


@pytest.fixture(scope="session")
def simplex_235():
    """conv{0, 2 e1, 3 e2, 5 e3}: pairwise coprime stretched simplex."""
    return RationalPolytope.from_vertices([[0, 0, 0], [2, 0, 0], [0, 3, 0], [0, 0, 5]])


@pytest.fixture(scope="session")
def rs_a1():
    return build_classical("A", 1)


@pytest.fixture(scope="session")
def rs_a2():
    return build_classical("A", 2)


@pytest.fixture(scope="session")
def f_identity():
    """f(x) = x on the line."""
    return PiecewiseAffine.from_pieces([((1,), 0)])


@pytest.fixture(scope="session")
def f_kink():
    """f(x) = max(0, 2x - 3), kink at 3/2."""
    return PiecewiseAffine.from_pieces([((0,), 0), ((2,), -3)])


@pytest.fixture(scope="session")
def f_max_xy():
    """f(x, y) = max(x, y), kink along the diagonal."""
    return PiecewiseAffine.from_pieces([((1, 0), 0), ((0, 1), 0)])


def slanted_facet_index(P):
    """Index of the facet whose inward normal has all entries negative."""
    for i, (v, _) in enumerate(P.facets):
        if all(x < 0 for x in v):
            return i
    raise AssertionError("no slanted facet found")
