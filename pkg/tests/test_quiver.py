from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import TRIANGLE
from quiverdt.errors import DimensionMismatch, NotStabilityParameter
from quiverdt.quiver import (Quiver, attractor_point, chamber_samples, divisibility, euler_form, pair, perp_basis,
                             primitive, skew_form, walls, walls_and_chamber)

K3 = Quiver.kronecker(3)


@st.composite
def quiver_and_vectors(draw, count=3):
    d = draw(st.integers(1, 4))
    arrows = tuple(tuple(draw(st.integers(0, 3)) for _ in range(d)) for _ in range(d))
    vecs = [tuple(draw(st.integers(-4, 4)) for _ in range(d)) for _ in range(count)]
    return Quiver(arrows), vecs


def test_skew_form_examples():
    assert skew_form(K3, (1, 0), (0, 1)) == 3
    assert skew_form(TRIANGLE, (1, 1, 0), (0, 0, 1)) == 2
    assert skew_form(K3, (2, 5), (2, 5)) == 0


def test_euler_form_examples():
    assert euler_form(K3, (1, 1), (1, 1)) == -1
    assert euler_form(Quiver(((0, 0), (0, 0))), (2, 3), (4, 5)) == 23
    assert euler_form(Quiver.kronecker(2), (1, 2), (1, 2)) == 1


def test_attractor_point_examples():
    assert attractor_point(K3, (1, 1)) == (-3, 3)
    assert attractor_point(Quiver.kronecker(5), (1, 0)) == (0, 5)
    assert attractor_point(K3, (0, 0)) == (0, 0)


def test_divisibility_examples():
    assert divisibility((2, 4)) == 2
    assert divisibility((1, 1)) == 1
    assert divisibility((0, 3)) == 3
    with pytest.raises(ValueError):
        divisibility((0, 0))
    assert primitive((2, 4)) == (1, 2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        skew_form(K3, (1, 0, 0), (1, 0))
    with pytest.raises(DimensionMismatch):
        Quiver(((0, 1), (0,)))


def test_loops_do_not_contribute_to_skew_form():
    q = Quiver(((2, 1), (0, 0)))
    assert skew_form(q, (1, 0), (1, 0)) == 0
    assert not q.is_acyclic


def test_acyclicity():
    assert K3.is_acyclic and TRIANGLE.is_acyclic
    assert not Quiver(((0, 1), (1, 0))).is_acyclic
    assert not Quiver(((0, 1, 0), (0, 0, 1), (1, 0, 0))).is_acyclic


@given(quiver_and_vectors())
def test_skew_form_bilinear_antisymmetric(data):
    q, (x, y, z) = data
    assert skew_form(q, x, y) == -skew_form(q, y, x)
    s = tuple(a + b for a, b in zip(x, z))
    assert skew_form(q, s, y) == skew_form(q, x, y) + skew_form(q, z, y)
    assert skew_form(q, tuple(3 * a for a in x), y) == 3 * skew_form(q, x, y)


@given(quiver_and_vectors())
def test_skew_is_antisymmetrized_euler(data):
    # with <e_i,e_j> = a_ij - a_ji and chi(x,y) = x.y - sum a_ij x_i y_j the
    # antisymmetrization comes out as chi(y,x) - chi(x,y)
    q, (x, y, _) = data
    assert skew_form(q, x, y) == euler_form(q, y, x) - euler_form(q, x, y)


@given(quiver_and_vectors(count=1))
def test_attractor_point_vanishes_on_gamma(data):
    q, (g,) = data
    assert pair(attractor_point(q, g), g) == 0


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=4).filter(any), st.integers(1, 6))
def test_divisibility_scales(g, k):
    assert divisibility([k * x for x in g]) == k * divisibility(g)


def test_kronecker_wall():
    ch = walls_and_chamber(K3, (1, 1), (1, -1))
    assert [w.normal for w in ch.walls] == [(1, 0)]
    assert ch.signs == (1,) and ch.generic


def test_no_walls_for_simple_vector():
    ch = walls_and_chamber(K3, (1, 0), (0, 5))
    assert ch.walls == () and ch.generic


def test_walls_of_2_2_collapse_to_one_locus():
    ws = walls((2, 2))
    assert len(ws) == 1
    # (1,1) is proportional to gamma and restricts to zero on gamma-perp, so it is not a wall
    assert set(ws[0].members) == {(1, 0), (0, 1), (2, 1), (1, 2)}
    assert walls_and_chamber(K3, (2, 2), (1, -1)).generic


def test_theta_must_vanish_on_gamma():
    with pytest.raises(NotStabilityParameter):
        walls_and_chamber(K3, (1, 1), (1, 0))


def test_non_generic_theta():
    ch = walls_and_chamber(TRIANGLE, (1, 1, 1), (1, -1, 0))
    assert not ch.generic
    assert (0, 0, 1) in [w.normal for w in ch.walls] or ch.violated


@pytest.mark.parametrize("g", [(1, 1, 1), (1, 2, 2), (2, 1, 1), (1, 1, 3), (1, 2)])
def test_wall_normals_primitive_and_strict(g):
    for w in walls(g):
        assert divisibility(w.normal) == 1
        assert all(0 <= a <= b for a, b in zip(w.normal, g)) and w.normal != tuple(g) and any(w.normal)


@pytest.mark.parametrize("g", [(1, 1, 1), (1, 2, 2), (3, 1, 1), (1, 2), (2, 3), (1, 0, 1)])
def test_chamber_samples_are_generic_and_sorted(g):
    samples = chamber_samples(g, per_chamber=3)
    assert samples
    for signs, thetas in samples.items():
        assert len(thetas) == 3
        for theta in thetas:
            ch = walls_and_chamber(Quiver(tuple((0,) * len(g) for _ in g)), g, theta)
            assert ch.generic and ch.signs == signs


def test_chamber_samples_triangle_count():
    # six walls through the origin of a plane cut it into twelve chambers at most
    assert 2 <= len(chamber_samples((1, 1, 1))) <= 12


def test_perp_basis():
    for g in [(1, 2, 3), (2, 2), (0, 1, 1)]:
        basis = perp_basis(g)
        assert len(basis) == len(g) - 1
        assert all(pair(b, g) == 0 for b in basis)


def test_fraction_theta_accepted():
    ch = walls_and_chamber(K3, (1, 2), (Fraction(2, 3), Fraction(-1, 3)))
    assert ch.generic
