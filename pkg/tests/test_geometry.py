import pytest

from congestion.geometry import (UnboundedError, affine_hull_dimension,
                                 boxed_section, contains_point, intersect,
                                 is_empty, poly_equal, project,
                                 relint_point_poly, vertices)
from congestion.linprog import make_poly, satisfies
from congestion.rationals import Q, ZERO


def square(side=1):
    return make_poly(("x", "y"), ineq_rows=[
        ((1, 0), side), ((0, 1), side), ((-1, 0), 0), ((0, -1), 0)])


def test_is_empty():
    assert not is_empty(square())
    empty = make_poly(("x",), ineq_rows=[((1,), 0), ((-1,), -1)])
    assert is_empty(empty)


def test_project_triangle_to_segment():
    tri = make_poly(("x", "y"), ineq_rows=[
        ((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)])
    seg = project(tri, ("x",))
    assert seg.variables == ("x",)
    assert satisfies(seg, (ZERO,))
    assert satisfies(seg, (Q(1),))
    assert not satisfies(seg, (Q(2),))
    assert not satisfies(seg, (Q(-1),))


def test_project_drops_equality_variable():
    poly = make_poly(("x", "y"), eq_rows=[((1, -1), 0)],
                     ineq_rows=[((1, 0), 3), ((-1, 0), 0)])
    seg = project(poly, ("y",))
    assert satisfies(seg, (Q(2),))
    assert not satisfies(seg, (Q(4),))


def test_affine_hull_dimension():
    implicit, dim = affine_hull_dimension(square())
    assert (implicit, dim) == ([], 2)
    edge = intersect(square(), eq_rows=[((Q(1), ZERO), Q(1))])
    assert affine_hull_dimension(edge)[1] == 1
    point = intersect(edge, eq_rows=[((ZERO, Q(1)), Q(1))])
    assert affine_hull_dimension(point)[1] == 0
    empty = make_poly(("x",), ineq_rows=[((1,), 0), ((-1,), -1)])
    assert affine_hull_dimension(empty) == ([], -1)


def test_implicit_equality_lowers_dimension():
    # x <= 0 and x >= 0 written as inequalities still give a segment
    poly = make_poly(("x", "y"), ineq_rows=[
        ((1, 0), 0), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 0)])
    implicit, dim = affine_hull_dimension(poly)
    assert dim == 1
    assert set(implicit) == {0, 1}


def test_poly_equal_modulo_representation():
    a = square()
    b = make_poly(("x", "y"), ineq_rows=[
        ((2, 0), 2), ((0, 3), 3), ((-5, 0), 0), ((0, -1), 0),
        ((1, 1), 5)])  # redundant row
    assert poly_equal(a, b)
    assert not poly_equal(a, square(2))


def test_vertices_of_square():
    verts = vertices(square())
    assert sorted(verts) == [
        (ZERO, ZERO), (ZERO, Q(1)), (Q(1), ZERO), (Q(1), Q(1))]


def test_vertices_unbounded():
    ray = make_poly(("x",), ineq_rows=[((-1,), 0)])
    with pytest.raises(UnboundedError):
        vertices(ray)


def test_boxed_section():
    cone = make_poly(("lambda", "N"), ineq_rows=[((1, -1), 0), ((-1, 0), 0)])
    sec = boxed_section(cone, "lambda", Q(4))
    verts = vertices(sec)
    assert all(v[0] == 1 for v in verts)
    assert {v[1] for v in verts} == {Q(1), Q(4)}


def test_relint_point_poly():
    point = relint_point_poly(square())
    assert point is not None
    assert all(0 < c < 1 for c in point)
    empty = make_poly(("x",), ineq_rows=[((1,), 0), ((-1,), -1)])
    assert relint_point_poly(empty) is None


def test_relint_point_on_edge():
    # only the rows that can be strict are requested strict
    edge = intersect(square(), eq_rows=[((Q(1), ZERO), Q(1))])
    point = relint_point_poly(edge, strict_rows=(1, 3))
    assert point is not None
    assert point[0] == 1 and 0 < point[1] < 1
    # demanding strictness on an implicit equality row is infeasible
    assert relint_point_poly(edge) is None


def test_contains_point():
    assert contains_point(square(), (Q(1, 2), Q(1, 2)))
    assert contains_point(square(), (Q(1), Q(1)))
    assert not contains_point(square(), (Q(2), ZERO))
    edge = intersect(square(), eq_rows=[((Q(1), ZERO), Q(1))])
    assert contains_point(edge, (Q(1), Q(1, 2)))
    assert not contains_point(edge, (Q(1, 2), Q(1, 2)))


def test_intersect_adds_rows():
    half = intersect(square(), ineq_rows=[((Q(1), Q(1)), Q(1))])
    assert satisfies(half, (Q(1, 2), Q(1, 2)))
    assert not satisfies(half, (Q(1), Q(1)))
