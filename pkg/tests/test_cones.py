import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import int_vectors
from reference import box, cone_contains, dot, is_primitive
from toricroots.cones import (
    MAX_RANK,
    NotStronglyConvexError,
    Polytope,
    RationalCone,
    UnboundedError,
    dual_cone,
    extremal_rays,
    facet_group_generators,
    first_success,
    is_strongly_convex,
    lattice_points,
    orthogonal_sublattice,
    recession_cone,
    relative_interior_point,
)
from toricroots.linalg import lattice_basis

cone = RationalCone.from_generators


def generator_lists(max_rank=3, bound=3, max_count=4):
    return st.integers(1, max_rank).flatmap(
        lambda n: st.lists(int_vectors(n, bound), min_size=0, max_size=max_count).map(
            lambda gs: (n, [g for g in gs if any(g)])))


# --- duality ---------------------------------------------------------------------


def test_dual_of_orthant_is_orthant():
    assert dual_cone(cone([(1, 0), (0, 1)])) == cone([(1, 0), (0, 1)])


def test_dual_of_a1_cone():
    assert dual_cone(cone([(0, 1), (2, -1)])).rays == ((1, 0), (1, 2))


def test_dual_of_zero_cone_is_plane():
    whole = dual_cone(RationalCone.from_generators([], 2))
    assert whole == RationalCone.whole_space(2)
    assert whole.dim == 2 and not whole.is_strongly_convex


def test_rank_guard():
    with pytest.raises(ValueError):
        dual_cone(RationalCone.from_generators([], MAX_RANK + 1))


@given(generator_lists(max_rank=4, bound=2, max_count=5))
def test_double_dual_is_identity(args):
    n, gens = args
    c = cone(gens, n)
    assert dual_cone(dual_cone(c)) == c


@given(generator_lists(max_rank=3, bound=2, max_count=4))
def test_dual_matches_brute_force_membership(args):
    n, gens = args
    c = cone(gens, n)
    d = dual_cone(c)
    for u in box(n, 2):
        assert d.contains(u) == all(dot(u, g) >= 0 for g in gens)


@given(generator_lists(max_rank=3, bound=2, max_count=4))
def test_generators_and_inequalities_describe_one_set(args):
    n, gens = args
    c = cone(gens, n)
    for x in box(n, 2):
        assert c.contains(x) == cone_contains(gens, x, n)


@given(generator_lists(max_rank=3, bound=3, max_count=4))
def test_canonical_form(args):
    n, gens = args
    c = cone(gens, n)
    assert list(c.rays) == sorted(set(c.rays))
    assert all(is_primitive(r) for r in c.rays)
    assert cone(list(reversed(gens)) + [tuple(2 * a for a in g) for g in gens], n) == c


# --- extremal rays and convexity --------------------------------------------------


def test_extremal_rays_examples():
    assert extremal_rays(cone([(1, 0), (0, 1), (1, 1)])) == [(0, 1), (1, 0)]
    assert extremal_rays(cone([(1, 0)])) == [(1, 0)]
    with pytest.raises(NotStronglyConvexError):
        extremal_rays(RationalCone.from_inequalities([(1, 0)], 2))


def test_is_strongly_convex_examples():
    assert is_strongly_convex(cone([(1, 0), (0, 1)]))
    assert not is_strongly_convex(RationalCone.from_inequalities([(1, 0)], 2))
    assert is_strongly_convex(cone([(1, 0), (1, 2)]))


@given(generator_lists(max_rank=3, bound=3, max_count=4))
def test_strong_convexity_matches_lineality(args):
    n, gens = args
    c = cone(gens, n)
    line = any(c.contains(x) and c.contains(tuple(-a for a in x)) for x in box(n, 2) if any(x))
    assert c.is_strongly_convex == (not line)


@given(generator_lists(max_rank=3, bound=3, max_count=4))
def test_pointed_rays_are_extremal(args):
    n, gens = args
    c = cone(gens, n)
    assume(c.is_strongly_convex)
    for r in c.rays:
        others = [s for s in c.rays if s != r]
        assert not cone(others, n).contains(r)


@given(generator_lists(max_rank=3, bound=3, max_count=4))
def test_full_dimensional_dual_round_trip(args):
    n, gens = args
    sigma = cone(gens, n)
    assume(sigma.is_strongly_convex and sigma.dim == n)
    assert dual_cone(sigma).dual().rays == sigma.rays
    assert dual_cone(sigma).is_strongly_convex


# --- sublattices and interior points -----------------------------------------------


def test_orthogonal_sublattice_examples():
    assert orthogonal_sublattice([(1, 0)]) == ((0, 1),)
    assert orthogonal_sublattice([(2, -1)]) == ((1, 2),)
    assert orthogonal_sublattice([], 2) == ((1, 0), (0, 1))


@given(st.integers(1, 4).flatmap(lambda n: st.lists(int_vectors(n, 4), min_size=0, max_size=3).map(
    lambda vs: (n, vs))))
def test_orthogonal_sublattice_is_saturated(args):
    n, vs = args
    basis = orthogonal_sublattice(vs, n)
    assert all(dot(b, v) == 0 for b in basis for v in vs)
    members = [m for m in box(n, 2) if all(dot(m, v) == 0 for v in vs)] if n <= 3 else []
    if basis:
        for m in members:
            assert lattice_basis(list(basis) + [m], n) == lattice_basis(basis, n)
    else:
        assert members in ([], [(0,) * n])


def test_relative_interior_point_examples():
    assert relative_interior_point(cone([(1, 0), (0, 1)])) == (1, 1)
    assert relative_interior_point(cone([(0, 1)])) == (0, 1)
    assert relative_interior_point(cone([(1, 0), (1, 2)])) == (2, 2)
    with pytest.raises(ValueError):
        relative_interior_point(cone([], 2))


@given(generator_lists(max_rank=3, bound=3, max_count=4))
def test_relative_interior_point_is_interior(args):
    n, gens = args
    c = cone(gens, n)
    assume(not c.is_zero)
    p = relative_interior_point(c)
    assert c.contains_relative_interior(p)
    # strictly inside every inequality that is not an equality of the cone
    for h in c.inequalities:
        if any(dot(h, r) for r in c.rays):
            assert dot(h, p) > 0


# --- polyhedra ---------------------------------------------------------------------


def test_recession_cone_examples():
    rc = recession_cone([((1, 0), 1), ((0, 1), -2)], [], 2)
    assert rc == cone([(1, 0), (0, 1)])
    slab = recession_cone([((0, 1), 0)], [((1, 0), -1)], 2)
    assert slab == cone([(0, 1)])
    triangle = [((1, 0), 0), ((0, 1), 0), ((-1, -1), -2)]
    assert recession_cone(triangle, [], 2).is_zero


def test_recession_cone_of_empty_set_rejected():
    with pytest.raises(ValueError):
        recession_cone([((1, 0), 1), ((-1, 0), 0)], [], 2)


@given(generator_lists(max_rank=3, bound=3, max_count=3), st.data())
def test_recession_cone_of_translated_cone(args, data):
    n, gens = args
    c = cone(gens, n)
    b = data.draw(int_vectors(n, 5))
    ineqs = [(h, dot(h, b)) for h in c.inequalities]
    assert recession_cone(ineqs, [], n) == c


def test_lattice_points_examples():
    triangle = Polytope(2, (((1, 0), 0), ((0, 1), 0), ((-1, -1), -2)))
    assert len(lattice_points(triangle)) == 6
    point = Polytope(2, (((1, 0), 0), ((0, 1), 0), ((-1, -1), 0)))
    assert lattice_points(point) == [(0, 0)]
    empty = Polytope(2, (((1, 0), 1), ((-1, 0), 0)))
    assert empty.is_empty and lattice_points(empty) == []


def test_unbounded_polytope_rejected_with_direction():
    with pytest.raises(UnboundedError) as info:
        Polytope(2, (((1, 0), 0), ((0, 1), 0)))
    d = info.value.direction
    assert d[0] >= 0 and d[1] >= 0 and any(d)


@st.composite
def bounded_polytopes(draw):
    n = draw(st.integers(1, 3))
    ineqs = [(tuple(int(i == j) for j in range(n)), draw(st.integers(-6, 0))) for i in range(n)]
    ineqs += [(tuple(-int(i == j) for j in range(n)), -draw(st.integers(0, 6))) for i in range(n)]
    for _ in range(draw(st.integers(0, 3))):
        ineqs.append((draw(int_vectors(n, 3)), draw(st.integers(-8, 8))))
    eqs = []
    if n > 1 and draw(st.booleans()):
        eqs.append((draw(int_vectors(n, 3)), draw(st.integers(-4, 4))))
    return n, ineqs, eqs


@given(bounded_polytopes())
def test_lattice_points_match_box_filter(args):
    n, ineqs, eqs = args
    p = Polytope(n, tuple(ineqs), tuple(eqs))
    naive = sorted(x for x in box(n, 6)
                   if all(dot(a, x) >= b for a, b in ineqs) and all(dot(c, x) == d for c, d in eqs))
    assert lattice_points(p) == naive


# --- facet generators ----------------------------------------------------------------


def test_facet_group_generators_examples():
    a2_dual = cone([(1, 0), (0, 1)])
    assert facet_group_generators(a2_dual, (1, 0)) == [(0, 1)]
    a1_dual = cone([(1, 0), (1, 2)])
    assert facet_group_generators(a1_dual, (2, -1)) == [(1, 2)]
    orthant = cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    gens = facet_group_generators(orthant, (1, 0, 0))
    assert lattice_basis(gens, 3) == lattice_basis([(0, 1, 0), (0, 0, 1)], 3)


@given(generator_lists(max_rank=3, bound=2, max_count=4))
def test_facet_generators_span_facet_lattice(args):
    n, gens = args
    sigma = cone(gens, n)
    assume(sigma.is_strongly_convex and not sigma.is_zero)
    sigma_dual = sigma.dual()
    for v in sigma.rays:
        out = facet_group_generators(sigma_dual, v)
        for m in out:
            assert sigma_dual.contains(m) and dot(m, v) == 0
        assert lattice_basis(out, n) == lattice_basis(orthogonal_sublattice([v], n), n)


def test_first_success_finds_least_value():
    for threshold in [1, 2, 3, 7, 64, 1000]:
        assert first_success(lambda t: t >= threshold) == threshold
    assert first_success(lambda t: t >= 0, start=0) == 0
