import pytest

from cones import (GE, EQ, GT, ZeroVector, DimensionMismatch, BranchLimitExceeded, HalfSpace, Cell, SphSet, ConeV,
                   FeasibilitySystem, normalize_ray, feasible, cell_feasible, member, union, intersect, contains,
                   equal, is_empty, canonical, h_to_v, v_to_h, cone_sum, join, embed_left, preimage, image,
                   full_sphere, empty, single, subspace_cell, grid_rays, sample_rays)
from groups import CharMap
from utils import make_rng
from conftest import left_ray_set


def cell(dim, *constraints):
    return Cell(dim, [HalfSpace(normal, relation) for normal, relation in constraints])


def quadrant_cell():
    return cell(2, ((1, 0), GE), ((0, 1), GE))


def random_cell(rng, dim, bound=2):
    constraints = []
    for _ in range(rng.randint(1, 4)):
        normal = [rng.randint(-bound, bound) for _ in range(dim)]
        if any(normal):
            constraints.append(HalfSpace(normal, rng.choice([GE, GE, EQ])))
    return Cell(dim, constraints)


def random_set(rng, dim, max_cells=2):
    return SphSet(dim, [random_cell(rng, dim) for _ in range(rng.randint(1, max_cells))])


def cone_point(rng, generators):
    """Random point of the closed cone spanned by generators"""
    point = [0] * generators.dim
    for ray in generators.rays:
        weight = rng.randint(0, 3)
        point = [x + weight * y for x, y in zip(point, ray)]
    for line in generators.lineality:
        weight = rng.randint(-3, 3)
        point = [x + weight * y for x, y in zip(point, line)]
    return point


@pytest.mark.parametrize('vector, expected', [
    ([2, 4], (1, 2)),
    ([-3, 0], (-1, 0)),
    ([0, 0, 5], (0, 0, 1)),
])
def test_normalize_ray(vector, expected):
    assert normalize_ray(vector) == expected


def test_normalize_zero():
    with pytest.raises(ZeroVector):
        normalize_ray([0, 0])


def test_half_space_normalization():
    assert HalfSpace([-2, 4], EQ).normal == (1, -2)
    assert HalfSpace([-2, 4], GE).normal == (-1, 2)
    with pytest.raises(ZeroVector):
        HalfSpace([0, 0])


def test_cells_reject_strict_constraints():
    with pytest.raises(ValueError):
        Cell(2, [HalfSpace([1, 0], GT)])


def test_cell_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Cell(3, [HalfSpace([1, 0])])


@pytest.mark.parametrize('dim, constraints, expected', [
    (1, [((1,), GE), ((-1,), GE)], False),
    (2, [((1, 0), GE), ((0, 1), GE), ((1, 1), EQ)], False),
    (2, [((1, 0), GE)], True),
    (2, [((1, 0), GT), ((-1, 0), GE)], False),
    (2, [], True),
    (3, [((1, 1, 1), EQ), ((1, 0, 0), GT)], True),
    (3, [((1, 0, 0), EQ), ((0, 1, 0), EQ), ((0, 0, 1), EQ)], False),
])
def test_feasible(dim, constraints, expected):
    system = FeasibilitySystem(dim, [HalfSpace(normal, relation) for normal, relation in constraints])
    assert feasible(system) == expected


def test_member():
    s = single(quadrant_cell())
    assert member((1, 1), s)
    assert member((0, 1), s)
    assert not member((-1, 1), s)
    assert member((-1, 1), full_sphere(2))
    assert not member((1, 0), empty(2))
    with pytest.raises(ZeroVector):
        member((0, 0), s)
    with pytest.raises(DimensionMismatch):
        member((1, 0, 0), s)


def test_intersect_drops_infeasible_cells():
    right = single(cell(1, ((1,), GE)))
    left = left_ray_set()
    assert is_empty(intersect(right, left))
    axis = intersect(single(cell(2, ((1, 0), GE))), single(cell(2, ((-1, 0), GE))))
    assert equal(axis, single(subspace_cell(2, [(1, 0)])))


def test_union_and_containment():
    right = single(cell(2, ((1, 0), GE)))
    left = single(cell(2, ((-1, 0), GE)))
    assert equal(union(right, left), full_sphere(2))
    assert contains(right, single(quadrant_cell()))
    assert not contains(single(quadrant_cell()), right)
    assert contains(full_sphere(2), right)
    assert contains(right, empty(2))
    assert not contains(empty(2), right)


def test_branch_cap():
    right = single(cell(2, ((1, 0), GE)))
    left = single(cell(2, ((-1, 0), GE)))
    with pytest.raises(BranchLimitExceeded):
        contains(union(right, left), full_sphere(2), branch_cap=0)


def test_canonical_drops_empty_cells():
    s = SphSet(2, [quadrant_cell(), cell(2, ((1, 0), EQ), ((0, 1), EQ))])
    assert canonical(s).cells == (quadrant_cell(),)
    assert equal(canonical(s), s)


def test_h_to_v_quadrant():
    generators = h_to_v(quadrant_cell())
    assert generators.rays == ((0, 1), (1, 0))
    assert generators.lineality == ()


def test_h_to_v_full_and_line():
    assert len(h_to_v(Cell(3)).lineality) == 3
    line = h_to_v(subspace_cell(2, [(1, -1)]))
    assert line.rays == ()
    assert [tuple(abs(x) for x in l) for l in line.lineality] == [(1, 1)]


def test_double_description_round_trip():
    rng = make_rng(11)
    for _ in range(200):
        c = random_cell(rng, rng.randint(2, 4))
        assert equal(single(v_to_h(h_to_v(c))), single(c))


def test_cone_sum():
    x_ray = single(cell(2, ((0, 1), EQ), ((1, 0), GE)))
    y_ray = single(cell(2, ((1, 0), EQ), ((0, 1), GE)))
    assert equal(cone_sum(x_ray, y_ray), single(quadrant_cell()))
    assert cone_sum(empty(2), y_ray) == y_ray
    assert cone_sum(x_ray, empty(2)) == x_ray
    opposite = single(cell(2, ((0, 1), EQ), ((-1, 0), GE)))
    assert equal(cone_sum(x_ray, opposite), single(subspace_cell(2, [(0, 1)])))


def test_join_identities():
    assert equal(join(full_sphere(1), full_sphere(1)), full_sphere(2))
    left = left_ray_set()
    assert equal(join(left, empty(1)), single(cell(2, ((-1, 0), GE), ((0, 1), EQ))))
    assert equal(join(left, empty(1)), embed_left(left, 1))
    assert is_empty(join(empty(2), empty(1)))


def test_join_membership_law():
    rng = make_rng(5)
    a = single(quadrant_cell())
    b = left_ray_set()
    joined = join(a, b)
    for ray in sample_rays(3, rng, 1000, bound=3):
        u, v = ray[:2], ray[2:]
        if not any(u):
            expected = member(v, b)
        elif not any(v):
            expected = member(u, a)
        else:
            expected = member(u, a) and member(v, b)
        assert member(ray, joined) == expected, ray


def test_join_membership_law_random_pairs():
    rng = make_rng(23)
    for _ in range(10):
        a, b = random_set(rng, 2), random_set(rng, 2)
        joined = join(a, b)
        for ray in sample_rays(4, rng, 100, bound=3):
            u, v = ray[:2], ray[2:]
            if not any(u):
                expected = member(v, b)
            elif not any(v):
                expected = member(u, a)
            else:
                expected = member(u, a) and member(v, b)
            assert member(ray, joined) == expected, (a, b, ray)


def test_join_is_symmetric_under_block_swap():
    rng = make_rng(37)
    for _ in range(10):
        m, n = rng.randint(1, 2), rng.randint(1, 2)
        a, b = random_set(rng, m), random_set(rng, n)
        swap = [[1 if j == (i + m) % (m + n) else 0 for j in range(m + n)] for i in range(m + n)]
        assert equal(image(join(a, b), swap), join(b, a)), (a, b)


def test_intersect_against_member():
    rng = make_rng(41)
    for _ in range(5):
        dim = rng.randint(2, 3)
        a, b = random_set(rng, dim), random_set(rng, dim)
        both = intersect(a, b)
        for ray in sample_rays(dim, rng, 100, bound=4):
            assert member(ray, both) == (member(ray, a) and member(ray, b)), (a, b, ray)


def test_contains_against_sampling():
    rng = make_rng(43)
    outcomes = set()
    for index in range(20):
        dim = rng.randint(2, 3)
        a = random_set(rng, dim)
        b = intersect(a, random_set(rng, dim)) if index % 2 else random_set(rng, dim)
        decided = contains(a, b)
        outcomes.add(decided)
        escaped = [ray for ray in sample_rays(dim, rng, 1000, bound=4) if member(ray, b) and not member(ray, a)]
        if decided:
            assert not escaped, (a, b, escaped[:3])
        if escaped:
            assert not decided
    assert outcomes == {True, False}


def test_cone_sum_contains_sums_of_generators():
    rng = make_rng(47)
    for _ in range(20):
        dim = rng.randint(2, 4)
        a, b = single(random_cell(rng, dim)), single(random_cell(rng, dim))
        total = cone_sum(a, b)
        generators_a, generators_b = h_to_v(a.cells[0]), h_to_v(b.cells[0])
        for _ in range(10):
            point = [x + y for x, y in zip(cone_point(rng, generators_a), cone_point(rng, generators_b))]
            if any(point):
                assert member(point, total), (a, b, point)


def test_cone_sum_is_commutative_and_associative():
    rng = make_rng(53)
    for _ in range(8):
        dim = rng.randint(2, 3)
        a, b, c = random_set(rng, dim), random_set(rng, dim), random_set(rng, dim)
        assert equal(cone_sum(a, b), cone_sum(b, a)), (a, b)
        assert equal(cone_sum(cone_sum(a, b), c), cone_sum(a, cone_sum(b, c))), (a, b, c)


def test_preimage():
    pulled = preimage(single(cell(1, ((1,), GE))), CharMap([[1, 1]]))
    assert pulled.dim == 2
    assert member((1, 0), pulled)
    assert member((1, -1), pulled)
    assert not member((-1, 0), pulled)


def test_image():
    projected = image(single(quadrant_cell()), CharMap([[1, 0], [0, 0]]))
    assert equal(projected, single(cell(2, ((0, 1), EQ), ((1, 0), GE))))
    embedded = image(left_ray_set(), CharMap([[1], [1]]))
    assert equal(embedded, single(cell(2, ((1, -1), EQ), ((-1, 0), GE))))


def test_feasible_against_grid():
    rng = make_rng(3)
    for _ in range(50):
        dim = rng.randint(2, 3)
        c = random_cell(rng, dim)
        hit = any(c.holds(ray) for ray in grid_rays(dim, 8))
        assert cell_feasible(c) == hit, c


def test_grid_rays():
    assert grid_rays(1, 3) == [(-1,), (1,)]
    assert len(grid_rays(2, 1)) == 8
    assert all(r != (0, 0) for r in grid_rays(2, 2))


def test_sample_rays_are_seeded():
    assert sample_rays(3, make_rng(1), 20) == sample_rays(3, make_rng(1), 20)
    assert all(any(r) for r in sample_rays(2, make_rng(2), 50, bound=1))


def test_cone_v_dimension_check():
    with pytest.raises(DimensionMismatch):
        ConeV(2, rays=[(1, 0, 0)])
