"""
Exact rational geometry of spherical polyhedra.

A point of a character sphere is a ray, represented by a primitive integer vector.
A closed rationally defined spherical polyhedron (SphSet) is a finite union of cells,
each cell being the set of nonzero vectors of a closed polyhedral cone given by
half-spaces <v,x> >= 0 and hyperplanes <v,x> = 0 with integer normals.
All arithmetic is carried out on Python integers and fractions.Fraction; cone conversions
run through cdd in exact fraction mode.
"""
import os
import logging
import itertools

import cdd

from math import gcd
from functools import reduce
from fractions import Fraction

GE = 'ge'
EQ = 'eq'
GT = 'gt'
RELATIONS = [GE, EQ, GT]
RELATION_ORDER = {EQ: 0, GE: 1, GT: 2}

DEFAULT_BRANCH_CAP = int(os.getenv('SIGMA_BRANCH_CAP', 10 ** 6))


class ZeroVector(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class BranchLimitExceeded(RuntimeError):
    pass


def vector_gcd(v):
    return reduce(gcd, (abs(int(x)) for x in v), 0)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def integral(v):
    """
    Scales a rational vector by the least common multiple of its denominators.
    :param v: Sequence of int, Fraction or sympy Rational entries
    :return: Tuple of ints pointing in the same direction
    """
    v = [as_fraction(x) for x in v]
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // gcd(lcm, x.denominator)
    return tuple(int(x * lcm) for x in v)


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if hasattr(x, 'q') and hasattr(x, 'p'):
        return Fraction(int(x.p), int(x.q))
    return Fraction(x)


def primitive(v):
    v = integral(v)
    g = vector_gcd(v)
    if g == 0:
        return v
    return tuple(x // g for x in v)


class RayPoint(tuple):
    """Primitive nonzero integer vector representing the point [chi] of a character sphere"""
    def __new__(cls, coords):
        coords = tuple(int(x) for x in coords)
        if not any(coords):
            raise ZeroVector('A ray needs a nonzero vector')
        if vector_gcd(coords) != 1:
            raise ValueError('Ray coordinates {} are not primitive'.format(coords))
        return super().__new__(cls, coords)

    @property
    def dim(self):
        return len(self)


def normalize_ray(v):
    if not any(v):
        raise ZeroVector('Unable to normalize the zero vector')
    return RayPoint(primitive(v))


def _check_dim(expected, actual, what='vector'):
    if expected != actual:
        raise DimensionMismatch('Expected {} of dimension {}, got {}'.format(what, expected, actual))


class HalfSpace(object):
    def __init__(self, normal, relation=GE):
        if relation not in RELATIONS:
            raise ValueError('Unknown relation "{}"'.format(relation))
        normal = primitive(normal)
        if not any(normal):
            raise ZeroVector('Half-space normals have to be nonzero')
        if relation == EQ:
            # v and -v describe the same hyperplane
            lead = next(x for x in normal if x != 0)
            if lead < 0:
                normal = tuple(-x for x in normal)
        self.normal = normal
        self.relation = relation

    @property
    def dim(self):
        return len(self.normal)

    def value(self, x):
        return dot(self.normal, x)

    def holds(self, x):
        value = self.value(x)
        if self.relation == GE:
            return value >= 0
        if self.relation == GT:
            return value > 0
        return value == 0

    def negations(self):
        """Half-spaces whose union is the complement of this closed constraint"""
        if self.relation == GE:
            return [HalfSpace(tuple(-x for x in self.normal), GT)]
        if self.relation == EQ:
            return [HalfSpace(self.normal, GT), HalfSpace(tuple(-x for x in self.normal), GT)]
        raise ValueError('Strict inequalities are never negated')

    def padded(self, before=0, after=0):
        return HalfSpace((0,) * before + self.normal + (0,) * after, self.relation)

    def key(self):
        return RELATION_ORDER[self.relation], self.normal

    def __eq__(self, other):
        return isinstance(other, HalfSpace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return 'HalfSpace({}, {})'.format(list(self.normal), self.relation)


class Cell(object):
    """Nonzero vectors of the closed cone {x : all constraints hold}; no constraints means the full sphere"""
    def __init__(self, dim, constraints=()):
        if dim < 1:
            raise ValueError('Cells live in dimension >= 1')
        unique = set()
        for constraint in constraints:
            _check_dim(dim, constraint.dim, what='normal')
            if constraint.relation == GT:
                raise ValueError('Stored cells only carry closed constraints')
            unique.add(constraint)
        self.dim = dim
        self.constraints = tuple(sorted(unique, key=HalfSpace.key))

    def holds(self, x):
        return all(constraint.holds(x) for constraint in self.constraints)

    def padded(self, before=0, after=0):
        constraints = [c.padded(before=before, after=after) for c in self.constraints]
        for i in list(range(before)) + list(range(before + self.dim, before + self.dim + after)):
            constraints.append(HalfSpace(unit(before + self.dim + after, i), EQ))
        return Cell(before + self.dim + after, constraints)

    def key(self):
        return tuple(c.key() for c in self.constraints)

    def __eq__(self, other):
        return isinstance(other, Cell) and self.dim == other.dim and self.key() == other.key()

    def __hash__(self):
        return hash((self.dim, self.key()))

    def __repr__(self):
        return 'Cell({}, {})'.format(self.dim, list(self.constraints))


class SphSet(object):
    """Finite union of cells of one character sphere; no cells means the empty set"""
    def __init__(self, dim, cells=()):
        if dim < 1:
            raise ValueError('Spherical sets live in dimension >= 1')
        for cell in cells:
            _check_dim(dim, cell.dim, what='cell')
        self.dim = dim
        self.cells = tuple(sorted(set(cells), key=Cell.key))

    def is_empty_union(self):
        return len(self.cells) == 0

    def __eq__(self, other):
        return isinstance(other, SphSet) and self.dim == other.dim and self.cells == other.cells

    def __hash__(self):
        return hash((self.dim, self.cells))

    def __repr__(self):
        return 'SphSet({}, {} cells)'.format(self.dim, len(self.cells))


class ConeV(object):
    """Generator description of a closed cone: nonnegative combinations of rays plus the span of lineality"""
    def __init__(self, dim, rays=(), lineality=()):
        rays = [primitive(r) for r in rays]
        lineality = [primitive(l) for l in lineality]
        for v in rays + lineality:
            _check_dim(dim, len(v), what='generator')
        self.dim = dim
        self.rays = tuple(sorted(set(r for r in rays if any(r))))
        self.lineality = tuple(l for l in lineality if any(l))

    def __repr__(self):
        return 'ConeV({}, rays={}, lineality={})'.format(self.dim, list(self.rays), list(self.lineality))


class FeasibilitySystem(object):
    def __init__(self, dim, constraints=()):
        constraints = list(constraints)
        for constraint in constraints:
            _check_dim(dim, constraint.dim, what='normal')
        self.dim = dim
        self.constraints = constraints


def unit(dim, i, sign=1):
    return tuple(sign if j == i else 0 for j in range(dim))


def full_sphere(dim):
    return SphSet(dim, [Cell(dim)])


def empty(dim):
    return SphSet(dim)


def subspace_cell(dim, normals):
    """Cell {x : <v,x> = 0 for every given normal}"""
    return Cell(dim, [HalfSpace(v, EQ) for v in normals if any(v)])


def single(cell):
    return SphSet(cell.dim, [cell])


# Fourier-Motzkin elimination
#
# A row (coeffs, const, relation) stands for <coeffs, x> + const (>= | = | >) 0 with
# primitive integer coefficients and a Fraction constant.


def _make_row(coeffs, const, relation):
    g = vector_gcd(coeffs)
    if g == 0:
        return (tuple(coeffs), Fraction(const), relation)
    coeffs = tuple(c // g for c in coeffs)
    const = Fraction(const) / g
    if relation == EQ:
        lead = next(c for c in coeffs if c != 0)
        if lead < 0:
            coeffs = tuple(-c for c in coeffs)
            const = -const
    return coeffs, const, relation


def _constant_holds(const, relation):
    if relation == GE:
        return const >= 0
    if relation == GT:
        return const > 0
    return const == 0


def _reduce_rows(rows):
    """
    Normalizes rows, checks constant rows and drops rows dominated by a parallel row.
    :return: Reduced list of rows or None if a contradiction was detected
    """
    equalities = {}
    inequalities = {}
    for coeffs, const, relation in rows:
        coeffs, const, relation = _make_row(coeffs, const, relation)
        if not any(coeffs):
            if not _constant_holds(const, relation):
                return None
            continue
        if relation == EQ:
            if coeffs in equalities and equalities[coeffs] != const:
                return None
            equalities[coeffs] = const
            continue
        if coeffs in inequalities:
            old_const, old_relation = inequalities[coeffs]
            # smaller constant is the stronger bound; GT wins ties
            if const < old_const or (const == old_const and relation == GT):
                inequalities[coeffs] = (const, relation)
        else:
            inequalities[coeffs] = (const, relation)
    for coeffs, (const, relation) in inequalities.items():
        opposite = tuple(-c for c in coeffs)
        if opposite in inequalities:
            other_const, other_relation = inequalities[opposite]
            total = const + other_const
            if total < 0 or (total == 0 and GT in (relation, other_relation)):
                return None
    reduced = [(coeffs, const, EQ) for coeffs, const in equalities.items()]
    reduced.extend((coeffs, const, relation) for coeffs, (const, relation) in inequalities.items())
    reduced.sort(key=lambda r: (RELATION_ORDER[r[2]], r[0], r[1]))
    return reduced


def _substitute(row, pivot, j):
    coeffs, const, relation = row
    p_coeffs, p_const, _ = pivot
    a = p_coeffs[j]
    factor = abs(a)
    sign = 1 if a > 0 else -1
    r = coeffs[j]
    new_coeffs = tuple(factor * c - sign * r * pc for c, pc in zip(coeffs, p_coeffs))
    return new_coeffs, factor * const - sign * r * p_const, relation


def _combine(pos, neg, j):
    p_coeffs, p_const, p_rel = pos
    n_coeffs, n_const, n_rel = neg
    a, b = p_coeffs[j], -n_coeffs[j]
    coeffs = tuple(b * pc + a * nc for pc, nc in zip(p_coeffs, n_coeffs))
    relation = GT if GT in (p_rel, n_rel) else GE
    return coeffs, b * p_const + a * n_const, relation


def _fm_feasible(rows, dim):
    rows = _reduce_rows(rows)
    if rows is None:
        return False
    while True:
        pivot = next((row for row in rows if row[2] == EQ), None)
        if pivot is None:
            break
        j = min((k for k in range(dim) if pivot[0][k] != 0), key=lambda k: abs(pivot[0][k]))
        substituted = [_substitute(row, pivot, j) if row[0][j] != 0 else row for row in rows if row is not pivot]
        rows = _reduce_rows(substituted)
        if rows is None:
            return False
    while rows:
        candidates = []
        for j in range(dim):
            pos = sum(1 for row in rows if row[0][j] > 0)
            neg = sum(1 for row in rows if row[0][j] < 0)
            if pos + neg > 0:
                candidates.append((pos * neg - pos - neg, j))
        if not candidates:
            break
        _, j = min(candidates)
        pos = [row for row in rows if row[0][j] > 0]
        neg = [row for row in rows if row[0][j] < 0]
        combined = [row for row in rows if row[0][j] == 0]
        combined.extend(_combine(p, n, j) for p in pos for n in neg)
        rows = _reduce_rows(combined)
        if rows is None:
            return False
        logging.debug('Eliminated variable {} - {} rows left'.format(j, len(rows)))
    return True


def feasible(system):
    """
    Decides whether a nonzero real vector satisfies every constraint of the system.
    Each sub-query anchors one coordinate with x_i >= 1 or -x_i >= 1, which loses nothing
    because all constraints are homogeneous.
    :param system: FeasibilitySystem with GE, EQ and GT constraints
    :return: True iff a nonzero solution exists
    """
    dim = system.dim
    rows = [(c.normal, 0, c.relation) for c in system.constraints]
    if _reduce_rows(rows) is None:
        return False
    for i in range(dim):
        for sign in (1, -1):
            anchor = (unit(dim, i, sign), -1, GE)
            if _fm_feasible(rows + [anchor], dim):
                return True
    return False


def cell_feasible(cell, extra=()):
    return feasible(FeasibilitySystem(cell.dim, list(cell.constraints) + list(extra)))


def member(p, s):
    _check_dim(s.dim, len(p), what='ray')
    if not any(p):
        raise ZeroVector('The origin is not a point of the sphere')
    return any(cell.holds(p) for cell in s.cells)


def _same_dim(*sets):
    for other in sets[1:]:
        _check_dim(sets[0].dim, other.dim, what='set')


def union(*sets):
    _same_dim(*sets)
    return SphSet(sets[0].dim, [cell for s in sets for cell in s.cells])


def intersect(a, b):
    _same_dim(a, b)
    cells = []
    for ca, cb in itertools.product(a.cells, b.cells):
        cell = Cell(a.dim, ca.constraints + cb.constraints)
        if cell_feasible(cell):
            cells.append(cell)
    return SphSet(a.dim, cells)


def canonical(s):
    return SphSet(s.dim, [cell for cell in s.cells if cell_feasible(cell)])


def is_empty(s):
    return not any(cell_feasible(cell) for cell in s.cells)


class _BranchCounter(object):
    def __init__(self, cap):
        self.cap = DEFAULT_BRANCH_CAP if cap is None else cap
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.cap:
            raise BranchLimitExceeded('Containment check exceeded {} branches'.format(self.cap))


def _escapes(dim, constraints, cells, k, counter):
    """True iff the region given by constraints still has a nonzero point outside cells[k:]"""
    if not feasible(FeasibilitySystem(dim, constraints)):
        return False
    while k < len(cells) and not feasible(FeasibilitySystem(dim, constraints + list(cells[k].constraints))):
        k += 1
    if k == len(cells):
        return True
    for constraint in cells[k].constraints:
        for negation in constraint.negations():
            counter.tick()
            if _escapes(dim, constraints + [negation], cells, k + 1, counter):
                return True
    return False


def contains(a, b, branch_cap=None):
    """
    Decides whether every point of b lies in a by splitting each cell of b along the
    negated constraints of the cells of a.
    :param branch_cap: Maximal number of explored branches (default: DEFAULT_BRANCH_CAP)
    """
    _same_dim(a, b)
    counter = _BranchCounter(branch_cap)
    for cell in b.cells:
        if _escapes(a.dim, list(cell.constraints), a.cells, 0, counter):
            return False
    logging.debug('Containment decided after {} branches'.format(counter.count))
    return True


def equal(a, b, branch_cap=None):
    return contains(a, b, branch_cap=branch_cap) and contains(b, a, branch_cap=branch_cap)


# Double description


def _cdd_matrix(rows, linear_rows, rep_type):
    rows = [list(row) for row in rows]
    linear_rows = [list(row) for row in linear_rows]
    matrix = cdd.Matrix(rows or linear_rows, linear=not rows, number_type='fraction')
    if rows and linear_rows:
        matrix.extend(linear_rows, linear=True)
    matrix.rep_type = rep_type
    return matrix


def _split_rows(matrix, keep):
    """Splits cdd output rows accepted by keep into primitive plain and lineality vectors"""
    plain, linear = [], []
    for index in range(matrix.row_size):
        row = matrix[index]
        if not keep(row):
            continue
        v = primitive(row[1:])
        if any(v):
            (linear if index in matrix.lin_set else plain).append(v)
    return sorted(set(plain)), sorted(set(linear))


def h_to_v(cell):
    """
    Converts a cell into rays and a lineality basis generating its closed cone (double description).
    """
    dim = cell.dim
    if not cell.constraints:
        return ConeV(dim, [], [unit(dim, i) for i in range(dim)])
    inequalities = [(0,) + c.normal for c in cell.constraints if c.relation != EQ]
    equalities = [(0,) + c.normal for c in cell.constraints if c.relation == EQ]
    matrix = _cdd_matrix(inequalities, equalities, cdd.RepType.INEQUALITY)
    # rows with a leading 1 are vertices and the only vertex of a cone is the origin
    rays, lineality = _split_rows(cdd.Polyhedron(matrix).get_generators(), lambda row: row[0] == 0)
    return ConeV(dim, rays, lineality)


def v_to_h(cone):
    """Converts generators into a closed cell"""
    origin = (1,) + (0,) * cone.dim
    rays = [origin] + [(0,) + tuple(r) for r in cone.rays]
    lineality = [(0,) + tuple(l) for l in cone.lineality]
    matrix = _cdd_matrix(rays, lineality, cdd.RepType.GENERATOR)
    ge, eq = _split_rows(cdd.Polyhedron(matrix).get_inequalities(), lambda row: row[0] == 0)
    return Cell(cone.dim, [HalfSpace(v, GE) for v in ge] + [HalfSpace(v, EQ) for v in eq])


def cone_sum(a, b):
    """Minkowski sum of the cones over a and b; the cone over the empty set is the origin"""
    _same_dim(a, b)
    if not a.cells:
        return b
    if not b.cells:
        return a
    generators_a = [h_to_v(cell) for cell in a.cells]
    generators_b = [h_to_v(cell) for cell in b.cells]
    cells = []
    for va, vb in itertools.product(generators_a, generators_b):
        cells.append(v_to_h(ConeV(a.dim, va.rays + vb.rays, va.lineality + vb.lineality)))
    logging.debug('Cone sum produced {} cells'.format(len(cells)))
    return SphSet(a.dim, cells)


def embed_left(s, extra):
    return SphSet(s.dim + extra, [cell.padded(after=extra) for cell in s.cells])


def embed_right(s, extra):
    return SphSet(s.dim + extra, [cell.padded(before=extra) for cell in s.cells])


def join(a, b):
    """Join of a subset of S^(m-1) and a subset of S^(n-1) inside S^(m+n-1)"""
    return cone_sum(embed_left(a, b.dim), embed_right(b, a.dim))


def _matrix_rows(matrix):
    if hasattr(matrix, 'to_lists'):
        return matrix.to_lists()
    return [[as_fraction(x) for x in row] for row in matrix]


def preimage(s, matrix):
    """
    Pulls a set back along x -> Lx. Every normal v becomes v^T L; vectors with Lx = 0 satisfy
    every pulled back constraint, so callers intersect with a subspace where that collapses.
    :param s: SphSet of dimension b
    :param matrix: CharMap or b x a rational matrix
    """
    rows = _matrix_rows(matrix)
    _check_dim(s.dim, len(rows), what='matrix row count')
    source_dim = len(rows[0]) if rows else 0
    cells = []
    for cell in s.cells:
        constraints = []
        for constraint in cell.constraints:
            pulled = [sum(constraint.normal[i] * rows[i][j] for i in range(len(rows))) for j in range(source_dim)]
            pulled = integral(pulled)
            if any(pulled):
                constraints.append(HalfSpace(pulled, constraint.relation))
        cells.append(Cell(source_dim, constraints))
    return SphSet(source_dim, cells)


def apply_matrix(rows, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in rows]


def image(s, matrix):
    """Pushes a set forward along x -> Lx by mapping generators of every cell"""
    rows = _matrix_rows(matrix)
    target_dim = len(rows)
    if rows:
        _check_dim(s.dim, len(rows[0]), what='matrix column count')
    cells = []
    for cell in s.cells:
        generators = h_to_v(cell)
        rays = [integral(apply_matrix(rows, r)) for r in generators.rays]
        lineality = [integral(apply_matrix(rows, l)) for l in generators.lineality]
        cells.append(v_to_h(ConeV(target_dim, rays, lineality)))
    return SphSet(target_dim, cells)


def grid_rays(dim, bound):
    """All primitive integer rays with entries in [-bound, bound], in lexicographic order"""
    rays = []
    for coords in itertools.product(range(-bound, bound + 1), repeat=dim):
        if any(coords) and vector_gcd(coords) == 1:
            rays.append(RayPoint(coords))
    return rays


def sample_rays(dim, rng, count, bound=10):
    rays = []
    while len(rays) < count:
        coords = [rng.randint(-bound, bound) for _ in range(dim)]
        if any(coords):
            rays.append(normalize_ray(coords))
    return rays
