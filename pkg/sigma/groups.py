"""
Finitely generated group descriptors, their abelianizations and the character spaces
of X(G) and nu(G).
Words are lists of signed 1-based generator indices: [2, 1, -2] stands for t a t^-1
when the generators are [a, t].
"""
import re
import logging

from fractions import Fraction
from sympy import ImmutableMatrix, Rational, eye, zeros

from cones import full_sphere, empty, equal, contains, subspace_cell, as_fraction

Z = 'z'
HTPY = 'htpy'
FIELD_Q = 'q'
COEFFICIENTS = [Z, HTPY, FIELD_Q]

FLAG_NAMES = ['is_fg', 'is_fp2', 'is_fp', 'gprime_ab_fg', 'gprime_fg', 'is_nonabelian_limit_group']


class IllFormedWord(ValueError):
    pass


class UnknownCatalogEntry(ValueError):
    pass


class InvalidSigmaData(ValueError):
    pass


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_columns(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, target, source, factor):
    # row[target] += factor * row[source]
    m[target] = [a + factor * b for a, b in zip(m[target], m[source])]


def _add_column(m, target, source, factor):
    for row in m:
        row[target] += factor * row[source]


def smith_normal_form(matrix, columns=None):
    """
    Computes the Smith normal form of an integer matrix.
    :param matrix: List of integer rows
    :param columns: Column count (needed when the matrix has no rows)
    :return: Tuple (U, D, V) of integer matrices with U * matrix * V = D, U and V unimodular,
             D diagonal with nonnegative entries each dividing the next
    """
    d = [[int(x) for x in row] for row in matrix]
    m = len(d)
    n = len(d[0]) if m > 0 else (columns or 0)
    u = identity_matrix(m)
    v = identity_matrix(n)
    t = 0
    while t < min(m, n):
        entries = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j] != 0]
        if not entries:
            break
        _, i, j = min(entries)
        _swap_rows(d, t, i)
        _swap_rows(u, t, i)
        _swap_columns(d, t, j)
        _swap_columns(v, t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                q = d[i][t] // d[t][t]
                if q:
                    _add_row(d, i, t, -q)
                    _add_row(u, i, t, -q)
                if d[i][t] != 0:
                    _swap_rows(d, t, i)
                    _swap_rows(u, t, i)
                    done = False
                    break
            if not done:
                continue
            for j in range(t + 1, n):
                q = d[t][j] // d[t][t]
                if q:
                    _add_column(d, j, t, -q)
                    _add_column(v, j, t, -q)
                if d[t][j] != 0:
                    _swap_columns(d, t, j)
                    _swap_columns(v, t, j)
                    done = False
                    break
            if not done:
                continue
            offending = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                              if d[i][j] % d[t][t] != 0), None)
            if offending is not None:
                _add_row(d, t, offending[0], 1)
                _add_row(u, t, offending[0], 1)
                done = False
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


def check_word(word, generator_count):
    for letter in word:
        if not isinstance(letter, int) or letter == 0 or abs(letter) > generator_count:
            raise IllFormedWord('Letter {} of word {} does not name one of {} generators'
                                .format(letter, word, generator_count))


def exponent_sums(word, generator_count):
    check_word(word, generator_count)
    sums = [0] * generator_count
    for letter in word:
        sums[abs(letter) - 1] += 1 if letter > 0 else -1
    return sums


def abelianize(generators, relators):
    """
    Computes free rank, torsion and the projection of every generator to the free part of G^ab.
    :return: Tuple (ab_rank, torsion, ab_projection)
    """
    k = len(generators)
    exponents = [exponent_sums(word, k) for word in relators]
    _, d, v = smith_normal_form(exponents, columns=k)
    diagonal = [d[i][i] for i in range(min(len(d), k))]
    rank = sum(1 for x in diagonal if x != 0)
    torsion = [x for x in diagonal if x > 1]
    projection = [[v[i][j] for j in range(rank, k)] for i in range(k)]
    logging.debug('Abelianized {} generators and {} relators: rank {}, torsion {}'
                  .format(k, len(relators), k - rank, torsion))
    return k - rank, torsion, projection


class GroupDescriptor(object):
    def __init__(self, name, generators, relators=(), flags=None, ab_projection=None):
        """
        Describes a finitely generated group by a presentation and finiteness flags.
        :param name: Display name
        :param generators: List of generator symbols
        :param relators: List of words
        :param flags: Dict of tri-state flags (True, False or None for unknown)
        :param ab_projection: Explicit generator images in Z^ab_rank (computed via Smith normal form if omitted)
        """
        self.name = name
        self.generators = list(generators)
        self.relators = [list(word) for word in relators]
        rank, torsion, projection = abelianize(self.generators, self.relators)
        if ab_projection is not None:
            ab_projection = [[int(x) for x in row] for row in ab_projection]
            self._check_projection(ab_projection, rank)
            projection = ab_projection
        self.ab_rank = rank
        self.torsion = torsion
        self.ab_projection = projection
        self.flags = {flag: None for flag in FLAG_NAMES}
        for flag, value in (flags or {}).items():
            if flag not in self.flags:
                raise ValueError('Unknown flag "{}"'.format(flag))
            if not (isinstance(value, bool) or value is None):
                raise ValueError('Flag "{}" has to be true, false or unknown'.format(flag))
            self.flags[flag] = value

    def _check_projection(self, projection, rank):
        if len(projection) != len(self.generators) or any(len(row) != rank for row in projection):
            raise ValueError('Projection of group "{}" has to be a {}x{} matrix'
                             .format(self.name, len(self.generators), rank))
        if rank > 0 and ImmutableMatrix(projection).rank() != rank:
            raise ValueError('Projection of group "{}" does not reach the full free part'.format(self.name))
        for word in self.relators:
            image = word_image(projection, word, rank)
            if any(image):
                raise ValueError('Projection of group "{}" does not kill relator {}'.format(self.name, word))

    def flag(self, name):
        return self.flags[name]

    def __repr__(self):
        return 'GroupDescriptor({}, rank {})'.format(self.name, self.ab_rank)


def word_image(projection, word, rank):
    image = [0] * rank
    for letter in word:
        sign = 1 if letter > 0 else -1
        for j in range(rank):
            image[j] += sign * projection[abs(letter) - 1][j]
    return image


def evaluate_character(group, chi, word):
    """Value of the character chi (coordinates in Q^ab_rank) on a word"""
    check_word(word, len(group.generators))
    image = word_image(group.ab_projection, word, group.ab_rank)
    return sum(as_fraction(c) * x for c, x in zip(chi, image))


class CharMap(object):
    """Exact rational linear map between character spaces, applied as chi -> M chi"""
    def __init__(self, matrix, rows=None, cols=None):
        if isinstance(matrix, ImmutableMatrix):
            self.matrix = matrix
        elif len(matrix) == 0:
            self.matrix = ImmutableMatrix(zeros(rows or 0, cols or 0))
        else:
            self.matrix = ImmutableMatrix([[Rational(str(as_fraction(x))) for x in row] for row in matrix])

    @property
    def source_dim(self):
        return self.matrix.cols

    @property
    def target_dim(self):
        return self.matrix.rows

    def to_lists(self):
        return [[Fraction(int(x.p), int(x.q)) for x in self.matrix.row(i)] for i in range(self.matrix.rows)]

    def apply(self, chi):
        image = self.matrix * ImmutableMatrix([Rational(str(as_fraction(x))) for x in chi])
        return [Fraction(int(x.p), int(x.q)) for x in image]

    def compose(self, other):
        """self after other"""
        return CharMap(self.matrix * other.matrix)

    def __eq__(self, other):
        return isinstance(other, CharMap) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return 'CharMap({})'.format(self.matrix.tolist())


def identity_map(n):
    return CharMap(ImmutableMatrix(eye(n)))


def block_map(blocks):
    """CharMap assembled from a grid of integer blocks given as nested lists of sympy matrices"""
    return CharMap(ImmutableMatrix(ImmutableMatrix.vstack(*[ImmutableMatrix.hstack(*row) for row in blocks])))


def induced_char_map(phi, source, target):
    """
    Pull back of characters along the homomorphism given by generator images.
    :param phi: One word in the target generators per source generator
    :param source: GroupDescriptor of the domain
    :param target: GroupDescriptor of the codomain
    :return: CharMap from Q^target.ab_rank to Q^source.ab_rank with (phi* chi)(s) = chi(phi(s))
    """
    if len(phi) != len(source.generators):
        raise IllFormedWord('Expected {} generator images, got {}'.format(len(source.generators), len(phi)))
    for word in phi:
        check_word(word, len(target.generators))
    images = [word_image(target.ab_projection, word, target.ab_rank) for word in phi]
    p = ImmutableMatrix(source.ab_projection) if source.ab_rank > 0 else None
    if p is None or target.ab_rank == 0:
        return CharMap([], rows=source.ab_rank, cols=target.ab_rank)
    b = ImmutableMatrix(images)
    m = (p.T * p).inv() * p.T * b
    if p * m != b:
        raise ValueError('Generator images do not define a homomorphism on abelianizations')
    return CharMap(ImmutableMatrix(m))


class SigmaData(object):
    """Complements of the Sigma-invariants of a group, keyed by (n, coefficient)"""
    def __init__(self, owner, complements=None):
        if owner.ab_rank < 1:
            raise InvalidSigmaData('Group "{}" has no characters (free rank 0)'.format(owner.name))
        self.owner = owner
        self.complements = {}
        sigma1 = None
        for (n, coeff), sphset in (complements or {}).items():
            if n not in (1, 2) or coeff not in COEFFICIENTS:
                raise InvalidSigmaData('Unsupported invariant key ({}, {})'.format(n, coeff))
            if sphset.dim != owner.ab_rank:
                raise InvalidSigmaData('Complement ({}, {}) has dimension {}, expected {}'
                                       .format(n, coeff, sphset.dim, owner.ab_rank))
            if n == 1:
                if sigma1 is not None and not equal(sigma1, sphset):
                    raise InvalidSigmaData('Sigma^1 complements differ between coefficients')
                sigma1 = sphset
            else:
                self.complements[(n, coeff)] = sphset
        if sigma1 is not None:
            self.complements[(1, Z)] = sigma1

    @property
    def dim(self):
        return self.owner.ab_rank

    def complement(self, n, coeff=Z):
        """Stored complement or None; Sigma^0 is the whole sphere for finitely generated groups"""
        if n == 0:
            return empty(self.dim)
        if n == 1:
            return self.complements.get((1, Z))
        return self.complements.get((n, coeff))

    def keys(self):
        return sorted(self.complements.keys())


def validate_sigma_data(data):
    """
    Checks the inclusions Sigma^2 in Sigma^1, Sigma^2(G) in Sigma^2(G,Z) and Sigma^2(G,Z) in Sigma^2(G,Q)
    on the stored complements.
    """
    sigma1 = data.complement(1)
    checks = []
    for coeff in COEFFICIENTS:
        sigma2 = data.complement(2, coeff)
        if sigma1 is not None and sigma2 is not None:
            checks.append(('Sigma^2({}) in Sigma^1'.format(coeff), sigma2, sigma1))
    pairs = [(HTPY, Z), (Z, FIELD_Q)]
    for bigger, smaller in pairs:
        big, small = data.complement(2, bigger), data.complement(2, smaller)
        if big is not None and small is not None:
            checks.append(('Sigma^2({}) in Sigma^2({})'.format(bigger, smaller), big, small))
    for description, bigger_complement, smaller_complement in checks:
        if not contains(bigger_complement, smaller_complement):
            raise InvalidSigmaData('Group "{}" violates {}'.format(data.owner.name, description))
    return data


def w_finitely_generated(group):
    """
    Finite generation of W(G) as far as known criteria decide it: G of type FP_2 with G'/G''
    finitely generated, or with G' finitely generated. Never answers False.
    """
    if group.flag('is_fp2') and (group.flag('gprime_ab_fg') or group.flag('gprime_fg')):
        return True
    return None


class XGSpace(object):
    """Character space of X(G): chi = (chi_1, chi_2) in Q^n x Q^n"""
    def __init__(self, base):
        n = base.ab_rank
        if n < 1:
            raise InvalidSigmaData('Group "{}" has no characters (free rank 0)'.format(base.name))
        self.base = base
        self.n = n
        self.dim = 2 * n
        i, o = ImmutableMatrix(eye(n)), ImmutableMatrix(zeros(n, n))
        self.c1 = block_map([[i, o]])
        self.c2 = block_map([[o, i]])
        self.pi1_star = block_map([[i], [o]])
        self.pi2_star = block_map([[o], [i]])
        self.pi3_star = block_map([[i], [i]])
        self.rho_star = block_map([[i, i, o], [o, i, i]])
        self.diag_cell = subspace_cell(self.dim, [_difference_normal(n, j) for j in range(n)])

    def pi_star(self, i):
        return [self.pi1_star, self.pi2_star, self.pi3_star][i - 1]

    def kernel_cell(self, i):
        """Cell of characters vanishing on Ker(pi_i), i.e. the image of pi_i*"""
        n = self.n
        if i == 1:
            return subspace_cell(self.dim, [_block_unit(n, 1, j) for j in range(n)])
        if i == 2:
            return subspace_cell(self.dim, [_block_unit(n, 0, j) for j in range(n)])
        return self.diag_cell

    def block_zero_cell(self, block):
        """Cell {chi_1 = 0} for block 0 and {chi_2 = 0} for block 1"""
        return subspace_cell(self.dim, [_block_unit(self.n, block, j) for j in range(self.n)])

    def identities_hold(self):
        identity = identity_map(self.n)
        return (self.c1.compose(self.pi1_star) == identity
                and self.c2.compose(self.pi2_star) == identity
                and self.c1.compose(self.pi3_star) == identity
                and self.c2.compose(self.pi3_star) == identity
                and self.generators_agree())

    def generators_agree(self):
        """Every character of X(G) evaluates to chi_1 on the generators of G and to chi_2 on their copies"""
        xg = xg_descriptor(self.base)
        k = len(self.base.generators)
        for j in range(self.dim):
            chi = [1 if i == j else 0 for i in range(self.dim)]
            chi_1, chi_2 = self.c1.apply(chi), self.c2.apply(chi)
            for s in range(1, k + 1):
                if evaluate_character(xg, chi, [s]) != evaluate_character(self.base, chi_1, [s]):
                    return False
                if evaluate_character(xg, chi, [s + k]) != evaluate_character(self.base, chi_2, [s]):
                    return False
        return True


def _block_unit(n, block, j):
    return tuple(1 if k == block * n + j else 0 for k in range(2 * n))


def _difference_normal(n, j):
    return tuple(1 if k == j else (-1 if k == n + j else 0) for k in range(2 * n))


def xg_space(group):
    space = XGSpace(group)
    if not space.identities_hold():
        raise InvalidSigmaData('Character maps of X({}) do not match its generators'.format(group.name))
    return space


def xg_descriptor(group):
    """
    Abelianization-level presentation of X(G): generators g and their copies g', the relators
    of G on both copies and the commutators [g, g'] of paired generators. Characters are
    coordinatized block-wise so that pi_i* take their block shapes.
    """
    k = len(group.generators)
    generators = group.generators + [g + "'" for g in group.generators]
    shifted = [[letter + k if letter > 0 else letter - k for letter in word] for word in group.relators]
    commutators = [[i, i + k, -i, -(i + k)] for i in range(1, k + 1)]
    n = group.ab_rank
    projection = [list(row) + [0] * n for row in group.ab_projection]
    projection.extend([0] * n + list(row) for row in group.ab_projection)
    flags = {'is_fg': group.flag('is_fg')}
    return GroupDescriptor('X({})'.format(group.name), generators, group.relators + shifted + commutators,
                           flags=flags, ab_projection=projection)


# Built-in catalog

CATALOG_FAMILIES = {
    'free': 'free(k): free group of rank k >= 2 - Sigma^1 and Sigma^2 complements are the full sphere',
    'free_abelian': 'free_abelian(n): Z^n - every complement is empty',
    'nonabelian_limit_placeholder': 'nonabelian_limit_placeholder(n): non-abelian limit group with free '
                                    'abelianization rank n - full-sphere complements',
    'bs': 'bs(1,m): Baumslag-Solitar group <a, t | t a t^-1 = a^m> - Sigma^1 complement only if supplied',
}

CATALOG_NAME = re.compile(r'^\s*([a-z_]+)\s*\(\s*(\d+)\s*(?:,\s*(-?\d+)\s*)?\)\s*$')


def _symbols(prefix, count):
    return ['{}{}'.format(prefix, i) for i in range(1, count + 1)]


def _all_complements(sphset):
    return {(1, Z): sphset, (2, Z): sphset, (2, HTPY): sphset, (2, FIELD_Q): sphset}


def catalog_lookup(name, sigma1_complement=None):
    """
    Looks up a built-in catalog entry.
    :param name: Entry name like "free(2)", "free_abelian(3)" or "bs(1,2)"
    :param sigma1_complement: Optional user supplied Sigma^1 complement (only used for bs(1,m))
    :return: Tuple (GroupDescriptor, SigmaData or None when the entry carries no characters)
    """
    match = CATALOG_NAME.match(name)
    if match is None or match.group(1) not in CATALOG_FAMILIES:
        raise UnknownCatalogEntry('Unknown catalog entry "{}" - known families: {}'
                                  .format(name, ', '.join(sorted(CATALOG_FAMILIES.keys()))))
    family, first, second = match.group(1), int(match.group(2)), match.group(3)
    if family != 'bs' and second is not None:
        raise UnknownCatalogEntry('Catalog family "{}" takes one parameter'.format(family))
    if family == 'free':
        if first < 2:
            raise UnknownCatalogEntry('free(k) needs rank k >= 2')
        flags = {'is_fg': True, 'is_fp2': True, 'is_fp': True, 'gprime_ab_fg': False, 'gprime_fg': False,
                 'is_nonabelian_limit_group': True}
        group = GroupDescriptor('free({})'.format(first), _symbols('x', first), flags=flags)
        return group, SigmaData(group, _all_complements(full_sphere(first)))
    if family == 'free_abelian':
        if first < 1:
            raise UnknownCatalogEntry('free_abelian(n) needs n >= 1')
        relators = [[i, j, -i, -j] for i in range(1, first + 1) for j in range(i + 1, first + 1)]
        flags = {flag: True for flag in FLAG_NAMES}
        flags['is_nonabelian_limit_group'] = False
        group = GroupDescriptor('free_abelian({})'.format(first), _symbols('x', first), relators, flags=flags)
        return group, SigmaData(group, _all_complements(empty(first)))
    if family == 'nonabelian_limit_placeholder':
        if first < 2:
            raise UnknownCatalogEntry('Non-abelian limit groups have abelianization rank >= 2')
        flags = {'is_fg': True, 'is_fp2': True, 'is_fp': True, 'gprime_fg': False, 'is_nonabelian_limit_group': True}
        group = GroupDescriptor('nonabelian_limit_placeholder({})'.format(first), _symbols('g', first), flags=flags)
        return group, SigmaData(group, _all_complements(full_sphere(first)))
    if first != 1 or second is None:
        raise UnknownCatalogEntry('Only bs(1,m) is part of the catalog')
    m = int(second)
    flags = {'is_fg': True, 'is_fp2': True, 'is_fp': True, 'gprime_ab_fg': abs(m) == 1,
             'gprime_fg': abs(m) == 1, 'is_nonabelian_limit_group': False}
    power = [-1] * m if m >= 0 else [1] * -m
    group = GroupDescriptor('bs(1,{})'.format(m), ['a', 't'], [[2, 1, -2] + power], flags=flags)
    complements = {}
    if sigma1_complement is not None:
        complements[(1, Z)] = sigma1_complement
    if group.ab_rank < 1:
        return group, None
    return group, SigmaData(group, complements)


def catalog_names():
    return sorted(CATALOG_FAMILIES.items())
