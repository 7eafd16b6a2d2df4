import pytest

from sympy import Matrix

from cones import HalfSpace, Cell, SphSet, equal, full_sphere, empty
from groups import (Z, HTPY, FIELD_Q, IllFormedWord, UnknownCatalogEntry, InvalidSigmaData, GroupDescriptor,
                    SigmaData, CharMap, smith_normal_form, abelianize, check_word, evaluate_character,
                    induced_char_map, identity_map, validate_sigma_data, w_finitely_generated, xg_space,
                    xg_descriptor, catalog_lookup, catalog_names)
from utils import make_rng
from conftest import left_ray_set


def multiply(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def check_smith_form(a):
    u, d, v = smith_normal_form(a)
    assert multiply(multiply(u, a), v) == d
    assert abs(Matrix(u).det()) == 1
    assert abs(Matrix(v).det()) == 1
    diagonal = [d[i][i] for i in range(min(len(d), len(d[0])))]
    for i in range(len(d)):
        for j in range(len(d[0])):
            if i != j:
                assert d[i][j] == 0
    assert all(x >= 0 for x in diagonal)
    for x, y in zip(diagonal, diagonal[1:]):
        assert (x == 0 and y == 0) or (x != 0 and y % x == 0)
    return diagonal


@pytest.mark.parametrize('a, diagonal', [
    ([[2]], [2]),
    ([[1, 0], [0, 0]], [1, 0]),
    ([[2, 0], [0, 3]], [1, 6]),
    ([[-1, 0]], [1]),
    ([[4, 6], [6, 4]], [2, 10]),
])
def test_smith_normal_form_examples(a, diagonal):
    assert check_smith_form(a) == diagonal


def test_smith_normal_form_random():
    rng = make_rng(13)
    for _ in range(50):
        a = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
        diagonal = check_smith_form(a)
        determinant = abs(Matrix(a).det())
        product = 1
        for x in diagonal:
            product *= x
        assert product == determinant


def test_abelianize_free_group():
    rank, torsion, projection = abelianize(['a', 'b'], [])
    assert (rank, torsion) == (2, [])
    assert projection == [[1, 0], [0, 1]]


def test_abelianize_baumslag_solitar():
    rank, torsion, projection = abelianize(['a', 't'], [[2, 1, -2, -1, -1]])
    assert (rank, torsion) == (1, [])
    assert projection[0] == [0]
    assert abs(projection[1][0]) == 1


def test_abelianize_commutator_and_torsion():
    assert abelianize(['a', 'b'], [[1, 2, -1, -2]])[:2] == (2, [])
    assert abelianize(['a'], [[1] * 6])[:2] == (0, [6])
    assert abelianize(['a', 'b'], [[1, 1], [2, 2, 2]])[:2] == (0, [6])


def test_abelianize_tietze_invariance():
    relators = [[1, 1, 2], [2, 3, -2, -3, 3]]
    moved = [[-3, -2, 3, 2, -3][::-1], [2, 1, 1, -2, 2]]
    assert abelianize(['a', 'b', 'c'], relators)[:2] == abelianize(['a', 'b', 'c'], list(reversed(moved)))[:2]


def test_check_word():
    check_word([1, -2, 2], 2)
    for word in ([0], [3], [1, 'a']):
        with pytest.raises(IllFormedWord):
            check_word(word, 2)


def test_evaluate_character():
    group = GroupDescriptor('free(2)', ['a', 'b'])
    assert evaluate_character(group, [3, -1], [1, 1, -2]) == 7


def test_induced_char_map_identity():
    group = GroupDescriptor('free(2)', ['a', 'b'])
    assert induced_char_map([[1], [2]], group, group) == identity_map(2)


def test_induced_char_map_contract():
    rng = make_rng(17)
    source = GroupDescriptor('free(3)', ['a', 'b', 'c'])
    target = GroupDescriptor('free(2)', ['x', 'y'])
    for _ in range(20):
        phi = [[rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(1, 4))] for _ in range(3)]
        pullback = induced_char_map(phi, source, target)
        for _ in range(5):
            chi = [rng.randint(-5, 5) for _ in range(2)]
            pulled = pullback.apply(chi)
            for generator, word in enumerate(phi, 1):
                assert evaluate_character(source, pulled, [generator]) == evaluate_character(target, chi, word)


def test_induced_char_map_rejects_bad_words():
    group = GroupDescriptor('free(2)', ['a', 'b'])
    with pytest.raises(IllFormedWord):
        induced_char_map([[1], [3]], group, group)
    with pytest.raises(IllFormedWord):
        induced_char_map([[1]], group, group)


def test_xg_space_shapes():
    space = xg_space(GroupDescriptor('z', ['t']))
    assert space.dim == 2
    assert space.c1 == CharMap([[1, 0]])
    assert space.c2 == CharMap([[0, 1]])
    assert space.pi3_star == CharMap([[1], [1]])
    assert space.rho_star == CharMap([[1, 1, 0], [0, 1, 1]])


def test_xg_space_checks_generator_images():
    space = xg_space(GroupDescriptor('g', ['a', 'b', 'c'], [[1, -2]]))
    assert space.n == 2
    assert space.generators_agree()
    space.c1 = space.c2
    assert not space.generators_agree()
    assert not space.identities_hold()


@pytest.mark.parametrize('name', ['free(2)', 'free_abelian(3)', 'nonabelian_limit_placeholder(3)', 'bs(1,2)'])
def test_xg_space_identities(name):
    group, _ = catalog_lookup(name)
    space = xg_space(group)
    assert space.identities_hold()
    mu = [2, -1, 5] * group.ab_rank
    mu = mu[:3 * group.ab_rank]
    image = space.rho_star.apply(mu)
    n = group.ab_rank
    assert image[:n] == [a + b for a, b in zip(mu[:n], mu[n:2 * n])]
    assert image[n:] == [a + b for a, b in zip(mu[n:2 * n], mu[2 * n:])]


def test_xg_descriptor():
    group, _ = catalog_lookup('free(2)')
    xg = xg_descriptor(group)
    assert xg.ab_rank == 4
    assert len(xg.generators) == 4
    assert xg.ab_projection[0] == [1, 0, 0, 0]
    assert xg.ab_projection[3] == [0, 0, 0, 1]


def test_catalog_free():
    group, data = catalog_lookup('free(2)')
    assert group.ab_rank == 2
    assert equal(data.complement(1), full_sphere(2))
    assert equal(data.complement(2, HTPY), full_sphere(2))
    assert group.flag('gprime_fg') is False
    assert group.flag('is_fp') is True


def test_catalog_free_abelian():
    group, data = catalog_lookup('free_abelian(3)')
    assert group.ab_rank == 3
    for key in [(1, Z), (2, Z), (2, HTPY), (2, FIELD_Q)]:
        assert equal(data.complement(*key), empty(3))
    assert all(group.flag(f) for f in ['is_fg', 'is_fp2', 'is_fp', 'gprime_ab_fg', 'gprime_fg'])


def test_catalog_limit_placeholder_and_bs():
    group, data = catalog_lookup('nonabelian_limit_placeholder(4)')
    assert group.ab_rank == 4
    assert equal(data.complement(1), full_sphere(4))
    group, data = catalog_lookup('bs(1,2)')
    assert group.ab_rank == 1
    assert data.complement(1) is None
    _, data = catalog_lookup('bs(1,2)', sigma1_complement=left_ray_set())
    assert equal(data.complement(1), left_ray_set())


@pytest.mark.parametrize('name', ['free(1)', 'free_abelian(0)', 'bs(2,3)', 'surface(2)', 'free(2,3)', 'free'])
def test_catalog_unknown(name):
    with pytest.raises(UnknownCatalogEntry):
        catalog_lookup(name)


def test_catalog_names():
    families = [family for family, _ in catalog_names()]
    assert families == sorted(families)
    assert 'free_abelian' in families


def test_sigma_data_rejects_rank_zero():
    group = GroupDescriptor('z6', ['a'], [[1] * 6])
    with pytest.raises(InvalidSigmaData):
        SigmaData(group, {})


def test_sigma_data_checks_dimensions_and_keys():
    group = GroupDescriptor('free(2)', ['a', 'b'])
    with pytest.raises(InvalidSigmaData):
        SigmaData(group, {(1, Z): full_sphere(3)})
    with pytest.raises(InvalidSigmaData):
        SigmaData(group, {(3, Z): full_sphere(2)})
    with pytest.raises(InvalidSigmaData):
        SigmaData(group, {(1, Z): full_sphere(2), (1, HTPY): empty(2)})


def test_sigma_zero_is_empty():
    _, data = catalog_lookup('free(2)')
    assert equal(data.complement(0), empty(2))


def test_validate_sigma_data():
    group = GroupDescriptor('g', ['a', 'b'])
    half = SphSet(2, [Cell(2, [HalfSpace([1, 0])])])
    validate_sigma_data(SigmaData(group, {(1, Z): half, (2, Z): full_sphere(2)}))
    with pytest.raises(InvalidSigmaData):
        validate_sigma_data(SigmaData(group, {(1, Z): full_sphere(2), (2, Z): half}))
    with pytest.raises(InvalidSigmaData):
        validate_sigma_data(SigmaData(group, {(2, Z): full_sphere(2), (2, HTPY): half}))
    with pytest.raises(InvalidSigmaData):
        validate_sigma_data(SigmaData(group, {(2, FIELD_Q): full_sphere(2), (2, Z): half}))


def test_w_finitely_generated():
    assert w_finitely_generated(catalog_lookup('free_abelian(2)')[0]) is True
    assert w_finitely_generated(catalog_lookup('free(2)')[0]) is None
    assert w_finitely_generated(GroupDescriptor('g', ['a'], flags={'gprime_ab_fg': True})) is None


def test_group_flags_are_checked():
    with pytest.raises(ValueError):
        GroupDescriptor('g', ['a'], flags={'is_hyperbolic': True})
    with pytest.raises(ValueError):
        GroupDescriptor('g', ['a'], flags={'is_fg': 'yes'})
