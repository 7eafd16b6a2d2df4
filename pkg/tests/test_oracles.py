import pytest

from fractions import Fraction

from cones import ZeroVector, SphSet, full_sphere
from groups import xg_space
from calculus import xg_sigma1_complement, theorem_a_pointwise, xg_mod_w_sigma2_complement, e1_pointwise
from oracles import (TreeWitness, free_tree_sigma1_witness, prefix_values, lattice_probe, cross_check,
                     boundary_rays, GridSampler, RandomSampler)
from utils import make_rng


def test_tree_witness_axis_character():
    witness = free_tree_sigma1_witness(2, [1, 0], 3)
    assert witness.word == [-1, 2, 1]
    assert witness.chi_value == 0
    assert witness.dip_prefix_index == 1


def test_tree_witness_is_first_in_shortlex_order():
    witness = free_tree_sigma1_witness(2, [1, 1], 3)
    assert witness.word == [-1, 2]
    assert witness.dip_prefix_index == 1
    assert witness.verify([1, 1])


def test_tree_witness_radius_too_small():
    assert free_tree_sigma1_witness(2, [1, 1], 1) is None


def test_tree_witness_errors():
    with pytest.raises(ValueError):
        free_tree_sigma1_witness(1, [1], 4)
    with pytest.raises(ZeroVector):
        free_tree_sigma1_witness(2, [0, 0], 4)
    with pytest.raises(ValueError):
        free_tree_sigma1_witness(3, [1, 0], 4)


def test_tree_witness_verify_rejects_bad_words():
    with pytest.raises(AssertionError):
        TreeWitness([1, -1, 2], 1, 1).verify([1, 1])
    with pytest.raises(AssertionError):
        TreeWitness([1, 2], 2, 1).verify([1, 1])


def test_tree_witness_random_characters():
    rng = make_rng(19)
    for _ in range(100):
        rank = rng.randint(2, 3)
        chi = [0] * rank
        while not any(chi):
            chi = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rank)]
        witness = free_tree_sigma1_witness(rank, chi, 6)
        assert witness is not None, chi
        assert witness.verify(chi)
        assert len(witness.word) <= 3


def test_prefix_values():
    assert prefix_values([2, -1], [1, -2, -1]) == [0, 2, 3, 1]


@pytest.mark.parametrize('n, chi, radius', [
    (1, [1], 3),
    (1, [-2], 5),
    (2, [1, 1], 4),
    (2, [3, -1], 6),
    (2, [Fraction(1, 2), Fraction(-1, 3)], 5),
    (3, [1, -2, 1], 3),
    (3, [0, 0, -1], 4),
])
def test_lattice_probe(n, chi, radius):
    assert lattice_probe(n, chi, radius)


def test_lattice_probe_random_characters():
    rng = make_rng(29)
    for _ in range(20):
        n = rng.randint(1, 3)
        chi = [0] * n
        while not any(chi):
            chi = [rng.randint(-4, 4) for _ in range(n)]
        assert lattice_probe(n, chi, rng.randint(1, 6 if n < 3 else 4)), chi


def test_lattice_probe_errors():
    with pytest.raises(ZeroVector):
        lattice_probe(2, [0, 0], 3)
    with pytest.raises(ValueError):
        lattice_probe(2, [1], 3)


def test_cross_check_free_group_grid(free2):
    constructed = xg_sigma1_complement(free2).set
    report = cross_check(constructed, lambda ray: theorem_a_pointwise(ray, free2), GridSampler(3))
    assert report.passed
    assert report.samples > 0
    assert report.seed is None


def test_cross_check_detects_missing_cell(free2):
    constructed = xg_sigma1_complement(free2).set
    truncated = SphSet(constructed.dim, constructed.cells[:-1])
    report = cross_check(truncated, lambda ray: theorem_a_pointwise(ray, free2), GridSampler(2))
    assert not report.passed
    assert report.mismatches == sorted(report.mismatches)


def test_cross_check_is_deterministic(left_ray):
    constructed = full_sphere(2 * left_ray.dim)

    def run(workers):
        sampler = RandomSampler(make_rng(5), 200, 5)
        return cross_check(constructed, lambda ray: theorem_a_pointwise(ray, left_ray), sampler, workers=workers)

    first, second, threaded = run(1), run(1), run(4)
    assert first.mismatches == second.mismatches == threaded.mismatches
    assert first.samples == second.samples
    assert first.seed == 5
    assert not first.passed


def test_cross_check_abelian_mod_w(z2):
    rng = make_rng(7)
    boundary = boundary_rays(xg_space(z2.owner), z2.complement(1), rng)
    report = cross_check(xg_mod_w_sigma2_complement(z2).set, lambda ray: e1_pointwise(ray, z2),
                         RandomSampler(rng, 1000, 7), boundary=boundary)
    assert report.passed


def test_boundary_rays(free2):
    rays = boundary_rays(xg_space(free2.owner), free2.complement(1), make_rng(3), per_family=2)
    assert all(len(ray) == 4 and any(ray) for ray in rays)
    assert any(ray[:2] == (0, 0) for ray in rays)
    assert any(ray[2:] == (0, 0) for ray in rays)
    assert any(ray[:2] == ray[2:] for ray in rays)
