"""
Independent desk-scale oracles: Cayley graph witnesses for free groups, lattice probes for Z^n
and sampled comparisons of pointwise case logic against constructed sets.
"""
import logging
import itertools

from fractions import Fraction
import networkx as nx

from cones import ZeroVector, member, grid_rays, sample_rays, h_to_v, normalize_ray, as_fraction
from utils import LimitingPool, log_progress


class TreeWitness(object):
    """
    Freely reduced word w with chi(w) >= 0 whose prefix of length dip_prefix_index has negative value.
    In the tree Cayley graph of a free group the prefixes of w form the only path from 1 to w,
    so w and 1 lie in different components of the subgraph {chi >= 0}.
    """
    def __init__(self, word, chi_value, dip_prefix_index):
        self.word = list(word)
        self.chi_value = chi_value
        self.dip_prefix_index = dip_prefix_index

    def verify(self, chi):
        for a, b in zip(self.word, self.word[1:]):
            if a == -b:
                raise AssertionError('Witness {} is not freely reduced'.format(self.word))
        values = prefix_values(chi, self.word)
        if values[-1] != self.chi_value or self.chi_value < 0:
            raise AssertionError('Witness {} does not end in chi >= 0'.format(self.word))
        if not 0 < self.dip_prefix_index < len(self.word) or values[self.dip_prefix_index] >= 0:
            raise AssertionError('Witness {} has no dip at prefix {}'.format(self.word, self.dip_prefix_index))
        return True

    def __repr__(self):
        return 'TreeWitness({}, {}, {})'.format(self.word, self.chi_value, self.dip_prefix_index)


def letter_value(chi, letter):
    value = as_fraction(chi[abs(letter) - 1])
    return value if letter > 0 else -value


def prefix_values(chi, word):
    """chi-values of all prefixes of word, starting with the empty prefix"""
    values = [Fraction(0)]
    for letter in word:
        values.append(values[-1] + letter_value(chi, letter))
    return values


def _letters(rank):
    # shortlex order on letters: a, a^-1, b, b^-1, ...
    return [sign * generator for generator in range(1, rank + 1) for sign in (1, -1)]


def _reduced_words(rank, radius):
    letters = _letters(rank)
    level = [[]]
    for _ in range(radius):
        level = [word + [letter] for word in level for letter in letters if not word or word[-1] != -letter]
        for word in level:
            yield word


def free_tree_sigma1_witness(rank, chi, radius):
    """
    Searches the ball of the given radius in the Cayley tree of F_rank for a witness that [chi]
    does not lie in Sigma^1(F_rank).
    :return: First TreeWitness in shortlex order or None
    """
    if rank < 2:
        raise ValueError('Tree witnesses need a free group of rank >= 2, got {}'.format(rank))
    if len(chi) != rank:
        raise ValueError('Character {} does not have {} coordinates'.format(list(chi), rank))
    if not any(chi):
        raise ZeroVector('The zero character has no Sigma^1 witness')
    for word in _reduced_words(rank, radius):
        values = prefix_values(chi, word)
        if values[-1] < 0:
            continue
        dip = next((i for i in range(1, len(word)) if values[i] < 0), None)
        if dip is not None:
            witness = TreeWitness(word, values[-1], dip)
            witness.verify(chi)
            return witness
    logging.debug('No witness for chi = {} within radius {}'.format(list(chi), radius))
    return None


def lattice_probe(n, chi, radius):
    """
    Checks that every lattice point v with chi(v) >= 0 and |v|_inf <= radius - 1 is connected to
    the origin inside the induced grid graph on {chi >= 0, |v|_inf <= radius}.
    """
    if len(chi) != n:
        raise ValueError('Character {} does not have {} coordinates'.format(list(chi), n))
    if not any(chi):
        raise ZeroVector('The zero character has no half-space')
    chi = [as_fraction(x) for x in chi]
    graph = nx.Graph()
    for v in itertools.product(range(-radius, radius + 1), repeat=n):
        if sum(c * x for c, x in zip(chi, v)) >= 0:
            graph.add_node(v)
    for v in graph.nodes:
        for i in range(n):
            w = v[:i] + (v[i] + 1,) + v[i + 1:]
            if w in graph:
                graph.add_edge(v, w)
    component = nx.node_connected_component(graph, (0,) * n)
    inner = [v for v in graph.nodes if max((abs(x) for x in v), default=0) <= radius - 1]
    return all(v in component for v in inner)


class GridSampler(object):
    """All primitive rays with entries bounded by bound"""
    def __init__(self, bound):
        self.bound = bound
        self.seed = None

    def rays(self, dim):
        return grid_rays(dim, self.bound)


class RandomSampler(object):
    def __init__(self, rng, count, seed, bound=10):
        self.rng = rng
        self.count = count
        self.seed = seed
        self.bound = bound

    def rays(self, dim):
        return sample_rays(dim, self.rng, self.count, bound=self.bound)


class CrossCheckReport(object):
    def __init__(self, samples, mismatches, seed):
        self.samples = samples
        self.mismatches = mismatches
        self.seed = seed

    @property
    def passed(self):
        return len(self.mismatches) == 0


def cross_check(constructed, pointwise, sampler, boundary=(), workers=1, progress=False, interval=60.0):
    """
    Compares the constructed complement with a pointwise membership predicate.
    :param constructed: SphSet claimed to be the complement of a Sigma-invariant
    :param pointwise: Callable ray -> True iff the ray lies in the invariant
    :param sampler: GridSampler or RandomSampler
    :param boundary: Extra rays checked in addition to the sampled ones
    :return: CrossCheckReport listing mismatching rays in sorted order
    """
    rays = sorted(set(list(sampler.rays(constructed.dim)) + [normalize_ray(r) for r in boundary]))

    def disagrees(ray):
        return (not member(ray, constructed)) != pointwise(ray)

    if progress:
        rays_it = log_progress(rays, interval=interval)
    else:
        rays_it = rays
    mismatches = []
    with LimitingPool(processes=workers) as pool:
        for ray, verdict in zip(rays, pool.map(disagrees, rays_it)):
            if verdict:
                mismatches.append(ray)
    if mismatches:
        logging.warning('{} of {} rays disagree'.format(len(mismatches), len(rays)))
    return CrossCheckReport(len(rays), mismatches, sampler.seed)


def boundary_rays(space, sigma1, rng, per_family=8, bound=6):
    """
    Rays of X(G) on the boundary families: chi_1 = 0, chi_2 = 0, chi_1 = chi_2, and pairs whose
    difference chi_1 - chi_2 is a generator of a cell of Sigma^1(G)^c.
    """
    n = space.n

    def random_block():
        while True:
            block = [rng.randint(-bound, bound) for _ in range(n)]
            if any(block):
                return block

    rays = []
    for _ in range(per_family):
        block = random_block()
        rays.append([0] * n + block)
        rays.append(block + [0] * n)
        rays.append(block + block)
    facet_generators = []
    for cell in sigma1.cells:
        generators = h_to_v(cell)
        facet_generators.extend(generators.rays)
        for line in generators.lineality:
            facet_generators.extend([line, tuple(-x for x in line)])
    for generator in facet_generators:
        for _ in range(per_family):
            first = random_block()
            second = [a - b for a, b in zip(first, generator)]
            rays.append(first + second)
            rays.append(list(generator) + random_block())
            rays.append(random_block() + list(generator))
    return [normalize_ray(r) for r in rays if any(r)]
