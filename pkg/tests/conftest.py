import os
import sys

import pytest

SIGMA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'sigma')
if SIGMA_DIR not in sys.path:
    sys.path.insert(0, SIGMA_DIR)

from cones import HalfSpace, Cell, SphSet  # noqa: E402
from groups import Z, HTPY, GroupDescriptor, SigmaData, catalog_lookup  # noqa: E402
from utils import make_rng  # noqa: E402

CORPUS_DIR = os.path.join(os.path.dirname(SIGMA_DIR), 'data', 'corpus')
CORPUS_FILES = sorted(f for f in os.listdir(CORPUS_DIR) if f.endswith('.sigma'))


def left_ray_set():
    return SphSet(1, [Cell(1, [HalfSpace([-1])])])


@pytest.fixture
def rng():
    return make_rng(7)


@pytest.fixture
def free2():
    return catalog_lookup('free(2)')[1]


@pytest.fixture
def z2():
    return catalog_lookup('free_abelian(2)')[1]


@pytest.fixture
def left_ray():
    """Rank one group with Sigma^1 and Sigma^2 complements equal to {x <= 0}"""
    flags = {'is_fg': True, 'is_fp2': True, 'is_fp': True, 'gprime_ab_fg': False, 'gprime_fg': False}
    group = GroupDescriptor('left_ray', ['t'], flags=flags)
    s = left_ray_set()
    return SigmaData(group, {(1, Z): s, (2, Z): s, (2, HTPY): s})


@pytest.fixture
def quadrant():
    """Rank two data with Sigma^1 complement {x <= 0, y <= 0}"""
    group = GroupDescriptor('quadrant', ['a', 'b'], flags={'is_fg': True, 'is_fp2': True, 'is_fp': True})
    sigma1 = SphSet(2, [Cell(2, [HalfSpace([-1, 0]), HalfSpace([0, -1])])])
    sigma2 = SphSet(2, [Cell(2, [HalfSpace([-1, 0])]), Cell(2, [HalfSpace([0, -1])])])
    return SigmaData(group, {(1, Z): sigma1, (2, Z): sigma2, (2, HTPY): sigma2})


@pytest.fixture
def corpus():
    from documents import read_sigma
    return [read_sigma(os.path.join(CORPUS_DIR, name)) for name in CORPUS_FILES]
