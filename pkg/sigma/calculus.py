"""
Transformations of Sigma-invariant complements: X(G), X(G)/W(G), nu(G), direct products,
finite generation tests above the commutator and the non-abelian tensor square report.
Every result carries an exactness label and the theorem it comes from.
"""
import logging

from functools import lru_cache
from sympy import ImmutableMatrix

from cones import (EQ, HalfSpace, FeasibilitySystem, SphSet, single, union, intersect, cone_sum, join,
                   preimage, image, member, contains, equal, feasible, full_sphere, empty, is_empty, integral,
                   apply_matrix, unit)
from groups import Z, HTPY, FIELD_Q, xg_space, induced_char_map, w_finitely_generated

EXACT = 'exact'
LOWER_BOUND_OF_COMPLEMENT = 'lower_bound_of_complement'
CONDITIONAL = 'conditional'

HYPOTHESIS_BY_COEFFICIENT = {Z: ('is_fp2', 'Theorem E1'), HTPY: ('is_fp', 'Theorem E2')}

_cached_space = lru_cache(maxsize=None)(xg_space)


class MissingSigma(ValueError):
    pass


class MissingSigma1(MissingSigma):
    pass


class HypothesisViolated(ValueError):
    pass


class UnsupportedDimension(ValueError):
    pass


class SigmaResult(object):
    def __init__(self, sphset, exactness, provenance, hypotheses=None, conditions=()):
        """
        A computed complement together with its exactness label.
        :param sphset: The complement as SphSet
        :param exactness: EXACT, LOWER_BOUND_OF_COMPLEMENT or CONDITIONAL
        :param provenance: Name of the theorem producing the set
        :param hypotheses: Flag values consumed while computing
        :param conditions: Unknown hypotheses the result depends on (CONDITIONAL only)
        """
        if exactness not in (EXACT, LOWER_BOUND_OF_COMPLEMENT, CONDITIONAL):
            raise ValueError('Unknown exactness label "{}"'.format(exactness))
        self.set = sphset
        self.exactness = exactness
        self.provenance = provenance
        self.hypotheses = dict(hypotheses or {})
        self.conditions = sorted(set(conditions))

    def relabeled(self, provenance):
        return SigmaResult(self.set, self.exactness, provenance, self.hypotheses, self.conditions)

    def __repr__(self):
        return 'SigmaResult({}, {}, {})'.format(self.set, self.exactness, self.provenance)


class FgReport(object):
    def __init__(self, pi_verdicts, direct):
        self.pi_verdicts = list(pi_verdicts)
        self.overall = all(self.pi_verdicts)
        self.direct = direct
        self.agree = self.overall == direct


def require_complement(data, n, coeff=Z):
    sphset = data.complement(n, coeff)
    if sphset is None:
        if n == 1:
            raise MissingSigma1('Group "{}" has no Sigma^1 complement'.format(data.owner.name))
        raise MissingSigma('Group "{}" has no Sigma^{} complement for coefficients "{}"'
                           .format(data.owner.name, n, coeff))
    return sphset


def _consume(data, flags, theorem):
    """Collects flag values; False violates the theorem, None makes the result conditional"""
    hypotheses = {}
    unknown = []
    for flag in flags:
        value = data.owner.flag(flag)
        hypotheses[flag] = value
        if value is False:
            raise HypothesisViolated('{} needs "{}" for group "{}"'.format(theorem, flag, data.owner.name))
        if value is None:
            unknown.append(flag)
    return hypotheses, unknown


def _label(unknown, exactness=EXACT):
    return CONDITIONAL if unknown else exactness


def _v_parts(space, sigma1):
    # Each preimage is cut with a subspace on which its kernel rays collapse to the origin.
    v1 = intersect(single(space.kernel_cell(1)), preimage(sigma1, space.c1))
    v2 = intersect(single(space.kernel_cell(2)), preimage(sigma1, space.c2))
    v3 = intersect(single(space.kernel_cell(3)), preimage(sigma1, space.c1))
    return v1, v2, v3


def xg_sigma1_complement(data):
    hypotheses, unknown = _consume(data, ['is_fg'], 'Theorem A')
    sigma1 = require_complement(data, 1)
    space = _cached_space(data.owner)
    result = union(*_v_parts(space, sigma1))
    logging.debug('Sigma^1(X({}))^c has {} cells'.format(data.owner.name, len(result.cells)))
    return SigmaResult(result, _label(unknown), 'Theorem A', hypotheses, unknown)


def _character_blocks(space, chi):
    rows1, rows2 = space.c1.to_lists(), space.c2.to_lists()
    return apply_matrix(rows1, chi), apply_matrix(rows2, chi)


def theorem_a_pointwise(chi, data):
    """True iff [chi] lies in Sigma^1(X(G)), by the four cases of Theorem A"""
    sigma1 = require_complement(data, 1)
    space = _cached_space(data.owner)
    chi1, chi2 = _character_blocks(space, chi)
    if any(chi1) and any(chi2) and chi1 != chi2:
        return True
    if not any(chi1):
        return not member(chi2, sigma1)
    if not any(chi2):
        return not member(chi1, sigma1)
    return not member(chi1, sigma1)


def _coefficient_hypothesis(coeff):
    if coeff not in HYPOTHESIS_BY_COEFFICIENT:
        raise ValueError('Sigma^2 of X(G)/W is available for coefficients "z" and "htpy", not "{}"'.format(coeff))
    return HYPOTHESIS_BY_COEFFICIENT[coeff]


class CorollaryGParts(object):
    def __init__(self, sets, checks):
        self.sets = sets
        self.checks = checks

    def all_hold(self):
        return all(self.checks.values())


def _mod_w_union(parts):
    v1, v2, v3 = parts['V1'], parts['V2'], parts['V3']
    return union(parts['M1'], parts['M2'], parts['M3'], cone_sum(v1, v2), cone_sum(v2, v3), cone_sum(v1, v3))


def xg_mod_w_sigma2_complement(data, coeff=Z):
    flag, theorem = _coefficient_hypothesis(coeff)
    hypotheses, unknown = _consume(data, [flag], theorem)
    sigma1 = require_complement(data, 1)
    sigma2 = require_complement(data, 2, coeff)
    space = _cached_space(data.owner)
    v1, v2, v3 = _v_parts(space, sigma1)
    m1, m2, m3 = _v_parts(space, sigma2)
    result = _mod_w_union({'V1': v1, 'V2': v2, 'V3': v3, 'M1': m1, 'M2': m2, 'M3': m3})
    logging.debug('Sigma^2(X({})/W, {})^c has {} cells'.format(data.owner.name, coeff, len(result.cells)))
    return SigmaResult(result, _label(unknown), theorem, hypotheses, unknown)


def e1_pointwise(chi, data, coeff=Z):
    """True iff [chi] lies in Sigma^2(X(G)/W, coeff), by the case list of Theorems E1/E2"""
    _coefficient_hypothesis(coeff)
    sigma1 = require_complement(data, 1)
    sigma2 = require_complement(data, 2, coeff)
    space = _cached_space(data.owner)
    chi1, chi2 = _character_blocks(space, chi)
    if not any(chi1):
        return not member(chi2, sigma2)
    if not any(chi2):
        return not member(chi1, sigma2)
    if chi1 == chi2:
        return not member(chi1, sigma2)

    def in_sigma1(v):
        return not member(v, sigma1)

    difference = [a - b for a, b in zip(chi1, chi2)]
    opposite = [-x for x in difference]
    return ((in_sigma1(chi1) and in_sigma1(chi2))
            or (in_sigma1(chi1) and in_sigma1(difference))
            or (in_sigma1(chi2) and in_sigma1(opposite)))


def xg_sigma2_complement(data, coeff=Z, w_fg=None):
    """
    Sigma^2(X(G), coeff)^c: exact when W(G) is finitely generated (Theorems F1/F2 b) or when
    Sigma^1(G) is empty (Proposition D), otherwise the Corollary G lower bound.
    :param w_fg: Caller knowledge on the finite generation of W(G)
    """
    bound = xg_mod_w_sigma2_complement(data, coeff)
    sigma1 = require_complement(data, 1)
    w_known = w_fg is True or w_finitely_generated(data.owner) is True
    sigma1_full = equal(sigma1, full_sphere(data.dim))
    hypotheses = dict(bound.hypotheses)
    hypotheses['w_fg'] = True if w_known else w_fg
    if w_known:
        if sigma1_full:
            assert equal(bound.set, full_sphere(2 * data.dim)), 'Theorem F and Proposition D disagree'
        theorem = 'Theorem F1(b)' if coeff == Z else 'Theorem F2(b)'
        return SigmaResult(bound.set, bound.exactness, theorem, hypotheses, bound.conditions)
    if sigma1_full:
        # Sigma^2(X(G)) lies inside Sigma^2(X(G), Z)
        theorem = 'Proposition D' if coeff == Z else 'Proposition D with Sigma^2 in Sigma^2(-, Z)'
        return SigmaResult(full_sphere(2 * data.dim), EXACT, theorem, hypotheses)
    return SigmaResult(bound.set, LOWER_BOUND_OF_COMPLEMENT, 'Corollary G (equality is Conjecture I)',
                       hypotheses, bound.conditions)


def corollary_g_parts(data, coeff=Z):
    """
    The pieces V_i, M_i and pairwise sums of Corollary G with their checked properties:
    partition of Sigma^1(X(G))^c, disjointness and the bijections pi_i*.
    """
    sigma1 = require_complement(data, 1)
    space = _cached_space(data.owner)
    v = _v_parts(space, sigma1)
    sets = {'V1': v[0], 'V2': v[1], 'V3': v[2]}
    checks = {}
    whole = xg_sigma1_complement(data).set
    checks['partition'] = equal(union(*v), whole)
    for i in range(3):
        checks['V{} = Sigma^1(X(G))^c on S(X(G), Ker pi_{})'.format(i + 1, i + 1)] = \
            equal(v[i], intersect(whole, single(space.kernel_cell(i + 1))))
        checks['pi_{}* maps Sigma^1(G)^c onto V{}'.format(i + 1, i + 1)] = \
            equal(v[i], image(sigma1, space.pi_star(i + 1)))
    for i, j in [(0, 1), (1, 2), (0, 2)]:
        checks['V{} and V{} disjoint'.format(i + 1, j + 1)] = is_empty(intersect(v[i], v[j]))
    sigma2 = data.complement(2, coeff)
    if sigma2 is not None:
        m = _v_parts(space, sigma2)
        sets.update({'M1': m[0], 'M2': m[1], 'M3': m[2]})
        for i in range(3):
            checks['pi_{}* maps Sigma^2(G)^c onto M{}'.format(i + 1, i + 1)] = \
                equal(m[i], image(sigma2, space.pi_star(i + 1)))
    sets['V1+V2'] = cone_sum(v[0], v[1])
    sets['V2+V3'] = cone_sum(v[1], v[2])
    sets['V1+V3'] = cone_sum(v[0], v[2])
    return CorollaryGParts(sets, checks)


def corollary_b1_report(data):
    """Both complements are finite unions of finite intersections of rational semispheres"""
    sigma1 = require_complement(data, 1)
    result = xg_sigma1_complement(data)
    return {'group_cells': len(sigma1.cells), 'xg_cells': len(result.set.cells), 'polyhedral': True}


def product_complements(first, second, n):
    """
    Direct product formula: union over p of join(first[p], second[n - p]).
    :param first: Complements of the first factor indexed by dimension 0..n (index 0 empty)
    :param second: Same for the second factor
    """
    pieces = [join(first[p], second[n - p]) for p in range(n + 1)]
    return union(*pieces)


def _complement_list(data, n, coeff):
    coefficient = Z if coeff == FIELD_Q and n <= 1 else coeff
    return [require_complement(data, p, coefficient) if p > 0 else empty(data.dim) for p in range(n + 1)]


def product_sigma_complement(first, second, n, coeff=FIELD_Q):
    if coeff not in (Z, FIELD_Q):
        raise ValueError('The direct product formula is available for coefficients "z" and "q"')
    if coeff == Z and not 1 <= n <= 2:
        raise UnsupportedDimension('The product formula over Z holds for 1 <= n <= 2, not n = {}'.format(n))
    if n > 2:
        raise UnsupportedDimension('Stored Sigma-data reaches dimension 2, not n = {}'.format(n))
    result = product_complements(_complement_list(first, n, coeff), _complement_list(second, n, coeff), n)
    theorem = 'Direct product formula over a field' if coeff == FIELD_Q else 'Direct product formula over Z'
    return SigmaResult(result, EXACT, '{} for n = {}'.format(theorem, n))


def product_pointwise(chi, first, second, n):
    """True iff chi lies in the product complement, by the spelled-out cases of the product formula"""
    split = first[0].dim
    mu1, mu2 = list(chi[:split]), list(chi[split:])
    if not any(mu1):
        return member(mu2, second[n])
    if not any(mu2):
        return member(mu1, first[n])
    return any(member(mu1, first[p]) and member(mu2, second[n - p]) for p in range(1, n))


def free_power_complements(s, n):
    """Complements of Sigma^k(F_2^s) for k = 0..n by folding the product formula"""
    factor = [empty(2)] + [full_sphere(2)] * n
    complements = factor
    for _ in range(s - 1):
        complements = [product_complements(complements, factor, k) for k in range(n + 1)]
    return complements


def f2s_pattern_check(s, n, rng, coeff=None, samples=8):
    """
    Checks that characters of F_2^s nonzero on exactly n factors lie in Sigma^(n-1) and not in Sigma^n.
    Over Z the fold is valid for n <= 2; for n >= 3 only the field formula is checked.
    """
    if not 1 <= n <= s:
        raise UnsupportedDimension('Need 1 <= n <= s, got n = {}, s = {}'.format(n, s))
    coeff = coeff or (Z if n <= 2 else FIELD_Q)
    if coeff == Z and n > 2:
        raise UnsupportedDimension('The product formula over Z holds for n <= 2, not n = {}'.format(n))
    complements = free_power_complements(s, n)
    for _ in range(samples):
        blocks = rng.sample(range(s), n)
        chi = [0] * (2 * s)
        for block in blocks:
            while not (chi[2 * block] or chi[2 * block + 1]):
                chi[2 * block] = rng.randint(-5, 5)
                chi[2 * block + 1] = rng.randint(-5, 5)
        if member(chi, complements[n - 1]) or not member(chi, complements[n]):
            logging.debug('Character {} breaks the F_2^{} pattern for n = {}'.format(chi, s, n))
            return False
    return True


def annihilator_constraints(dim, subspace):
    """EQ constraints cutting out span(subspace) (a basis of its orthogonal complement)"""
    vectors = [v for v in subspace if any(v)]
    if not vectors:
        return [HalfSpace(unit(dim, i), EQ) for i in range(dim)]
    for v in vectors:
        if len(v) != dim:
            raise ValueError('Subspace vector {} does not have dimension {}'.format(list(v), dim))
    matrix = ImmutableMatrix([list(integral(v)) for v in vectors])
    return [HalfSpace(integral(list(w)), EQ) for w in matrix.nullspace()]


def fg_set_test(sphset, subspace):
    """True iff no ray of span(subspace) lies in sphset"""
    constraints = annihilator_constraints(sphset.dim, subspace)
    for cell in sphset.cells:
        if feasible(FeasibilitySystem(sphset.dim, list(cell.constraints) + constraints)):
            return False
    return True


def fg_subgroup_test(data, n, subspace, coeff=Z):
    """
    Finite generation test for a subgroup N above G': S(G, N) avoids Sigma^n(G)^c.
    :param subspace: Rational vectors spanning the characters vanishing on N
    """
    return fg_set_test(require_complement(data, n, coeff), subspace)


def pullback_subspace(pi_star, subspace):
    """Basis of {chi : pi*(chi) in span(subspace)}"""
    source_dim, target_dim = pi_star.source_dim, pi_star.target_dim
    normals = [c.normal for c in annihilator_constraints(target_dim, subspace)]
    if not normals:
        return [unit(source_dim, i) for i in range(source_dim)]
    pulled = ImmutableMatrix([list(w) for w in normals]) * pi_star.matrix
    return [integral(list(v)) for v in pulled.nullspace()]


def corollary_b2_report(data, subspace):
    """
    Decides finite generation of N containing X(G)' through pi_1(N), pi_2(N), pi_3(N) and
    cross-checks against Sigma^1(X(G))^c directly.
    :param subspace: Rational vectors in Q^2n spanning the characters of X(G) vanishing on N
    """
    space = _cached_space(data.owner)
    verdicts = [fg_subgroup_test(data, 1, pullback_subspace(space.pi_star(i), subspace)) for i in (1, 2, 3)]
    direct = fg_set_test(xg_sigma1_complement(data).set, subspace)
    report = FgReport(verdicts, direct)
    if not report.agree:
        logging.error('Corollary B2 paths disagree for group "{}"'.format(data.owner.name))
    return report


def nu_invariants(data):
    """Sigma-invariants of nu(G) through nu(G)/W_0 = X(G)/W; entries are None where data is missing"""
    results = {'sigma1c': xg_sigma1_complement(data).relabeled('Sigma^1(nu(G)) = Sigma^1(X(G)/W), Theorem A')}
    for key, coeff, theorem in [('sigma2c_z', Z, 'Theorem E1'), ('sigma2c_htpy', HTPY, 'Theorem E2')]:
        if data.complement(2, coeff) is None:
            results[key] = None
            continue
        provenance = 'Sigma^2(nu(G){}) = Sigma^2(X(G)/W{}) via nu(G)/W_0 = X(G)/W, {}'.format(
            ', Z' if coeff == Z else '', ', Z' if coeff == Z else '', theorem)
        results[key] = xg_mod_w_sigma2_complement(data, coeff).relabeled(provenance)
    return results


def _emptiness(data, n, coeff, flag):
    """Commutator finiteness from S(G, G') = S(G) inside Sigma^n(G)"""
    if data.owner.flag(flag) is not True:
        return None
    sphset = data.complement(n, coeff)
    if sphset is None:
        return None
    return is_empty(sphset)


def _override(value, derived):
    return derived if value is None else value


def tensor_square_report(data, gprime_fp=None, gprime_fp2=None, gprime_fpm=None):
    """
    Finiteness of the non-abelian tensor square (Proposition J) and of X(G)' (Corollary H).
    :param gprime_fp: Caller knowledge whether G' is finitely presented
    :param gprime_fp2: Caller knowledge whether G' is FP_2
    :param gprime_fpm: Dict m -> caller knowledge whether G' is FP_m
    :return: Dict with tri-state entries (None means no conclusion)
    """
    group = data.owner
    gprime_fg = _override(group.flag('gprime_fg'), _emptiness(data, 1, Z, 'is_fg'))
    gprime_fp2 = _override(gprime_fp2, _emptiness(data, 2, Z, 'is_fp2'))
    gprime_fp = _override(gprime_fp, _emptiness(data, 2, HTPY, 'is_fp'))
    if gprime_fg is False:
        gprime_fp2 = False if gprime_fp2 is None else gprime_fp2
        gprime_fp = False if gprime_fp is None else gprime_fp
    fg = group.flag('is_fg')
    report = {
        'gprime_fg': gprime_fg,
        'gprime_fp2': gprime_fp2,
        'gprime_fp': gprime_fp,
        'tensor_fp': True if fg and gprime_fp else None,
        'tensor_fp2': True if fg and (gprime_fp2 or gprime_fp) else None,
    }
    chain = {'xg_commutator_fg': gprime_fg if fg else None}
    if group.flag('is_fp2'):
        chain['xg_commutator_fp2'] = gprime_fp2
        for m, value in sorted((gprime_fpm or {}).items()):
            chain['xg_commutator_fp{}'.format(m)] = value
    if group.flag('is_fp'):
        chain['xg_commutator_fp'] = gprime_fp
    chain['w_fg'] = True if group.flag('is_fp2') and gprime_fg else w_finitely_generated(group)
    report['commutator_chain'] = chain
    return report


def quotient_sigma1_check(first, second, phi):
    """
    For an epimorphism G_1 -> G_2 given by generator images, checks that pulling back a
    character outside Sigma^1(G_2) lands outside Sigma^1(G_1).
    """
    pullback = induced_char_map(phi, first.owner, second.owner)
    return contains(require_complement(first, 1), image(require_complement(second, 1), pullback))


def monotonicity_holds(data, coeff=Z):
    """Sigma^2(X(G)/W) lies in Sigma^1(X(G)/W)"""
    return contains(xg_mod_w_sigma2_complement(data, coeff).set, xg_sigma1_complement(data).set)
