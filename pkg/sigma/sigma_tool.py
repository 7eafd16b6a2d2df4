#!/usr/bin/env python
"""
Tool for computing Sigma-invariants of X(G), X(G)/W(G) and nu(G) from Sigma-data of G
"""
import sys
import json
import logging
import argparse

from pathlib import Path

from utils import fail, make_rng, DEFAULT_SEED
from cones import (BranchLimitExceeded, member, equal, contains, union, intersect, join, cone_sum, canonical,
                   normalize_ray, integral)
from groups import Z, HTPY, FIELD_Q, SigmaData, catalog_lookup, catalog_names, xg_space
from calculus import (SigmaResult, xg_sigma1_complement, xg_mod_w_sigma2_complement, xg_sigma2_complement,
                      nu_invariants, product_sigma_complement, fg_subgroup_test, corollary_b1_report,
                      corollary_b2_report, tensor_square_report, quotient_sigma1_check, theorem_a_pointwise,
                      e1_pointwise, require_complement)
from oracles import (free_tree_sigma1_witness, lattice_probe, cross_check, boundary_rays, GridSampler,
                     RandomSampler)
from documents import (GROUP, SIGMA, SPHSET, RESULT, REPORT, ParseError, serialize, report_payload,
                       result_payload, read_document, read_sphset, read_sigma, parse_vector, parse_subspace,
                       format_rational)

EXIT_TRUE = 0
EXIT_FALSE = 1

CLI_ARGS = None


def write_output(text):
    if CLI_ARGS.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(CLI_ARGS.output, 'w', encoding='utf-8') as output_file:
            output_file.write(text)
        logging.info('Wrote "{}"'.format(CLI_ARGS.output))


def emit(kind, obj):
    write_output(serialize(kind, obj, pretty=CLI_ARGS.output_pretty))
    return EXIT_TRUE


def emit_report(title, theorem, values):
    return emit(REPORT, report_payload(title, theorem, values))


def verdict(value):
    write_output('true\n' if value else 'false\n')
    return EXIT_TRUE if value else EXIT_FALSE


def read_text(path):
    with open(path, 'r', encoding='utf-8') as text_file:
        return text_file.read()


def catalog_list():
    write_output(''.join('{}: {}\n'.format(family, description) for family, description in catalog_names()))
    return EXIT_TRUE


def catalog_show():
    sigma1 = read_sphset(CLI_ARGS.sigma1) if CLI_ARGS.sigma1 else None
    group, data = catalog_lookup(CLI_ARGS.name, sigma1_complement=sigma1)
    if data is None:
        return emit(GROUP, group)
    return emit(SIGMA, data)


def xg_sigma1():
    return emit(RESULT, xg_sigma1_complement(read_sigma(CLI_ARGS.input)))


def xg_sigma2():
    w_fg = True if CLI_ARGS.w_fg else None
    return emit(RESULT, xg_sigma2_complement(read_sigma(CLI_ARGS.input), CLI_ARGS.coeff, w_fg=w_fg))


def xgmodw_sigma2():
    return emit(RESULT, xg_mod_w_sigma2_complement(read_sigma(CLI_ARGS.input), CLI_ARGS.coeff))


def nu():
    results = nu_invariants(read_sigma(CLI_ARGS.input))
    values = {key: None if results[key] is None else result_payload(results[key])
              for key in ['sigma1c', 'sigma2c_z', 'sigma2c_htpy']}
    return emit_report('nu invariants', 'nu(G)/W_0 = X(G)/W', values)


def product():
    first, second = read_sigma(CLI_ARGS.first), read_sigma(CLI_ARGS.second)
    return emit(RESULT, product_sigma_complement(first, second, CLI_ARGS.dim, CLI_ARGS.coeff))


def fgtest():
    subspace = parse_subspace(read_text(CLI_ARGS.subspace))
    return verdict(fg_subgroup_test(read_sigma(CLI_ARGS.input), CLI_ARGS.dim, subspace, CLI_ARGS.coeff))


def b1report():
    values = corollary_b1_report(read_sigma(CLI_ARGS.input))
    return emit_report('polyhedrality of Sigma^1(X(G))^c', 'Corollary B1', values)


def b2report():
    subspace = parse_subspace(read_text(CLI_ARGS.subspace))
    report = corollary_b2_report(read_sigma(CLI_ARGS.input), subspace)
    if not report.agree:
        fail('Projection path ({}) and direct path ({}) disagree'.format(report.overall, report.direct))
    values = {
        'pi1_fg': report.pi_verdicts[0],
        'pi2_fg': report.pi_verdicts[1],
        'pi3_fg': report.pi_verdicts[2],
        'n_fg': report.overall,
        'direct': report.direct
    }
    emit_report('finite generation above X(G)\'', 'Corollary B2', values)
    return EXIT_TRUE if report.overall else EXIT_FALSE


def tensor():
    values = tensor_square_report(read_sigma(CLI_ARGS.input))
    return emit_report('non-abelian tensor square', 'Proposition J, Corollary H', values)


def set_operation():
    operation = CLI_ARGS.operation
    a = read_sphset(CLI_ARGS.first)
    if operation == 'member':
        if CLI_ARGS.ray is None:
            fail('Operation "member" needs --ray')
        return verdict(member(normalize_ray(integral(parse_vector(CLI_ARGS.ray))), a))
    if CLI_ARGS.second is None:
        fail('Operation "{}" needs a second set (-b)'.format(operation))
    b = read_sphset(CLI_ARGS.second)
    if operation == 'equal':
        return verdict(equal(a, b, branch_cap=CLI_ARGS.branch_cap))
    if operation == 'contains':
        return verdict(contains(a, b, branch_cap=CLI_ARGS.branch_cap))
    combine = {'union': union, 'intersect': intersect, 'join': join, 'conesum': cone_sum}[operation]
    return emit(SPHSET, combine(a, b))


def oracle_tree_witness():
    chi = parse_vector(CLI_ARGS.chi)
    witness = free_tree_sigma1_witness(CLI_ARGS.rank, chi, CLI_ARGS.radius)
    if witness is None:
        write_output('none\n')
        return EXIT_FALSE
    values = {
        'chi': [format_rational(x) for x in chi],
        'word': witness.word,
        'chi_value': format_rational(witness.chi_value),
        'dip_prefix_index': witness.dip_prefix_index
    }
    return emit_report('Sigma^1 tree witness', 'Cayley graph definition of Sigma^1', values)


def oracle_lattice():
    return verdict(lattice_probe(CLI_ARGS.n, parse_vector(CLI_ARGS.chi), CLI_ARGS.radius))


def verify():
    data = read_sigma(CLI_ARGS.input)
    rng = make_rng(CLI_ARGS.seed)
    space = xg_space(data.owner)
    boundary = boundary_rays(space, require_complement(data, 1), rng)
    if CLI_ARGS.check == 'theorem-a':
        checks = [('theorem-a', xg_sigma1_complement(data).set, lambda ray: theorem_a_pointwise(ray, data))]
    else:
        coefficients = [CLI_ARGS.coeff] if CLI_ARGS.coeff else [c for c in (Z, HTPY) if data.complement(2, c) is not None]
        if not coefficients:
            fail('Group "{}" has no Sigma^2 complement'.format(data.owner.name))
        checks = [('e1-{}'.format(coeff), xg_mod_w_sigma2_complement(data, coeff).set,
                   lambda ray, coeff=coeff: e1_pointwise(ray, data, coeff)) for coeff in coefficients]
    passed = True
    lines = []
    for name, constructed, pointwise in checks:
        samplers = [RandomSampler(rng, CLI_ARGS.samples, CLI_ARGS.seed)]
        if CLI_ARGS.grid:
            samplers.append(GridSampler(CLI_ARGS.grid))
        for sampler in samplers:
            report = cross_check(constructed, pointwise, sampler, boundary=boundary, workers=CLI_ARGS.workers,
                                 progress=not CLI_ARGS.no_progress, interval=CLI_ARGS.progress_interval)
            lines.append('{}: {} samples, {} mismatches\n'.format(name, report.samples, len(report.mismatches)))
            lines.extend(' mismatch: {}\n'.format(list(ray)) for ray in report.mismatches)
            passed = passed and report.passed
    write_output(''.join(lines))
    return EXIT_TRUE if passed else EXIT_FALSE


def canon():
    kind, obj = read_document(CLI_ARGS.input)
    if kind == SPHSET:
        obj = canonical(obj)
    elif kind == RESULT:
        obj = SigmaResult(canonical(obj.set), obj.exactness, obj.provenance, obj.hypotheses, obj.conditions)
    elif kind == SIGMA:
        obj = SigmaData(obj.owner, {key: canonical(s) for key, s in obj.complements.items()})
    return emit(kind, obj)


def quotient_check():
    first, second = read_sigma(CLI_ARGS.first), read_sigma(CLI_ARGS.second)
    try:
        phi = json.loads(read_text(CLI_ARGS.map))
    except json.JSONDecodeError as error:
        raise ParseError(error.msg, line=error.lineno, column=error.colno)
    if not isinstance(phi, list) or not all(isinstance(word, list) for word in phi):
        raise ParseError('Map files hold one list of signed generator indices per source generator')
    return verdict(quotient_sigma1_check(first, second, phi))


def main(argv=None):
    global CLI_ARGS
    CLI_ARGS = parse_args(argv)
    logging.basicConfig()
    logging.root.setLevel(CLI_ARGS.loglevel if CLI_ARGS.loglevel else 20)
    if CLI_ARGS.output is not None and not Path(CLI_ARGS.output).absolute().parent.is_dir():
        fail('Unable to write to "{}" - parent directory missing'.format(CLI_ARGS.output))
    try:
        return CLI_ARGS.handler()
    except (ValueError, BranchLimitExceeded, OSError) as error:
        fail('{}: {}'.format(type(error).__name__, error))


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description='Computes Sigma-invariants of the weak commutativity group X(G), '
                                                 'of X(G)/W(G) and of nu(G) from Sigma-data of G.')
    parser.add_argument('--loglevel', type=int, required=False, default=20,
                        help='Log level (between 0 and 50) - default: 20')
    parser.add_argument('--no-progress', action="store_true",
                        help='Prevents showing progress indication')
    parser.add_argument('--progress-interval', type=float, default=60.0,
                        help='Progress indication interval in seconds')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED,
                        help='Seed of every randomized path (default: {})'.format(DEFAULT_SEED))
    parser.add_argument('--workers', type=int, default=1,
                        help='Number of parallel workers for sampled checks')
    parser.add_argument('--branch-cap', type=int, required=False,
                        help='Maximal number of branches explored by containment checks')

    common = argparse.ArgumentParser(add_help=False)
    output_group = common.add_argument_group(title='Output options')
    output_group.add_argument('-o', '--output', help='Write output to this file instead of standard output')
    output_group.add_argument('--output-pretty', action="store_true", help='Writes indented JSON output')
    common.add_argument('--seed', type=int, default=argparse.SUPPRESS, help='Overrides the global seed')

    commands = parser.add_subparsers(dest='command', required=True)

    def add(subparsers, name, handler, description):
        command = subparsers.add_parser(name, parents=[common], help=description, description=description)
        command.set_defaults(handler=handler)
        return command

    def add_input(command, flag='-i', dest='input', long_flag='--input', what='Sigma-data document of G'):
        command.add_argument(flag, long_flag, dest=dest, required=True, help=what)

    def add_coeff(command, choices, default):
        command.add_argument('--coeff', choices=choices, default=default,
                             help='Coefficients: {} (default: {})'.format(', '.join(choices), default))

    catalog = commands.add_parser('catalog', help='Built-in catalog of groups with known Sigma-invariants')
    catalog_commands = catalog.add_subparsers(dest='subcommand', required=True)
    add(catalog_commands, 'list', catalog_list, 'Lists the catalog families')
    show = add(catalog_commands, 'show', catalog_show, 'Writes the Sigma-data of a catalog entry')
    show.add_argument('name', help='Catalog entry like "free(2)", "free_abelian(3)" or "bs(1,2)"')
    show.add_argument('--sigma1', help='Sphset document with a user supplied Sigma^1 complement (bs(1,m) only)')

    xg = commands.add_parser('xg', help='Sigma-invariants of X(G)')
    xg_commands = xg.add_subparsers(dest='subcommand', required=True)
    sigma1 = add(xg_commands, 'sigma1', xg_sigma1, 'Sigma^1(X(G)) complement (Theorem A)')
    add_input(sigma1)
    sigma2 = add(xg_commands, 'sigma2', xg_sigma2, 'Sigma^2(X(G)) complement, exact or lower bound')
    add_input(sigma2)
    add_coeff(sigma2, [Z, HTPY], Z)
    sigma2.add_argument('--w-fg', action='store_true', help='W(G) is known to be finitely generated')

    xgmodw = commands.add_parser('xgmodw', help='Sigma-invariants of X(G)/W(G)')
    xgmodw_commands = xgmodw.add_subparsers(dest='subcommand', required=True)
    mod_sigma2 = add(xgmodw_commands, 'sigma2', xgmodw_sigma2, 'Sigma^2(X(G)/W) complement (Theorems E1/E2)')
    add_input(mod_sigma2)
    add_coeff(mod_sigma2, [Z, HTPY], Z)

    nu_parser = commands.add_parser('nu', help='Sigma-invariants of nu(G)')
    nu_commands = nu_parser.add_subparsers(dest='subcommand', required=True)
    add_input(add(nu_commands, 'invariants', nu, 'Sigma^1 and Sigma^2 complements of nu(G)'))

    product_parser = add(commands, 'product', product, 'Sigma^n complement of a direct product G1 x G2')
    product_parser.add_argument('--dim', type=int, required=True, help='Dimension n of the invariant')
    add_coeff(product_parser, [FIELD_Q, Z], FIELD_Q)
    add_input(product_parser, '-a', 'first', '--first', 'Sigma-data document of G1')
    add_input(product_parser, '-b', 'second', '--second', 'Sigma-data document of G2')

    fgtest_parser = add(commands, 'fgtest', fgtest, 'Finiteness test for a subgroup N containing G\'')
    fgtest_parser.add_argument('--dim', type=int, required=True, help='Dimension n of the invariant')
    fgtest_parser.add_argument('--subspace', required=True,
                               help='Text file with vectors spanning the characters vanishing on N')
    add_coeff(fgtest_parser, [Z, HTPY, FIELD_Q], Z)
    add_input(fgtest_parser)

    add_input(add(commands, 'b1report', b1report, 'Cell counts of Sigma^1(G)^c and Sigma^1(X(G))^c (Corollary B1)'))

    b2_parser = add(commands, 'b2report', b2report, 'Finite generation of N containing X(G)\' (Corollary B2)')
    b2_parser.add_argument('--subspace', required=True,
                           help='Text file with vectors in Q^2n spanning the characters vanishing on N')
    add_input(b2_parser)

    tensor_parser = commands.add_parser('tensor', help='Non-abelian tensor square')
    tensor_commands = tensor_parser.add_subparsers(dest='subcommand', required=True)
    add_input(add(tensor_commands, 'report', tensor, 'Finiteness report for G (x) G and X(G)\''))

    set_parser = add(commands, 'set', set_operation, 'Operations on spherical set documents')
    set_parser.add_argument('operation', choices=['member', 'equal', 'contains', 'union', 'intersect', 'join',
                                                  'conesum'])
    add_input(set_parser, '-a', 'first', '--first', 'First sphset (or result) document')
    set_parser.add_argument('-b', '--second', help='Second sphset (or result) document')
    set_parser.add_argument('--ray', help='Comma separated ray coordinates for "member"')

    oracle = commands.add_parser('oracle', help='Independent oracles')
    oracle_commands = oracle.add_subparsers(dest='subcommand', required=True)
    tree = add(oracle_commands, 'tree-witness', oracle_tree_witness, 'Sigma^1 non-membership witness for F_k')
    tree.add_argument('--rank', type=int, required=True, help='Rank k >= 2 of the free group')
    tree.add_argument('--chi', required=True, help='Comma separated rational character coordinates')
    tree.add_argument('--radius', type=int, default=6, help='Search radius (default: 6)')
    lattice = add(oracle_commands, 'lattice', oracle_lattice, 'Half-space connectivity probe on Z^n')
    lattice.add_argument('--n', type=int, required=True, help='Lattice dimension')
    lattice.add_argument('--chi', required=True, help='Comma separated rational character coordinates')
    lattice.add_argument('--radius', type=int, default=4, help='Probe radius (default: 4)')

    verify_parser = add(commands, 'verify', verify, 'Cross-checks constructed sets against pointwise case logic')
    verify_parser.add_argument('check', choices=['theorem-a', 'e1'])
    add_input(verify_parser)
    verify_parser.add_argument('--samples', type=int, default=1000, help='Number of seeded random rays')
    verify_parser.add_argument('--grid', type=int, required=False, help='Also check all rays with entries up to this')
    verify_parser.add_argument('--coeff', choices=[Z, HTPY], required=False,
                               help='Coefficients for "e1" (default: every stored one)')

    add_input(add(commands, 'canon', canon, 'Rewrites a document in canonical form'),
              what='Document of any kind')

    quotient = commands.add_parser('quotient', help='Epimorphism consistency checks')
    quotient_commands = quotient.add_subparsers(dest='subcommand', required=True)
    check = add(quotient_commands, 'check', quotient_check, 'Sigma^1 consistency for an epimorphism G1 -> G2')
    add_input(check, '-a', 'first', '--first', 'Sigma-data document of G1')
    add_input(check, '-b', 'second', '--second', 'Sigma-data document of G2')
    check.add_argument('--map', required=True, help='JSON file with the image word of every generator of G1')

    args = parser.parse_args(argv)
    for name, default in [('output', None), ('output_pretty', False)]:
        if not hasattr(args, name):
            setattr(args, name, default)
    return args


if __name__ == '__main__':
    sys.exit(main())
