#!/usr/bin/env python
"""
Tool for running the consistency checks over every Sigma-data document of a corpus catalog
"""
import sys
import json
import logging
import argparse

from pathlib import Path

from utils import fail, make_rng, log_progress, LimitingPool, DEFAULT_SEED
from groups import Z, HTPY, xg_space
from calculus import (HypothesisViolated, xg_sigma1_complement, xg_mod_w_sigma2_complement, theorem_a_pointwise,
                      e1_pointwise, corollary_g_parts, monotonicity_holds, corollary_b2_report)
from oracles import cross_check, boundary_rays, RandomSampler
from documents import read_sigma


def load_catalog(catalog_path):
    catalog_path = Path(catalog_path).absolute()
    if not catalog_path.is_file():
        fail('Unable to find catalog file "{}"'.format(str(catalog_path)))
    with open(catalog_path, 'r') as catalog_file:
        items = json.load(catalog_file)
    base_path = catalog_path.parent
    paths = []
    for item in items:
        if 'sigma' not in item:
            fail('Catalog "{}" - item without "sigma" entry'.format(str(catalog_path)))
        entry_path = Path(item['sigma'])
        entry_path = entry_path if entry_path.is_absolute() else (base_path / entry_path)
        if not entry_path.is_file():
            fail('Catalog "{}" - missing file "{}"'.format(str(catalog_path), str(entry_path)))
        paths.append(entry_path)
    return paths


def random_subspace(rng, dim, bound=3):
    size = rng.randint(0, dim)
    return [[rng.randint(-bound, bound) for _ in range(dim)] for _ in range(size)]


def check_entry(job):
    """
    Runs every check on one corpus document.
    :param job: Tuple (index, path, args)
    :return: List of (check name, passed, detail)
    """
    index, path, args = job
    data = read_sigma(str(path))
    rng = make_rng(args.seed + index)
    space = xg_space(data.owner)
    sampler = RandomSampler(rng, args.samples, args.seed + index)
    boundary = boundary_rays(space, data.complement(1), rng)
    results = []

    report = cross_check(xg_sigma1_complement(data).set, lambda ray: theorem_a_pointwise(ray, data), sampler,
                         boundary=boundary)
    results.append(('theorem-a', report.passed, '{} mismatches'.format(len(report.mismatches))))

    for coeff in (Z, HTPY):
        if data.complement(2, coeff) is None:
            continue
        try:
            constructed = xg_mod_w_sigma2_complement(data, coeff).set
        except HypothesisViolated as error:
            results.append(('e1-{}'.format(coeff), True, 'skipped: {}'.format(error)))
            continue
        report = cross_check(constructed, lambda ray, coeff=coeff: e1_pointwise(ray, data, coeff), sampler,
                             boundary=boundary)
        results.append(('e1-{}'.format(coeff), report.passed, '{} mismatches'.format(len(report.mismatches))))
        results.append(('monotonicity-{}'.format(coeff), monotonicity_holds(data, coeff), ''))

    parts = corollary_g_parts(data)
    failed = [name for name, value in sorted(parts.checks.items()) if not value]
    results.append(('corollary-g', not failed, ', '.join(failed)))

    disagreements = 0
    for _ in range(args.subspaces):
        if not corollary_b2_report(data, random_subspace(rng, space.dim)).agree:
            disagreements += 1
    results.append(('b2-agreement', disagreements == 0,
                    '{} of {} subspaces disagree'.format(disagreements, args.subspaces)))
    return results


def main(argv=None):
    args = parse_args(argv)
    logging.basicConfig()
    logging.root.setLevel(args.loglevel if args.loglevel else 20)
    paths = load_catalog(args.catalog)
    logging.info('Checking {} corpus entries'.format(len(paths)))
    jobs = [(index, path, args) for index, path in enumerate(paths)]
    if not args.no_progress:
        jobs = log_progress(jobs, interval=args.progress_interval, entity='entry')
    all_passed = True
    with LimitingPool(processes=args.workers) as pool:
        for path, results in zip(paths, pool.map(check_entry, jobs)):
            for name, passed, detail in results:
                all_passed = all_passed and passed
                line = '{}: {}: {}'.format(path.name, name, 'pass' if passed else 'FAIL')
                print(line + (' ({})'.format(detail) if detail else ''))
    return 0 if all_passed else 1


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description='Runs the X(G) consistency checks over a corpus of Sigma-data')
    parser.add_argument('--catalog', required=True,
                        help='JSON catalog file listing items of the form {"sigma": "<path>"}')
    parser.add_argument('--samples', type=int, default=1000, help='Number of seeded random rays per check')
    parser.add_argument('--subspaces', type=int, default=50,
                        help='Number of random subspaces for the two-path finite generation check')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED,
                        help='Base seed; entry i uses seed + i (default: {})'.format(DEFAULT_SEED))
    parser.add_argument('--workers', type=int, default=1, help='Number of entries checked in parallel')
    parser.add_argument('--loglevel', type=int, required=False, default=20,
                        help='Log level (between 0 and 50) - default: 20')
    parser.add_argument('--no-progress', action="store_true",
                        help='Prevents showing progress indication')
    parser.add_argument('--progress-interval', type=float, default=60.0,
                        help='Progress indication interval in seconds')
    return parser.parse_args(argv)


if __name__ == '__main__':
    sys.exit(main())
