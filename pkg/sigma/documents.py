"""
Canonical JSON documents for groups, Sigma-data, spherical sets, results and reports.

Every document is an object {"kind": ..., "version": ..., "payload": ...}. Objects are written
with a fixed field order, rationals as "p/q" strings, and parsing is strict: unknown or
missing fields raise ParseError.
"""
import json

from fractions import Fraction

from cones import RELATIONS, HalfSpace, Cell, SphSet, as_fraction
from groups import COEFFICIENTS, FLAG_NAMES, GroupDescriptor, SigmaData, validate_sigma_data
from calculus import SigmaResult

DOCUMENT_VERSION = 1
TOOL_VERSION = '0.1.0'

GROUP = 'group'
SIGMA = 'sigma'
SPHSET = 'sphset'
RESULT = 'result'
REPORT = 'report'
KINDS = [GROUP, SIGMA, SPHSET, RESULT, REPORT]


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = '{} (line {}, column {})'.format(message, line, column)
        super().__init__(message)
        self.line = line
        self.column = column


class VersionError(ValueError):
    pass


def format_rational(x):
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else '{}/{}'.format(x.numerator, x.denominator)


def parse_rational(value):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError('Expected a rational number, got {!r}'.format(value))
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError('Malformed rational number {!r}'.format(value))


def parse_vector(text):
    """Parses comma or whitespace separated rationals like "1,-1/2,3" """
    parts = [p for p in text.replace(',', ' ').split() if p]
    if not parts:
        raise ParseError('Empty vector "{}"'.format(text))
    return [parse_rational(p) for p in parts]


def parse_subspace(text):
    """One vector per line; blank lines and lines starting with # are ignored"""
    vectors = []
    for number, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        try:
            vectors.append(parse_vector(line))
        except ParseError as error:
            raise ParseError(str(error), line=number, column=1)
    return vectors


def _expect(obj, fields, what, optional=()):
    if not isinstance(obj, dict):
        raise ParseError('{} has to be an object'.format(what))
    unknown = set(obj.keys()) - set(fields) - set(optional)
    if unknown:
        raise ParseError('Unknown field(s) {} in {}'.format(', '.join(sorted(unknown)), what))
    missing = [f for f in fields if f not in obj]
    if missing:
        raise ParseError('Missing field(s) {} in {}'.format(', '.join(missing), what))
    return obj


def _expect_list(value, what):
    if not isinstance(value, list):
        raise ParseError('{} has to be a list'.format(what))
    return value


def _expect_int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError('{} has to be an integer'.format(what))
    return value


# Spherical sets


def sphset_payload(s):
    return {
        'dim': s.dim,
        'cells': [[{'normal': list(c.normal), 'relation': c.relation} for c in cell.constraints]
                  for cell in s.cells]
    }


def parse_sphset_payload(payload):
    _expect(payload, ['dim', 'cells'], 'sphset')
    dim = _expect_int(payload['dim'], 'dim')
    cells = []
    try:
        for cell in _expect_list(payload['cells'], 'cells'):
            constraints = []
            for constraint in _expect_list(cell, 'cell'):
                _expect(constraint, ['normal', 'relation'], 'constraint')
                if constraint['relation'] not in RELATIONS:
                    raise ParseError('Unknown relation "{}"'.format(constraint['relation']))
                normal = [_expect_int(x, 'normal entry') for x in _expect_list(constraint['normal'], 'normal')]
                constraints.append(HalfSpace(normal, constraint['relation']))
            cells.append(Cell(dim, constraints))
        return SphSet(dim, cells)
    except ParseError:
        raise
    except ValueError as error:
        raise ParseError('Invalid sphset: {}'.format(error))


# Groups and Sigma-data


def group_payload(group):
    return {
        'name': group.name,
        'generators': list(group.generators),
        'relators': [list(word) for word in group.relators],
        'flags': {flag: group.flag(flag) for flag in FLAG_NAMES},
        'ab_projection': [list(row) for row in group.ab_projection]
    }


def parse_group_payload(payload):
    _expect(payload, ['name', 'generators', 'relators', 'flags'], 'group', optional=['ab_projection'])
    if not isinstance(payload['name'], str):
        raise ParseError('Group name has to be a string')
    generators = _expect_list(payload['generators'], 'generators')
    if not all(isinstance(g, str) for g in generators):
        raise ParseError('Generators have to be strings')
    relators = [[_expect_int(x, 'relator letter') for x in _expect_list(word, 'relator')]
                for word in _expect_list(payload['relators'], 'relators')]
    flags = _expect(payload['flags'], [], 'flags', optional=FLAG_NAMES)
    projection = payload.get('ab_projection')
    if projection is not None:
        projection = [[_expect_int(x, 'projection entry') for x in _expect_list(row, 'projection row')]
                      for row in _expect_list(projection, 'ab_projection')]
    try:
        return GroupDescriptor(payload['name'], generators, relators, flags=flags, ab_projection=projection)
    except ValueError as error:
        raise ParseError('Invalid group: {}'.format(error))


def _coefficient_order(key):
    n, coeff = key
    return n, COEFFICIENTS.index(coeff)


def sigma_payload(data):
    return {
        'group': group_payload(data.owner),
        'complements': [{'n': n, 'coeff': coeff, 'set': sphset_payload(data.complements[(n, coeff)])}
                        for n, coeff in sorted(data.complements.keys(), key=_coefficient_order)]
    }


def parse_sigma_payload(payload):
    _expect(payload, ['group', 'complements'], 'sigma')
    group = parse_group_payload(payload['group'])
    complements = {}
    for entry in _expect_list(payload['complements'], 'complements'):
        _expect(entry, ['n', 'coeff', 'set'], 'complement')
        if entry['coeff'] not in COEFFICIENTS:
            raise ParseError('Unknown coefficient "{}"'.format(entry['coeff']))
        key = (_expect_int(entry['n'], 'n'), entry['coeff'])
        if key in complements:
            raise ParseError('Duplicate complement {}'.format(key))
        complements[key] = parse_sphset_payload(entry['set'])
    try:
        return validate_sigma_data(SigmaData(group, complements))
    except ValueError as error:
        raise ParseError('Invalid sigma data: {}'.format(error))


# Results and reports


def result_payload(result):
    return {
        'tool_version': TOOL_VERSION,
        'theorem': result.provenance,
        'exactness': result.exactness,
        'hypotheses': {k: result.hypotheses[k] for k in sorted(result.hypotheses.keys())},
        'conditions': list(result.conditions),
        'set': sphset_payload(result.set)
    }


def parse_result_payload(payload):
    _expect(payload, ['tool_version', 'theorem', 'exactness', 'hypotheses', 'conditions', 'set'], 'result')
    hypotheses = payload['hypotheses']
    if not isinstance(hypotheses, dict) or not all(isinstance(v, bool) or v is None for v in hypotheses.values()):
        raise ParseError('Hypotheses have to map names to true, false or null')
    conditions = _expect_list(payload['conditions'], 'conditions')
    if not all(isinstance(c, str) for c in conditions):
        raise ParseError('Conditions have to be strings')
    if not isinstance(payload['theorem'], str):
        raise ParseError('Theorem tag has to be a string')
    try:
        return SigmaResult(parse_sphset_payload(payload['set']), payload['exactness'], payload['theorem'],
                           hypotheses, conditions)
    except ParseError:
        raise
    except (ValueError, TypeError) as error:
        raise ParseError('Invalid result: {}'.format(error))


def report_payload(title, theorem, values):
    return {'tool_version': TOOL_VERSION, 'title': title, 'theorem': theorem, 'values': values}


def parse_report_payload(payload):
    return _expect(payload, ['tool_version', 'title', 'theorem', 'values'], 'report')


PAYLOAD_WRITERS = {GROUP: group_payload, SIGMA: sigma_payload, SPHSET: sphset_payload, RESULT: result_payload}
PAYLOAD_READERS = {GROUP: parse_group_payload, SIGMA: parse_sigma_payload, SPHSET: parse_sphset_payload,
                   RESULT: parse_result_payload, REPORT: parse_report_payload}


def document(kind, payload):
    return {'kind': kind, 'version': DOCUMENT_VERSION, 'payload': payload}


def serialize(kind, obj, pretty=False):
    """
    Serializes an object byte-deterministically.
    :param kind: One of KINDS
    :param obj: GroupDescriptor, SigmaData, SphSet, SigmaResult or (for reports) a ready payload dict
    """
    payload = obj if kind == REPORT else PAYLOAD_WRITERS[kind](obj)
    if pretty:
        return json.dumps(document(kind, payload), indent=2) + '\n'
    return json.dumps(document(kind, payload), separators=(',', ':')) + '\n'


def parse(text, expected=None):
    """
    Parses a document.
    :param expected: Kind or list of kinds that are accepted (default: any)
    :return: Tuple (kind, object)
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as error:
        raise ParseError(error.msg, line=error.lineno, column=error.colno)
    except RecursionError:
        raise ParseError('Document nested too deeply')
    _expect(raw, ['kind', 'version', 'payload'], 'document')
    kind = raw['kind']
    if kind not in KINDS:
        raise ParseError('Unknown document kind "{}"'.format(kind))
    if isinstance(expected, str):
        expected = [expected]
    if expected is not None and kind not in expected:
        raise ParseError('Expected a {} document, got "{}"'.format(' or '.join(expected), kind))
    version = _expect_int(raw['version'], 'version')
    if version != DOCUMENT_VERSION:
        raise VersionError('Unsupported document version {} (supported: {})'.format(version, DOCUMENT_VERSION))
    return kind, PAYLOAD_READERS[kind](raw['payload'])


def read_document(path, expected=None):
    with open(path, 'r', encoding='utf-8') as document_file:
        try:
            text = document_file.read()
        except UnicodeDecodeError as error:
            raise ParseError('File is not valid UTF-8: {}'.format(error.reason))
    return parse(text, expected=expected)


def read_sphset(path):
    """Reads a sphset document or the set of a result document"""
    kind, obj = read_document(path, expected=[SPHSET, RESULT])
    return obj if kind == SPHSET else obj.set


def read_sigma(path):
    return read_document(path, expected=SIGMA)[1]
