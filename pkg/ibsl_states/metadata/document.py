"""
Line-oriented algebra documents. A document has a header

    # optional comment lines
    name <name>
    kind system | raw | state | measure

followed by a body for its kind:

    system   semilattice / elements <i> ... / leq <i> <j> ... / end,
             component <i> atoms=<n> [atom names],
             hom <i> -> <j>: <target atom>=<source atom>, ...
    raw      raw / elements ... / zero <e> / one <e> / neg: ... /
             join <e>: ... / meet <e>: ... / end
    state    top-measure <atom>=<p/q> ...  or
             component <i> <atom>=<p/q> ... for every index
    measure  weights <atom>=<p/q> ...

Homs out of a one-atom component or into a trivial one may be left out.
print_document emits
the canonical form, which parse reads back to an equal Document.
"""
from dataclasses import dataclass, field
import logging
import re

import numpy as np

from ibsl_states.algebra.finbool import (
    BooleanAlgebra,
    BooleanHom,
    check_atom_count,
)
from ibsl_states.algebra.plonka import RawAlgebra, validate_system
from ibsl_states.algebra.semilattice import (
    join_table_from_order,
    transitive_closure,
    validate_semilattice,
)
from ibsl_states.errors import (
    DocumentError,
    DocumentSyntaxError,
    DuplicateName,
    UnresolvedReference,
)
import ibsl_states.utils.cli_utils as cli_utils
from ibsl_states.utils.config_utils import DEFAULT_CAPS

logger = logging.getLogger(__name__)

KINDS = ('system', 'raw', 'state', 'measure')
NAME_PATTERN = re.compile(r"^[^\s=,:#]+$")
ATOMS_PATTERN = re.compile(r"^atoms=(\d+)$")
HOM_PATTERN = re.compile(r"^hom\s+(\S+)\s*->\s*([^\s:]+)\s*:(.*)$")
ROW_PATTERN = re.compile(r"^(join|meet)\s+(\S+)\s*:(.*)$")


@dataclass(frozen=True)
class Document:
    """
    body holds tuples only. system: indices, leq, components
    ((index, atom count, atom names)), homs ((source, target,
    ((target atom, source atom), ...))). raw: elements, zero, one, neg,
    join, meet (rows of names). state: top_measure or components
    ((index, ((atom, weight), ...)), ...). measure: weights.
    """
    kind: str
    name: str
    body: dict
    comments: tuple = field(default=())


class _Line:

    def __init__(self, number, text):
        self.number = number
        self.text = text.rstrip()
        self.tokens = [(m.start() + 1, m.group())
                       for m in re.finditer(r"\S+", self.text)]

    @property
    def keyword(self):
        return self.tokens[0][1] if self.tokens else None

    def column(self, position):
        if position < len(self.tokens):
            return self.tokens[position][0]
        return len(self.text) + 1

    def error(self, position, expected):
        return DocumentSyntaxError(self.number, self.column(position),
                                   expected)

    def error_at(self, fragment, expected):
        position = self.text.find(fragment)
        column = position + 1 if position >= 0 else 1
        return DocumentSyntaxError(self.number, column, expected)


class _Lines:
    """Cursor over the non-blank, non-comment lines"""

    def __init__(self, text):
        self.comments = []
        self.lines = []
        self.last = 1
        for number, raw_line in enumerate(text.splitlines(), start=1):
            self.last = number
            stripped = raw_line.strip()
            if not stripped:
                continue
            if stripped.startswith('#'):
                self.comments.append(stripped[1:].strip())
                continue
            self.lines.append(_Line(number, raw_line))
        self.position = 0

    def peek(self):
        if self.position < len(self.lines):
            return self.lines[self.position]
        return None

    def next(self, expected):
        line = self.peek()
        if line is None:
            column = 1 if not self.lines else \
                len(self.lines[-1].text) + 1
            number = 1 if not self.lines else self.lines[-1].number
            raise DocumentSyntaxError(number, column, expected)
        self.position += 1
        return line


def _name(line, position, expected='a name'):
    if position >= len(line.tokens):
        raise line.error(position, expected)
    token = line.tokens[position][1]
    if NAME_PATTERN.match(token) is None:
        raise line.error(position, expected)
    return token


def _expect_end(line, count):
    if len(line.tokens) > count:
        raise line.error(count, 'end of line')


def _keyword(lines, keyword):
    line = lines.next("'{}'".format(keyword))
    if line.keyword != keyword:
        raise line.error(0, "'{}'".format(keyword))
    return line


def _names_after_colon(line, rest):
    names = rest.split()
    for name in names:
        if NAME_PATTERN.match(name) is None:
            raise line.error_at(name, 'a name')
    return tuple(names)


def _pairs(line, text, value_parser):
    """Parse 'x=y, u=v' or 'x=y u=v' into ((x, value), ...)"""
    pairs = []
    for item in re.split(r"[,\s]+", text.strip()):
        if not item:
            continue
        key, sep, value = item.partition('=')
        if not sep or NAME_PATTERN.match(key) is None or not value:
            raise line.error_at(item, 'name=value')
        try:
            pairs.append((key, value_parser(value)))
        except ValueError:
            raise line.error_at(item, 'a rational p/q')
    if not pairs:
        raise line.error(len(line.tokens), 'name=value')
    return tuple(pairs)


def _rational(value):
    return cli_utils.parse_rational(value)


def _atom_name(value):
    if NAME_PATTERN.match(value) is None:
        raise ValueError(value)
    return value


def _parse_semilattice(lines):
    _expect_end(_keyword(lines, 'semilattice'), 1)
    line = _keyword(lines, 'elements')
    indices = tuple(_name(line, p) for p in range(1, len(line.tokens)))
    if not indices:
        raise line.error(1, 'an index name')
    leq = []
    while True:
        line = lines.next("'leq' or 'end'")
        if line.keyword == 'end':
            _expect_end(line, 1)
            break
        if line.keyword != 'leq':
            raise line.error(0, "'leq' or 'end'")
        leq.append((_name(line, 1), _name(line, 2)))
        _expect_end(line, 3)
    return indices, tuple(leq)


def _parse_system(lines):
    indices, leq = _parse_semilattice(lines)
    components = []
    homs = []
    while lines.peek() is not None:
        line = lines.next("'component' or 'hom'")
        if line.keyword == 'component':
            index = _name(line, 1, 'an index name')
            if len(line.tokens) < 3:
                raise line.error(2, 'atoms=<n>')
            match = ATOMS_PATTERN.match(line.tokens[2][1])
            if match is None:
                raise line.error(2, 'atoms=<n>')
            atom_count = int(match.group(1))
            names = tuple(_name(line, p)
                          for p in range(3, len(line.tokens)))
            if names and len(names) != atom_count:
                raise line.error(3 + min(len(names), atom_count),
                                 '{} atom names'.format(atom_count))
            components.append((index, atom_count, names))
        elif line.keyword == 'hom':
            match = HOM_PATTERN.match(line.text.strip())
            if match is None:
                raise line.error(1, '<i> -> <j>:')
            pairs = _pairs(line, match.group(3), _atom_name)
            homs.append((match.group(1), match.group(2), pairs))
        else:
            raise line.error(0, "'component' or 'hom'")
    return {'indices': indices, 'leq': leq,
            'components': tuple(components), 'homs': tuple(homs)}


def _parse_raw(lines):
    _expect_end(_keyword(lines, 'raw'), 1)
    line = _keyword(lines, 'elements')
    elements = tuple(_name(line, p) for p in range(1, len(line.tokens)))
    if not elements:
        raise line.error(1, 'an element name')
    line = _keyword(lines, 'zero')
    zero = _name(line, 1)
    _expect_end(line, 2)
    line = _keyword(lines, 'one')
    one = _name(line, 1)
    _expect_end(line, 2)
    line = lines.next("'neg:'")
    if not line.text.strip().startswith('neg:'):
        raise line.error(0, "'neg:'")
    neg = _names_after_colon(line, line.text.strip()[len('neg:'):])
    rows = {'join': [], 'meet': []}
    while True:
        line = lines.next("'join', 'meet' or 'end'")
        if line.keyword == 'end':
            _expect_end(line, 1)
            break
        match = ROW_PATTERN.match(line.text.strip())
        if match is None:
            raise line.error(0, "'join <e>:', 'meet <e>:' or 'end'")
        rows[match.group(1)].append(
            (match.group(2), _names_after_colon(line, match.group(3))))
    return {'elements': elements, 'zero': zero, 'one': one, 'neg': neg,
            'join': tuple(rows['join']), 'meet': tuple(rows['meet'])}


def _parse_state(lines):
    line = lines.next("'top-measure' or 'component'")
    if line.keyword == 'top-measure':
        pairs = _pairs(line, line.text.strip()[len('top-measure'):],
                       _rational)
        return {'top_measure': pairs}
    components = []
    while line is not None:
        if line.keyword != 'component':
            raise line.error(0, "'top-measure' or 'component'")
        index = _name(line, 1, 'an index name')
        rest = line.text.strip()[len('component'):].strip()[len(index):]
        components.append((index, _pairs(line, rest, _rational)))
        line = lines.next('component') if lines.peek() is not None else None
    return {'components': tuple(components)}


def _parse_measure(lines):
    line = _keyword(lines, 'weights')
    return {'weights': _pairs(line, line.text.strip()[len('weights'):],
                              _rational)}


BODY_PARSERS = {
    'system': _parse_system,
    'raw': _parse_raw,
    'state': _parse_state,
    'measure': _parse_measure,
}


def parse(text):
    """
    Parse a document. Only syntax is checked here; names are resolved
    by the resolve_* functions.

    :param str text: Document text
    :return Document document: Parsed document
    :raise DocumentSyntaxError: With 1-based line and column
    """
    lines = _Lines(text)
    line = _keyword(lines, 'name')
    name = _name(line, 1, 'a document name')
    _expect_end(line, 2)
    line = _keyword(lines, 'kind')
    if len(line.tokens) < 2 or line.tokens[1][1] not in KINDS:
        raise line.error(1, ' | '.join(KINDS))
    kind = line.tokens[1][1]
    _expect_end(line, 2)
    body = BODY_PARSERS[kind](lines)
    extra = lines.peek()
    if extra is not None:
        raise extra.error(0, 'end of document')
    return Document(kind, name, body, tuple(lines.comments))


def read_document(path):
    """
    :param str path: Document file
    :return Document document: Parsed document
    """
    with open(path, 'r', encoding='utf-8') as read_file:
        return parse(read_file.read())


def _format_pairs(pairs, formatter=str):
    return ' '.join('{}={}'.format(key, formatter(value))
                    for key, value in pairs)


def print_document(document):
    """
    :param Document document: Document to print
    :return str text: Canonical text that parses back to document
    """
    out = ['# {}'.format(c) if c else '#' for c in document.comments]
    out.append('name {}'.format(document.name))
    out.append('kind {}'.format(document.kind))
    body = document.body
    if document.kind == 'system':
        out.append('semilattice')
        out.append('  elements {}'.format(' '.join(body['indices'])))
        out.extend('  leq {} {}'.format(i, j) for i, j in body['leq'])
        out.append('end')
        for index, atom_count, names in body['components']:
            out.append(' '.join(['component', index,
                                 'atoms={}'.format(atom_count)] +
                                list(names)))
        for source, target, pairs in body['homs']:
            out.append('hom {} -> {}: {}'.format(
                source, target,
                ', '.join('{}={}'.format(t, s) for t, s in pairs)))
    elif document.kind == 'raw':
        out.append('raw')
        out.append('  elements {}'.format(' '.join(body['elements'])))
        out.append('  zero {}'.format(body['zero']))
        out.append('  one {}'.format(body['one']))
        out.append('  neg: {}'.format(' '.join(body['neg'])))
        for op in ('join', 'meet'):
            out.extend('  {} {}: {}'.format(op, e, ' '.join(row))
                       for e, row in body[op])
        out.append('end')
    elif document.kind == 'state':
        if 'top_measure' in body:
            out.append('top-measure {}'.format(_format_pairs(
                body['top_measure'], cli_utils.format_rational)))
        else:
            out.extend('component {} {}'.format(
                index, _format_pairs(pairs, cli_utils.format_rational))
                for index, pairs in body['components'])
    else:
        out.append('weights {}'.format(_format_pairs(
            body['weights'], cli_utils.format_rational)))
    return '\n'.join(out) + '\n'


def _lookup(names, name, what):
    try:
        return names.index(name)
    except ValueError:
        raise UnresolvedReference("Undeclared {} {}".format(what, name))


def _unique(names, what):
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateName("{} {} declared twice".format(what, name))
        seen.add(name)


def _expect_kind(document, kind):
    if document.kind != kind:
        raise DocumentError("Expected a {} document, got {}".format(
            kind, document.kind))


def resolve_system(document, max_atoms=DEFAULT_CAPS['max_atoms']):
    """
    Resolve names and build the direct system.

    :param Document document: A system document
    :param int max_atoms: Cap on the atoms of any component
    :return SystemCheck check: validate_system's verdict on the document
    :raise UnresolvedReference: For undeclared indices or atoms
    :raise DuplicateName: For names declared twice
    :raise DocumentError: If the order isn't a join-semilattice, or the
        document is of another kind
    :raise CapacityExceeded: If a component has more than max_atoms atoms
    """
    _expect_kind(document, 'system')
    body = document.body
    indices = list(body['indices'])
    _unique(indices, 'Index')
    size = len(indices)
    order = np.zeros((size, size), dtype=bool)
    for i, j in body['leq']:
        order[_lookup(indices, i, 'index'), _lookup(indices, j, 'index')] = True
    order = transitive_closure(order)
    try:
        join_table = join_table_from_order(order)
    except ValueError as e:
        raise DocumentError("Index order is not a join-semilattice: "
                            "{}".format(e))
    semilattice_check = validate_semilattice(join_table, tuple(indices))
    if not semilattice_check.valid:
        raise DocumentError("Index order fails {} at {}".format(
            semilattice_check.violation, semilattice_check.witness))
    semilattice = semilattice_check.semilattice

    components = [None] * size
    atom_names = [None] * size
    for index, atom_count, names in body['components']:
        i = _lookup(indices, index, 'index')
        if components[i] is not None:
            raise DuplicateName("Component {} declared twice".format(index))
        check_atom_count(atom_count, max_atoms)
        if not names:
            names = tuple('{}.{}'.format(index, t) for t in range(atom_count))
        _unique(names, 'Atom')
        components[i] = BooleanAlgebra(atom_count)
        atom_names[i] = tuple(names)
    for i, component in enumerate(components):
        if component is None:
            raise UnresolvedReference(
                "Index {} has no component".format(indices[i]))

    homs = {}
    for source, target, pairs in body['homs']:
        i = _lookup(indices, source, 'index')
        j = _lookup(indices, target, 'index')
        if (i, j) in homs:
            raise DuplicateName("hom {} -> {} declared twice".format(source,
                                                                     target))
        dual = [None] * components[j].atom_count
        for target_atom, source_atom in pairs:
            t = _lookup(atom_names[j], target_atom, 'atom')
            dual[t] = _lookup(atom_names[i], source_atom, 'atom')
        if None in dual:
            raise UnresolvedReference(
                "Atom {} of {} has no image in hom {} -> {}".format(
                    atom_names[j][dual.index(None)], target, source, target))
        if not semilattice.leq(i, j):
            raise DocumentError("hom {} -> {} between unordered "
                                "indices".format(source, target))
        homs[(i, j)] = BooleanHom(components[i], components[j], tuple(dual))
    for i, j in semilattice.comparable_pairs():
        if i != j and (i, j) not in homs and \
                (components[i].atom_count == 1 or
                 components[j].atom_count == 0):
            homs[(i, j)] = BooleanHom(components[i], components[j],
                                      (0,) * components[j].atom_count)
    logger.debug("Resolved system %s with %d indices", document.name, size)
    return validate_system(semilattice, components, homs, atom_names)


def resolve_raw(document):
    """
    :param Document document: A raw document
    :return RawAlgebra raw: Tables over the declared element order
    :raise UnresolvedReference: For undeclared elements or missing rows
    :raise DuplicateName: For elements or rows declared twice
    """
    _expect_kind(document, 'raw')
    body = document.body
    elements = list(body['elements'])
    _unique(elements, 'Element')
    size = len(elements)

    def ids(row):
        if len(row) != size:
            raise DocumentError("Row has {} entries, expected {}".format(
                len(row), size))
        return [_lookup(elements, e, 'element') for e in row]

    tables = {}
    for op in ('join', 'meet'):
        table = [None] * size
        for e, row in body[op]:
            x = _lookup(elements, e, 'element')
            if table[x] is not None:
                raise DuplicateName("{} row {} declared twice".format(op, e))
            table[x] = ids(row)
        for x, row in enumerate(table):
            if row is None:
                raise UnresolvedReference(
                    "No {} row for {}".format(op, elements[x]))
        tables[op] = np.array(table, dtype=np.int64)
    return RawAlgebra(tables['join'], tables['meet'],
                      np.array(ids(body['neg']), dtype=np.int64),
                      _lookup(elements, body['zero'], 'element'),
                      _lookup(elements, body['one'], 'element'),
                      tuple(elements))


def _weights(pairs, names, what):
    weights = [None] * len(names)
    for atom, weight in pairs:
        t = _lookup(list(names), atom, 'atom')
        if weights[t] is not None:
            raise DuplicateName("Atom {} weighted twice".format(atom))
        weights[t] = weight
    if None in weights:
        raise UnresolvedReference("Atom {} of {} has no weight".format(
            names[weights.index(None)], what))
    return tuple(weights)


def resolve_measure(document, atom_names,
                    max_atoms=DEFAULT_CAPS['max_atoms']):
    """
    :param Document document: A measure document
    :param sequence atom_names: Atom names of the algebra measured
    :param int max_atoms: Cap on the atoms weighted
    :return tuple weights: Weight of every atom, in atom order
    :raise CapacityExceeded: If the document weights more than max_atoms
    """
    _expect_kind(document, 'measure')
    check_atom_count(len(document.body['weights']), max_atoms)
    return _weights(document.body['weights'], atom_names, 'the algebra')


def resolve_state(document, system):
    """
    :param Document document: A state document
    :param DirectSystem system: System the state lives on
    :return tuple/list weights: ('top', weights) for a top measure, or
        ('components', weight vectors per index)
    """
    _expect_kind(document, 'state')
    body = document.body
    names = list(system.index.names)
    if 'top_measure' in body:
        top = system.top_index
        return 'top', _weights(body['top_measure'], system.atom_names[top],
                               names[top])
    weights = [None] * len(names)
    for index, pairs in body['components']:
        i = _lookup(names, index, 'index')
        if weights[i] is not None:
            raise DuplicateName("Component {} weighted twice".format(index))
        weights[i] = _weights(pairs, system.atom_names[i], index)
    for i, w in enumerate(weights):
        if w is None:
            raise UnresolvedReference(
                "Index {} has no weights".format(names[i]))
    return 'components', weights


def system_document(system, name, comments=()):
    """Document of a direct system, listing every non-identity hom"""
    indices = tuple(system.index.names)
    leq = tuple((indices[i], indices[j])
                for i, j in system.index.comparable_pairs() if i != j)
    components = tuple((indices[i], c.atom_count, system.atom_names[i])
                       for i, c in enumerate(system.components))
    homs = tuple(
        (indices[i], indices[j],
         tuple((system.atom_names[j][t], system.atom_names[i][s])
               for t, s in enumerate(h.dual_map)))
        for (i, j), h in sorted(system.homs.items())
        if i != j and system.components[j].atom_count > 0)
    body = {'indices': indices, 'leq': leq, 'components': components,
            'homs': homs}
    return Document('system', name, body, tuple(comments))


def raw_document(raw, name, comments=()):
    names = raw.names

    def row(values):
        return tuple(names[v] for v in values)

    body = {
        'elements': tuple(names),
        'zero': names[raw.zero],
        'one': names[raw.one],
        'neg': row(raw.neg),
        'join': tuple((names[x], row(raw.join[x])) for x in range(raw.size)),
        'meet': tuple((names[x], row(raw.meet[x])) for x in range(raw.size)),
    }
    return Document('raw', name, body, tuple(comments))
