"""
Semilattice direct systems of finite Boolean algebras, their Plonka sums,
the involutive bisemilattice axiom checker and the decomposition of a raw
algebra back into a direct system through its partition function
x·y := x ∧ (x ∨ y).
"""
from dataclasses import dataclass
import itertools
import logging

import numpy as np

from ibsl_states.algebra.finbool import (
    BooleanAlgebra,
    BooleanHom,
    atoms_of,
    bool_eval,
)
from ibsl_states.algebra.semilattice import (
    join_table_from_order,
    validate_semilattice,
)
from ibsl_states.errors import (
    CapacityExceeded,
    InternalInconsistency,
    MalformedElement,
    NotAHomomorphism,
    NotIBSL,
)
from ibsl_states.utils.config_utils import DEFAULT_CAPS
from ibsl_states.utils.union_find import UnionFind

logger = logging.getLogger(__name__)

PLONKA_OPS = {'join': 2, 'meet': 2, 'complement': 1, 'symdiff': 2,
              'zero': 0, 'one': 0}


@dataclass(frozen=True, order=True)
class PlonkaElement:
    index: int
    inner: int


def prime(name):
    return name[:-1] if name.endswith("'") else name + "'"


@dataclass(frozen=True, eq=False)
class DirectSystem:
    """
    Components indexed by a join-semilattice with one homomorphism
    p_ij per comparable pair i <= j. Build through validate_system.
    """
    index: object
    components: tuple
    homs: dict
    atom_names: tuple

    def __eq__(self, other):
        if not isinstance(other, DirectSystem):
            return NotImplemented
        return self.index == other.index and \
            self.components == other.components and \
            {key: h.dual_map for key, h in self.homs.items()} == \
            {key: h.dual_map for key, h in other.homs.items()}

    __hash__ = object.__hash__

    @property
    def least(self):
        return self.index.least

    @property
    def top_index(self):
        return self.index.top

    @property
    def size(self):
        return sum(c.size for c in self.components)

    def hom(self, i, j):
        try:
            return self.homs[(i, j)]
        except KeyError:
            raise ValueError("No homomorphism p_{}{}: indices {} and {} "
                             "are not ordered".format(i, j, i, j))

    def elements(self):
        """
        :return list elements: Disjoint union, ordered by index then inner
        """
        return [PlonkaElement(i, a)
                for i, component in enumerate(self.components)
                for a in component.elements()]

    def check_element(self, element):
        if not isinstance(element, PlonkaElement) or \
                not 0 <= element.index < self.index.size:
            raise MalformedElement("{} is not a Plonka element".format(element))
        component = self.components[element.index]
        if not isinstance(element.inner, (int, np.integer)) or \
                not 0 <= element.inner <= component.top:
            raise MalformedElement(
                "{} is outside component {}".format(element.inner,
                                                    element.index),
            )

    def element_name(self, element):
        """
        Report name: 0 and 1 in the least component, 0_i and 1_i elsewhere,
        atom names, primed atom names for coatoms and + joins otherwise.
        """
        i, inner = element.index, element.inner
        component = self.components[i]
        suffix = '' if i == self.least else '_' + self.index.names[i]
        if inner == component.top:
            return '1' + suffix
        if inner == 0:
            return '0' + suffix
        bits = atoms_of(inner)
        names = self.atom_names[i]
        if len(bits) == 1:
            return names[bits[0]]
        if len(bits) == component.atom_count - 1:
            missing = (set(range(component.atom_count)) - set(bits)).pop()
            return prime(names[missing])
        return '+'.join(names[t] for t in bits)


@dataclass(frozen=True)
class SystemCheck:
    valid: bool
    system: DirectSystem = None
    violation: str = None
    witness: tuple = None


def validate_system(index, components, homs, atom_names=None):
    """
    Check identity on the diagonal and coherence p_ik = p_jk ∘ p_ij on
    every chain i <= j <= k, through dual maps.

    :param JoinSemilattice index: Validated index semilattice
    :param sequence components: BooleanAlgebra per index
    :param dict homs: (i, j) -> BooleanHom for every i < j, diagonal optional
    :param sequence atom_names: Optional atom names per component
    :return SystemCheck check: Valid with the system, or
        MissingHom / NotIdentityOnDiagonal / BrokenCoherence with witness
    """
    components = tuple(components)
    assert len(components) == index.size,\
        "Expected {} components, got {}".format(index.size, len(components))
    if atom_names is None:
        atom_names = tuple(
            tuple("{}.{}".format(index.names[i], t)
                  for t in range(component.atom_count))
            for i, component in enumerate(components))
    atom_names = tuple(tuple(names) for names in atom_names)
    leq = index.leq_matrix()
    for (i, j), h in homs.items():
        assert leq[i, j], \
            "Homomorphism supplied for unordered pair ({}, {})".format(i, j)
        assert h.source == components[i] and h.target == components[j],\
            "p_{}{} doesn't map component {} to component {}".format(
                i, j, i, j)
    full_homs = {}
    for i, j in index.comparable_pairs():
        if (i, j) in homs:
            full_homs[(i, j)] = homs[(i, j)]
        elif i == j:
            full_homs[(i, j)] = BooleanHom.identity(components[i])
        else:
            return SystemCheck(False, violation='MissingHom', witness=(i, j))
    for i in index.indices():
        dual = full_homs[(i, i)].dual_map
        for t, s in enumerate(dual):
            if s != t:
                return SystemCheck(False, violation='NotIdentityOnDiagonal',
                                   witness=(i, t))
    for i, j, k in index.chains():
        dual_ij = np.array(full_homs[(i, j)].dual_map, dtype=np.int64)
        dual_jk = np.array(full_homs[(j, k)].dual_map, dtype=np.int64)
        dual_ik = np.array(full_homs[(i, k)].dual_map, dtype=np.int64)
        if not dual_ik.size:
            continue
        bad = np.flatnonzero(dual_ik != dual_ij[dual_jk])
        if bad.size:
            return SystemCheck(False, violation='BrokenCoherence',
                               witness=(i, j, k, int(bad[0])))
    system = DirectSystem(index, components, full_homs, atom_names)
    logger.debug("Valid direct system with %d components", len(components))
    return SystemCheck(True, system=system)


def plonka_eval(system, op, *args):
    """
    Evaluate a basic operation of the Plonka sum: push every argument into
    the component of the join of their indices, evaluate there.
    Constants live in the least component.

    :param DirectSystem system: Valid direct system
    :param str op: 'join', 'meet', 'complement', 'symdiff', 'zero' or 'one'
    :param PlonkaElement args: Arguments
    :return PlonkaElement result: Result
    :raise MalformedElement: If an argument isn't an element of the sum
    """
    assert op in PLONKA_OPS, "Unknown operation {}".format(op)
    assert len(args) == PLONKA_OPS[op],\
        "{} takes {} arguments".format(op, PLONKA_OPS[op])
    least = system.least
    if op == 'zero':
        return PlonkaElement(least, 0)
    if op == 'one':
        return PlonkaElement(least, system.components[least].top)
    for element in args:
        system.check_element(element)
    j = args[0].index
    for element in args[1:]:
        j = system.index.join(j, element.index)
    pushed = [system.hom(element.index, j).apply(element.inner)
              for element in args]
    return PlonkaElement(j, bool_eval(system.components[j], op, *pushed))


@dataclass(frozen=True, eq=False)
class RawAlgebra:
    """Algebra of type (2, 2, 1, 0, 0) given by explicit tables"""
    join: np.ndarray
    meet: np.ndarray
    neg: np.ndarray
    zero: int
    one: int
    names: tuple = None

    def __post_init__(self):
        join = np.asarray(self.join, dtype=np.int64)
        meet = np.asarray(self.meet, dtype=np.int64)
        neg = np.asarray(self.neg, dtype=np.int64)
        size = neg.shape[0]
        assert size > 0, "Raw algebra needs a non-empty carrier"
        assert join.shape == (size, size) and meet.shape == (size, size),\
            "Join and meet tables must be {0}x{0}".format(size)
        for table in (join, meet, neg):
            assert table.min() >= 0 and table.max() < size,\
                "Table entries must lie in 0..{}".format(size - 1)
        assert 0 <= self.zero < size and 0 <= self.one < size,\
            "Constants must lie in 0..{}".format(size - 1)
        names = self.names
        if names is None:
            names = tuple(str(x) for x in range(size))
        assert len(names) == size, "Expected {} names".format(size)
        object.__setattr__(self, 'join', join)
        object.__setattr__(self, 'meet', meet)
        object.__setattr__(self, 'neg', neg)
        object.__setattr__(self, 'zero', int(self.zero))
        object.__setattr__(self, 'one', int(self.one))
        object.__setattr__(self, 'names', tuple(names))

    def __eq__(self, other):
        if not isinstance(other, RawAlgebra):
            return NotImplemented
        return self.tables_equal(other)

    __hash__ = object.__hash__

    @property
    def size(self):
        return self.neg.shape[0]

    def tables_equal(self, other):
        return np.array_equal(self.join, other.join) and \
            np.array_equal(self.meet, other.meet) and \
            np.array_equal(self.neg, other.neg) and \
            self.zero == other.zero and self.one == other.one

    def partition_table(self):
        """x·y = x ∧ (x ∨ y) for all x, y"""
        elements = np.arange(self.size)
        return self.meet[elements[:, None], self.join]

    def symdiff_table(self):
        """(x ∧ y′) ∨ (x′ ∧ y) for all x, y"""
        elements = np.arange(self.size)
        left = self.meet[elements[:, None], self.neg[None, :]]
        right = self.meet[self.neg[:, None], elements[None, :]]
        return self.join[left, right]

    def permuted(self, permutation):
        """
        Relabel the carrier: element x becomes permutation[x].

        :param sequence permutation: Bijection of 0..size-1
        :return RawAlgebra relabeled: Isomorphic copy
        """
        perm = np.asarray(permutation, dtype=np.int64)
        inverse = np.argsort(perm)
        join = perm[self.join[inverse[:, None], inverse[None, :]]]
        meet = perm[self.meet[inverse[:, None], inverse[None, :]]]
        neg = perm[self.neg[inverse]]
        names = tuple(self.names[x] for x in inverse)
        return RawAlgebra(join, meet, neg, perm[self.zero], perm[self.one],
                          names)


def check_carrier(size, max_carrier):
    if size > max_carrier:
        raise CapacityExceeded(
            "Carrier of {} elements exceeds cap of {}".format(size,
                                                              max_carrier),
        )


@dataclass(frozen=True, eq=False)
class Decomposition:
    """
    A raw algebra together with the direct system it is the Plonka sum of.
    labeling[x] is the Plonka element of raw element x, back inverts it.
    """
    raw: RawAlgebra
    system: DirectSystem
    labeling: tuple
    back: dict

    @property
    def local_zeros(self):
        return sorted(self.back[PlonkaElement(i, 0)]
                      for i in self.system.index.indices())

    def component_of(self, x):
        return self.labeling[x].index

    def value_index(self):
        """
        :return np.array index: Raw element of every Plonka element, in
            system.elements() order
        """
        return np.array([self.back[e] for e in self.system.elements()],
                        dtype=np.int64)


def plonka_sum(system, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Materialize the Plonka sum. Raw ids follow system.elements(), so the
    least component's 0 has id 0 only when the least index is 0.

    :param DirectSystem system: Valid direct system
    :param int max_carrier: Cap on carrier size
    :return RawAlgebra raw: Tables of the sum
    :return tuple labeling: Plonka element of every raw id
    :raise CapacityExceeded: If the carrier exceeds max_carrier
    """
    check_carrier(system.size, max_carrier)
    labeling = tuple(system.elements())
    offsets = np.cumsum([0] + [c.size for c in system.components])
    size = system.size
    join = np.zeros((size, size), dtype=np.int64)
    meet = np.zeros((size, size), dtype=np.int64)
    neg = np.zeros(size, dtype=np.int64)
    index = system.index
    for i, component_i in enumerate(system.components):
        block_i = slice(offsets[i], offsets[i + 1])
        neg[block_i] = offsets[i] + component_i.table('complement')
        for j, component_j in enumerate(system.components):
            block_j = slice(offsets[j], offsets[j + 1])
            k = index.join(i, j)
            images_i = system.hom(i, k).apply_table()
            images_j = system.hom(j, k).apply_table()
            join[block_i, block_j] = \
                offsets[k] + (images_i[:, None] | images_j[None, :])
            meet[block_i, block_j] = \
                offsets[k] + (images_i[:, None] & images_j[None, :])
    least = system.least
    zero = int(offsets[least])
    one = int(offsets[least] + system.components[least].top)
    names = tuple(system.element_name(e) for e in labeling)
    raw = RawAlgebra(join, meet, neg, zero, one, names)
    return raw, labeling


def sum_decomposition(system, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    :param DirectSystem system: Valid direct system
    :param int max_carrier: Cap on carrier size
    :return Decomposition decomposition: The sum with its known labeling
    """
    raw, labeling = plonka_sum(system, max_carrier)
    back = {element: x for x, element in enumerate(labeling)}
    return Decomposition(raw, system, labeling, back)


@dataclass(frozen=True)
class AxiomCheck:
    passed: bool
    axiom: str = None
    witness: tuple = None
    detail: str = None


def _first(bad):
    """Lexicographically least witness of a boolean failure array"""
    hits = np.argwhere(bad)
    if not hits.size:
        return None
    return tuple(int(x) for x in hits[0])


def check_ibsl(raw, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Exhaustively check the involutive bisemilattice axioms:
    I1 x∨x = x, I2 x∨y = y∨x, I3 (x∨y)∨z = x∨(y∨z), I4 x'' = x,
    I5 x∧y = (x'∨y')', I6 x∧(x'∨y) = x∧y, I7 0∨x = x, I8 1 = 0'.

    :param RawAlgebra raw: Tables
    :param int max_carrier: Cap on carrier size
    :return AxiomCheck check: Pass, or the first failing axiom and binding
    """
    check_carrier(raw.size, max_carrier)
    J, M, N = raw.join, raw.meet, raw.neg
    e = np.arange(raw.size)
    failures = [
        ('I1', J[e, e] != e),
        ('I2', J != J.T),
        ('I3', J[J[:, :, None], e[None, None, :]] !=
         J[e[:, None, None], J[None, :, :]]),
        ('I4', N[N] != e),
        ('I5', M != N[J[N[:, None], N[None, :]]]),
        ('I6', M[e[:, None], J[N[:, None], e[None, :]]] != M),
        ('I7', J[raw.zero, e] != e),
    ]
    for axiom, bad in failures:
        witness = _first(bad)
        if witness is not None:
            return AxiomCheck(False, axiom, witness)
    if N[raw.zero] != raw.one:
        return AxiomCheck(False, 'I8', ())
    return AxiomCheck(True)


IDENTITIES = {
    'absorption': "x ∧ (x ∨ y) = x",
    'dual_absorption': "x ∨ (x ∧ y) = x",
    'distributivity': "x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)",
}


def identity_sides(raw, identity):
    """
    Both sides of a named identity over all bindings.

    :param RawAlgebra raw: Tables
    :param str identity: Key of IDENTITIES
    :return np.array lhs, rhs: Arrays indexed by the bound variables
    """
    J, M = raw.join, raw.meet
    e = np.arange(raw.size)
    if identity == 'absorption':
        return M[e[:, None], J], np.broadcast_to(e[:, None], J.shape)
    if identity == 'dual_absorption':
        return J[e[:, None], M], np.broadcast_to(e[:, None], J.shape)
    if identity == 'distributivity':
        lhs = M[e[:, None, None], J[None, :, :]]
        rhs = J[M[:, :, None], M[:, None, :]]
        return lhs, rhs
    raise ValueError("Unknown identity {}".format(identity))


def check_identity(raw, identity, bindings=None):
    """
    Check an identity exhaustively, or on the given bindings only.

    :param RawAlgebra raw: Tables
    :param str identity: Key of IDENTITIES
    :param list bindings: Optional tuples of raw ids to test
    :return AxiomCheck check: Pass, or the first failing binding with the
        value of the left-hand side in detail
    """
    lhs, rhs = identity_sides(raw, identity)
    if bindings is None:
        witness = _first(lhs != rhs)
    else:
        witness = next((tuple(b) for b in bindings
                        if lhs[tuple(b)] != rhs[tuple(b)]), None)
    if witness is None:
        return AxiomCheck(True)
    return AxiomCheck(False, identity, witness, detail=str(int(lhs[witness])))


def partition_apply(raw, a, b):
    """x·y := x ∧ (x ∨ y)"""
    return int(raw.meet[a, raw.join[a, b]])


def check_partition_function(raw, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Exhaustively check that x·y = x ∧ (x ∨ y) is a partition function.
    PF4 and PF5 are checked for the basic operations ∨, ∧ and ′; PF6 for
    the constants 0 and 1.

    :param RawAlgebra raw: Tables of an involutive bisemilattice
    :param int max_carrier: Cap on carrier size
    :return AxiomCheck check: Pass, or the failing law (detail names the
        operation for PF4/PF5) with its binding
    """
    check_carrier(raw.size, max_carrier)
    J, M, N = raw.join, raw.meet, raw.neg
    P = raw.partition_table()
    e = np.arange(raw.size)
    # x·(y·z) indexed [x, y, z]
    x_yz = P[e[:, None, None], P[None, :, :]]
    failures = [
        ('PF1', None, P[e, e] != e),
        ('PF2', None, x_yz != P[P[:, :, None], e[None, None, :]]),
        ('PF3', None, x_yz != np.swapaxes(x_yz, 1, 2)),
    ]
    # g(x, y)·z against g(x·z, y·z), indexed [x, y, z]
    for op, table in (('join', J), ('meet', M)):
        lhs = P[table[:, :, None], e[None, None, :]]
        rhs = table[P[:, None, :], P[None, :, :]]
        failures.append(('PF4', op, lhs != rhs))
    failures.append(('PF4', 'complement', P[N[:, None], e[None, :]] != N[P]))
    # z·g(x, y) against (z·x)·y, indexed [z, x, y]
    for op, table in (('join', J), ('meet', M)):
        lhs = P[e[:, None, None], table[None, :, :]]
        rhs = P[P[:, :, None], e[None, None, :]]
        failures.append(('PF5', op, lhs != rhs))
    failures.append(('PF5', 'complement', P[e[:, None], N[None, :]] != P))
    failures.append(('PF6', 'zero', P[:, raw.zero] != e))
    failures.append(('PF6', 'one', P[:, raw.one] != e))
    for law, op, bad in failures:
        witness = _first(bad)
        if witness is not None:
            return AxiomCheck(False, law, witness, detail=op)
    return AxiomCheck(True)


def _same_component(raw):
    """same[x, y] iff x = x·y and y = y·x"""
    P = raw.partition_table()
    e = np.arange(raw.size)
    return (P == e[:, None]) & (P.T == e[None, :])


def _boolean_coordinates(raw, members):
    """
    Coordinates of a component: its atoms (by raw id) and the atom bit
    pattern of every member, checked to be an isomorphism onto a powerset.
    """
    J, M, N = raw.join, raw.meet, raw.neg
    member_set = set(members)
    for x, y in itertools.product(members, repeat=2):
        if J[x, y] not in member_set or M[x, y] not in member_set or \
                N[x] not in member_set:
            raise InternalInconsistency(
                "Component of {} isn't closed under the operations".format(x),
            )
    bottoms = [z for z in members if all(J[z, x] == x for x in members)]
    if len(bottoms) != 1:
        raise InternalInconsistency("Component lacks a unique bottom")
    bottom = bottoms[0]

    def below(x, y):
        return J[x, y] == y

    atoms = [a for a in members if a != bottom and
             not any(b not in (bottom, a) and below(b, a) for b in members)]
    coordinates = {x: sum(1 << t for t, a in enumerate(atoms) if below(a, x))
                   for x in members}
    algebra = BooleanAlgebra(len(atoms))
    if sorted(coordinates.values()) != list(algebra.elements()):
        raise InternalInconsistency(
            "Component of {} is not a Boolean algebra".format(bottom),
        )
    for x, y in itertools.product(members, repeat=2):
        cx, cy = coordinates[x], coordinates[y]
        if coordinates[J[x, y]] != cx | cy or \
                coordinates[M[x, y]] != cx & cy or \
                coordinates[N[x]] != algebra.complement(cx):
            raise InternalInconsistency(
                "Component operations at ({}, {}) are not Boolean".format(x, y),
            )
    return algebra, atoms, coordinates


def decompose(raw, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Recover the direct system of an involutive bisemilattice.
    Components are the classes of x ~ y iff x = x·y and y = y·x, sorted by
    size then least raw id. i <= j iff b·a = b for some a in A_i, b in A_j.
    p_ij(x) = x·1_j, checked against every other choice of b in A_j.

    :param RawAlgebra raw: Tables
    :param int max_carrier: Cap on carrier size
    :return Decomposition decomposition: System and labeling
    :raise NotIBSL: If raw fails the axioms
    :raise InternalInconsistency: If a consequence of the axioms fails
    """
    axioms = check_ibsl(raw, max_carrier)
    if not axioms.passed:
        raise NotIBSL(
            "Axiom {} fails at {}".format(axioms.axiom, axioms.witness),
            failure=axioms,
        )
    size = raw.size
    same = _same_component(raw)
    union_find = UnionFind(range(size))
    for x, y in np.argwhere(same):
        union_find.union(int(x), int(y))
    classes = sorted(union_find.classes(), key=lambda c: (len(c), c[0]))
    class_of = np.zeros(size, dtype=np.int64)
    for position, members in enumerate(classes):
        class_of[list(members)] = position
    if not np.array_equal(same, class_of[:, None] == class_of[None, :]):
        raise InternalInconsistency("Component relation is not transitive")

    nbr_classes = len(classes)
    P = raw.partition_table()
    leq = np.zeros((nbr_classes, nbr_classes), dtype=bool)
    for b, a in np.argwhere(P == np.arange(size)[:, None]):
        leq[class_of[a], class_of[b]] = True
    try:
        order_join = join_table_from_order(leq)
    except ValueError as e:
        raise InternalInconsistency("Component order: {}".format(e))
    element_join = np.full((nbr_classes, nbr_classes), -1, dtype=np.int64)
    for x, y in itertools.product(range(size), repeat=2):
        element_join[class_of[x], class_of[y]] = class_of[raw.join[x, y]]
    if not np.array_equal(order_join, element_join):
        raise InternalInconsistency(
            "Component of x ∨ y disagrees with the component order",
        )
    index_names = tuple("c{}".format(position)
                        for position in range(nbr_classes))
    index_check = validate_semilattice(order_join, index_names)
    if not index_check.valid:
        raise InternalInconsistency(
            "Component order is not a semilattice: {}".format(
                index_check.violation),
        )
    index = index_check.semilattice

    components = []
    coordinates = []
    atom_names = []
    for members in classes:
        algebra, atoms, coords = _boolean_coordinates(raw, members)
        components.append(algebra)
        coordinates.append(coords)
        atom_names.append(tuple(raw.names[a] for a in atoms))
    inverse_coordinates = [{c: x for x, c in coords.items()}
                           for coords in coordinates]

    homs = {}
    for i, j in index.comparable_pairs():
        if i == j:
            continue
        top_j = inverse_coordinates[j][components[j].top]
        element_map = {}
        for x in classes[i]:
            image = P[x, top_j]
            if class_of[image] != j:
                raise InternalInconsistency(
                    "{}·1_j lands outside component {}".format(x, j),
                )
            for b in classes[j]:
                if P[x, b] != image:
                    raise InternalInconsistency(
                        "p_{}{}({}) depends on the choice of {}".format(
                            i, j, x, b),
                    )
            element_map[coordinates[i][x]] = coordinates[j][image]
        try:
            homs[(i, j)] = BooleanHom.from_element_map(
                components[i], components[j], element_map)
        except NotAHomomorphism as e:
            raise InternalInconsistency("p_{}{}: {}".format(i, j, e))

    system_check = validate_system(index, components, homs, atom_names)
    if not system_check.valid:
        raise InternalInconsistency(
            "Recovered system is invalid: {} {}".format(
                system_check.violation, system_check.witness),
        )
    system = system_check.system
    labeling = tuple(PlonkaElement(int(class_of[x]),
                                   coordinates[class_of[x]][x])
                     for x in range(size))
    back = {element: x for x, element in enumerate(labeling)}
    decomposition = Decomposition(raw, system, labeling, back)
    _check_transport(decomposition, max_carrier)
    logger.info("Decomposed %d elements into %d components",
                size, nbr_classes)
    return decomposition


def _check_transport(decomposition, max_carrier):
    """The Plonka sum of the recovered system, relabeled, is the raw input"""
    rebuilt, _ = plonka_sum(decomposition.system, max_carrier)
    perm = decomposition.value_index()
    raw = decomposition.raw
    relabeled = rebuilt.permuted(perm)
    if not relabeled.tables_equal(raw):
        raise InternalInconsistency(
            "Plonka sum of the decomposition differs from the input tables",
        )


def _quasi_identity_witness(raw):
    """
    First (x, y, z) with x·y = x, y·x = y, x·z = y·z but x != y, or None.
    """
    P = raw.partition_table()
    e = np.arange(raw.size)
    same = _same_component(raw) & (e[:, None] != e[None, :])
    collide = P[:, None, :] == P[None, :, :]
    return _first(same[:, :, None] & collide)


def is_injective_ibsl(raw, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Decide injectivity of all transition homomorphisms twice: through the
    quasi-identity x·y ≈ x & y·x ≈ y & x·z ≈ y·z ⇒ x ≈ y over all triples,
    and through the dual maps of the decomposition.

    :param RawAlgebra raw: Tables
    :param int max_carrier: Cap on carrier size
    :return bool injective: True if every p_ij is injective
    :raise NotIBSL: If raw fails the axioms
    :raise InternalInconsistency: If the two routes disagree
    """
    decomposition = decompose(raw, max_carrier)
    by_quasi_identity = _quasi_identity_witness(raw) is None
    by_homs = all(h.is_injective()
                  for h in decomposition.system.homs.values())
    if by_quasi_identity != by_homs:
        raise InternalInconsistency(
            "Quasi-identity says injective={}, homomorphisms say {}".format(
                by_quasi_identity, by_homs),
        )
    return by_homs


def is_ngib(raw, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Check the quasi-identity x ≈ x′ ⇒ y ≈ z. For more than one element it
    holds iff no component of the decomposition is trivial, which is
    cross-checked.

    :param RawAlgebra raw: Tables
    :param int max_carrier: Cap on carrier size
    :return bool ngib: True if the quasi-identity holds
    :raise NotIBSL: If raw fails the axioms
    """
    decomposition = decompose(raw, max_carrier)
    fixed_points = np.flatnonzero(raw.neg == np.arange(raw.size))
    ngib = not (fixed_points.size and raw.size > 1)
    if raw.size > 1:
        no_trivial = not any(c.is_trivial()
                             for c in decomposition.system.components)
        if no_trivial != ngib:
            raise InternalInconsistency(
                "Quasi-identity and component scan disagree on triviality",
            )
    return ngib


def systems_isomorphic(first, second):
    """
    Search for an isomorphism of direct systems: an index bijection phi
    preserving joins and atom counts, and atom bijections psi_i with
    psi_i ∘ dual(p_ij) = dual(p_phi(i)phi(j)) ∘ psi_j on every pair.

    :param DirectSystem first: Direct system
    :param DirectSystem second: Direct system
    :return tuple/None isomorphism: (phi, psis) with phi[i] the image index
        and psis[i][t] the image atom, or None if not isomorphic
    """
    size = first.index.size
    counts_1 = [c.atom_count for c in first.components]
    counts_2 = [c.atom_count for c in second.components]
    if size != second.index.size or sorted(counts_1) != sorted(counts_2):
        return None
    join_1 = first.index.join_table
    join_2 = second.index.join_table
    pairs = [(i, j) for i, j in first.index.comparable_pairs() if i != j]
    for phi in itertools.permutations(range(size)):
        phi = np.array(phi)
        if any(counts_1[i] != counts_2[phi[i]] for i in range(size)):
            continue
        if not np.array_equal(join_2[phi[:, None], phi[None, :]],
                              phi[join_1]):
            continue
        psis = _match_atoms(first, second, phi, pairs)
        if psis is not None:
            return tuple(int(x) for x in phi), psis
    return None


def _match_atoms(first, second, phi, pairs):
    size = first.index.size
    psis = [None] * size

    def consistent(k):
        for i, j in pairs:
            if k not in (i, j) or psis[i] is None or psis[j] is None:
                continue
            dual_1 = first.hom(i, j).dual_map
            dual_2 = second.hom(int(phi[i]), int(phi[j])).dual_map
            for t, s in enumerate(dual_1):
                if psis[i][s] != dual_2[psis[j][t]]:
                    return False
        return True

    def assign(k):
        if k == size:
            return True
        for psi in itertools.permutations(
                range(first.components[k].atom_count)):
            psis[k] = psi
            if consistent(k) and assign(k + 1):
                return True
        psis[k] = None
        return False

    if assign(0):
        return tuple(psis)
    return None
