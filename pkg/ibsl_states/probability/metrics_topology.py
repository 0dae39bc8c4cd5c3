"""
The state pseudometric d_s = s ∘ △ on a Plonka sum, its Kolmogorov
quotient, sections of the projection, and the quotient topology checks.
A finite pseudometric topology is the partition topology of its
zero-distance classes, so opens are unions of classes and are handled as
bit patterns over classes.
"""
from dataclasses import dataclass
from fractions import Fraction
import itertools
import logging

import numpy as np

from ibsl_states.algebra.booleanisation import booleanise
from ibsl_states.algebra.finbool import BooleanAlgebra, BooleanHom
from ibsl_states.errors import (
    BadChooser,
    HypothesesUnmet,
    InternalInconsistency,
    NotAHomomorphism,
)
from ibsl_states.probability.states import is_faithful, phi
from ibsl_states.utils.config_utils import DEFAULT_CAPS
import ibsl_states.utils.sweep_utils as sweep_utils
from ibsl_states.utils.union_find import UnionFind

logger = logging.getLogger(__name__)


def zero_classes(distances):
    """
    :param np.array distances: Square table of rationals
    :return tuple classes: Classes of d = 0, each sorted, by least member
    """
    union_find = UnionFind(range(distances.shape[0]))
    for x, y in np.argwhere((distances == 0).astype(bool)):
        union_find.union(int(x), int(y))
    return tuple(union_find.classes())


def pseudometric_axioms(distances):
    """
    :param np.array distances: Square table of rationals
    :return tuple axioms: (name, holds) for nonnegativity, zero diagonal,
        symmetry and the triangle inequality over all triples
    """
    D = distances
    triangle = (D[:, None, :] <= D[:, :, None] + D[None, :, :]).astype(bool)
    return (
        ('nonnegative', bool((D >= 0).astype(bool).all())),
        ('zero_diagonal', all(d == 0 for d in np.diagonal(D))),
        ('symmetric', bool((D == D.T).astype(bool).all())),
        ('triangle', bool(triangle.all())),
    )


@dataclass(frozen=True, eq=False)
class PseudometricSpace:
    decomposition: object
    state: object
    values: tuple
    distances: np.ndarray
    zero_classes: tuple
    axioms: tuple

    @property
    def size(self):
        return self.distances.shape[0]

    def distance(self, x, y):
        return self.distances[x, y]

    def class_masks(self):
        """Bit pattern over raw ids of every zero class"""
        return [sum(1 << x for x in members) for members in self.zero_classes]


def pseudometric(decomposition, state):
    """
    d(a, b) = s(a △ b) with △ evaluated in the Plonka sum; the four
    pseudometric axioms are checked exhaustively.

    :param Decomposition decomposition: Raw algebra with its decomposition
    :param State state: Valid state on decomposition.system
    :return PseudometricSpace space: Distances and zero classes
    :raise InternalInconsistency: If an axiom fails
    """
    values = np.array(state.value_table(decomposition), dtype=object)
    distances = values[decomposition.raw.symdiff_table()]
    axioms = pseudometric_axioms(distances)
    failed = [name for name, holds in axioms if not holds]
    if failed:
        raise InternalInconsistency(
            "State distance breaks {}".format(", ".join(failed)),
        )
    return PseudometricSpace(decomposition, state, tuple(values), distances,
                             zero_classes(distances), axioms)


@dataclass(frozen=True)
class ComponentIdentities:
    holds: bool
    identity: str = None
    witness: tuple = None


def component_distance_identities(space):
    """
    Within every single component: d(a, b) = d(a′, b′) on all pairs and
    d(a ∨ b, c ∨ d) <= d(a, c) + d(b, d) on all quadruples.

    :param PseudometricSpace space: State pseudometric
    :return ComponentIdentities check: holds, or the first failure
    """
    raw = space.decomposition.raw
    D = space.distances
    members = {}
    for x, element in enumerate(space.decomposition.labeling):
        members.setdefault(element.index, []).append(x)
    for i in sorted(members):
        ids = members[i]
        for a, b in itertools.product(ids, repeat=2):
            if D[a, b] != D[raw.neg[a], raw.neg[b]]:
                return ComponentIdentities(False, 'complement', (a, b))
        for a, b, c, d in itertools.product(ids, repeat=4):
            if D[raw.join[a, b], raw.join[c, d]] > D[a, c] + D[b, d]:
                return ComponentIdentities(False, 'join', (a, b, c, d))
    return ComponentIdentities(True)


def _faithful_injective(space):
    system = space.decomposition.system
    injective = all(h.is_injective() for h in system.homs.values())
    return injective and is_faithful(space.state)


def _fibers(space, booleanisation):
    """Raw ids of every Booleanisation class, indexed by quotient element"""
    back = space.decomposition.back
    return [tuple(sorted(back[e] for e in members))
            for members in booleanisation.classes]


def is_metric(space, booleanisation=None):
    """
    True iff every zero class is a singleton. For faithful states the
    answer is cross-checked against every Booleanisation class being a
    singleton.

    :param PseudometricSpace space: State pseudometric
    :param Booleanisation booleanisation: Optional precomputed quotient
    :return bool metric: Whether d separates points
    """
    metric = all(len(members) == 1 for members in space.zero_classes)
    if is_faithful(space.state):
        if booleanisation is None:
            booleanisation = booleanise(space.decomposition.system)
        identity = all(len(members) == 1 for members in booleanisation.classes)
        if identity != metric:
            raise InternalInconsistency(
                "metric={} but trivial identifications={}".format(metric,
                                                                  identity),
            )
    return metric


def quotient_distances(state, booleanisation):
    """d_∞(m, n) = phi(s)(m △ n) on the quotient"""
    mu = phi(state)
    quotient = booleanisation.quotient
    return np.array([[mu.value(m ^ n) for n in quotient.elements()]
                     for m in quotient.elements()], dtype=object)


@dataclass(frozen=True, eq=False)
class KolmogorovCertificate:
    classes: tuple
    projection_classes: tuple
    hypotheses_met: bool
    classes_match: bool
    quotient_distances: np.ndarray
    distances_transported: bool
    quotient_is_metric: bool


def kolmogorov_quotient(space, booleanisation=None):
    """
    Indistinguishability classes of the state topology compared with the
    Booleanisation classes. With an injective system and a faithful state
    they must coincide; otherwise the comparison is informational.
    Also checks d(a, b) = d_∞(pi(a), pi(b)) on every pair.

    :param PseudometricSpace space: State pseudometric
    :param Booleanisation booleanisation: Optional precomputed quotient
    :return KolmogorovCertificate certificate: Both partitions and verdicts
    """
    decomposition = space.decomposition
    if booleanisation is None:
        booleanisation = booleanise(decomposition.system)
    fibers = tuple(sorted(_fibers(space, booleanisation)))
    hypotheses = _faithful_injective(space)
    match = set(fibers) == set(space.zero_classes)
    if hypotheses and not match:
        raise InternalInconsistency(
            "Zero classes differ from Booleanisation classes",
        )
    d_quotient = quotient_distances(space.state, booleanisation)
    pi = booleanisation.projection_array(decomposition)
    transported = bool((d_quotient[pi[:, None], pi[None, :]] ==
                        space.distances).astype(bool).all())
    if not transported:
        raise InternalInconsistency("Distances don't factor through pi")
    off_diagonal = ~np.eye(d_quotient.shape[0], dtype=bool)
    quotient_metric = bool((d_quotient > 0).astype(bool)[off_diagonal].all())
    return KolmogorovCertificate(space.zero_classes, fibers, hypotheses,
                                 match, d_quotient, transported,
                                 quotient_metric)


@dataclass(frozen=True)
class Section:
    """representatives[m] is the raw element chosen in the class of m"""
    representatives: tuple


def canonical_chooser(m, members):
    return members[0]


def make_section(space, booleanisation=None, chooser=canonical_chooser):
    """
    :param PseudometricSpace space: State pseudometric
    :param Booleanisation booleanisation: Optional precomputed quotient
    :param callable chooser: (quotient element, sorted raw ids of its
        class) -> chosen raw id; defaults to the least raw id
    :return Section section: One representative per class
    :raise BadChooser: If a choice is missing or outside its class
    """
    if booleanisation is None:
        booleanisation = booleanise(space.decomposition.system)
    representatives = []
    for m, members in enumerate(_fibers(space, booleanisation)):
        choice = chooser(m, members)
        if choice is None:
            raise BadChooser("No representative for class {}".format(m))
        if choice not in members:
            raise BadChooser(
                "{} is not in the class of {}".format(choice, m),
            )
        representatives.append(int(choice))
    return Section(tuple(representatives))


def count_sections(space, booleanisation=None):
    """Product of the class sizes"""
    if booleanisation is None:
        booleanisation = booleanise(space.decomposition.system)
    count = 1
    for members in booleanisation.classes:
        count *= len(members)
    return count


def _quotient_classes(state, booleanisation):
    return zero_classes(quotient_distances(state, booleanisation))


@dataclass(frozen=True)
class SectionCertificate:
    projection_identity: bool
    continuous: bool
    dense: bool
    state_preserving: bool

    @property
    def passed(self):
        return self.projection_identity and self.continuous and \
            self.dense and self.state_preserving


def verify_section(space, section, booleanisation=None):
    """
    Check pi ∘ sigma = id, continuity (preimages of basic opens are
    open), density of the image and s(sigma(m)) = phi(s)(m).

    :param PseudometricSpace space: State pseudometric
    :param Section section: Section to certify
    :param Booleanisation booleanisation: Optional precomputed quotient
    :return SectionCertificate certificate: The four verdicts
    """
    if booleanisation is None:
        booleanisation = booleanise(space.decomposition.system)
    pi = booleanisation.projection_array(space.decomposition)
    reps = section.representatives
    identity = all(pi[x] == m for m, x in enumerate(reps))
    quotient_classes = _quotient_classes(space.state, booleanisation)
    class_of = {}
    for c, members in enumerate(space.zero_classes):
        for x in members:
            class_of[x] = c
    continuous = all(len({class_of[reps[m]] for m in q_class}) == 1
                     for q_class in quotient_classes)
    met = {class_of[x] for x in reps}
    dense = met == set(range(len(space.zero_classes)))
    mu = phi(space.state)
    preserving = all(space.values[x] == mu.value(m)
                     for m, x in enumerate(reps))
    return SectionCertificate(identity, continuous, dense, preserving)


@dataclass(frozen=True)
class TopologyReport:
    hypotheses_met: bool
    zero_class_count: int
    quotient_class_count: int
    open_count: int
    saturated: bool
    pi_open: bool
    pi_closed: bool
    closed_interior: bool
    open_bijection: bool
    interior_method: str
    interior_preserving: bool
    interior_witness: tuple
    deletion_witnesses: tuple
    fibers_singleton: bool
    interior_criterion_holds: bool
    section_image_open: bool
    reg_atoms: tuple
    reg_iso: bool
    skipped: tuple = ()


class _PartitionTopology:
    """Partition topologies on B and on the quotient, as bit patterns"""

    def __init__(self, space, booleanisation):
        self.size = space.size
        self.class_masks = space.class_masks()
        pi = booleanisation.projection_array(space.decomposition)
        self.pi = pi.tolist()
        self.quotient_masks = [sum(1 << m for m in members)
                               for members in _quotient_classes(
                                   space.state, booleanisation)]
        self.class_images = [self.project(mask) for mask in self.class_masks]

    def project(self, mask):
        image = 0
        x = 0
        while mask:
            if mask & 1:
                image |= 1 << self.pi[x]
            mask >>= 1
            x += 1
        return image

    def preimage(self, quotient_mask):
        return sum(1 << x for x in range(self.size)
                   if (quotient_mask >> self.pi[x]) & 1)

    @staticmethod
    def interior(mask, class_masks):
        return sum(c for c in class_masks if c & mask == c)

    @staticmethod
    def is_open(mask, class_masks):
        return all(c & mask in (0, c) for c in class_masks)

    def union_of_classes(self, selection):
        return sum(c for k, c in enumerate(self.class_masks)
                   if (selection >> k) & 1)

    def interior_commutes(self, mask):
        """pi(Int(A)) == Int(pi(A))"""
        projected_interior = 0
        for c, image in zip(self.class_masks, self.class_images):
            if c & mask == c:
                projected_interior |= image
        return projected_interior == self.interior(self.project(mask),
                                                   self.quotient_masks)


def _mask_members(mask):
    members = []
    x = 0
    while mask:
        if mask & 1:
            members.append(x)
        mask >>= 1
        x += 1
    return tuple(members)


def topology_report(space, booleanisation=None,
                    max_open_classes=DEFAULT_CAPS['max_open_classes'],
                    max_subset_bruteforce=DEFAULT_CAPS['max_subset_bruteforce'],
                    max_reg_table_atoms=DEFAULT_CAPS['max_reg_table_atoms']):
    """
    Quotient-topology checks for pi: B -> A_∞. Opens are saturated and pi
    is open and closed; interior preservation is decided by brute force
    over all subsets of B when |B| <= max_subset_bruteforce, else over the
    unions of classes plus every B minus one point; the verdict is compared
    with every Booleanisation class being a singleton; Reg(B) and Reg(A_∞)
    are compared through the map induced by pi.
    Without an injective system and a faithful state every verdict is
    informational; with them, a failed check raises.

    :param PseudometricSpace space: State pseudometric
    :param Booleanisation booleanisation: Optional precomputed quotient
    :param int max_open_classes: Enumerate all opens up to this many classes
    :param int max_subset_bruteforce: Brute-force interiors up to this |B|
    :param int max_reg_table_atoms: Full Reg operation tables up to this
        many classes
    :return TopologyReport report: Verdicts, witnesses, skipped checks
    """
    if booleanisation is None:
        booleanisation = booleanise(space.decomposition.system)
    hypotheses = _faithful_injective(space)
    topology = _PartitionTopology(space, booleanisation)
    nbr_classes = len(topology.class_masks)
    nbr_quotient_classes = len(topology.quotient_masks)
    full = (1 << space.size) - 1
    skipped = []

    if nbr_classes <= max_open_classes:
        opens = [topology.union_of_classes(s)
                 for s in range(1 << nbr_classes)]
        open_count = len(opens)
    else:
        opens = list(topology.class_masks)
        open_count = None
        skipped.append('open_enumeration')
        logger.info("%d classes exceed cap %d, checking basic opens only",
                    nbr_classes, max_open_classes)
    saturated = all(topology.preimage(topology.project(u)) == u for u in opens)
    pi_open = all(topology.is_open(topology.project(u),
                                   topology.quotient_masks) for u in opens)
    # in a partition topology the closed sets are the opens
    pi_closed = all(topology.is_open(topology.project(full ^ u),
                                     topology.quotient_masks) for u in opens)
    closed_interior = all(topology.interior_commutes(u) for u in opens)
    open_bijection = None
    if open_count is not None:
        images = {topology.project(u) for u in opens}
        open_bijection = len(images) == open_count == \
            1 << nbr_quotient_classes and \
            all(topology.is_open(v, topology.quotient_masks) for v in images)

    if space.size <= max_subset_bruteforce:
        interior_method = 'bruteforce'
        position = sweep_utils.first_failure(topology.interior_commutes,
                                             1 << space.size)
    else:
        interior_method = 'witness_family'
        family = opens + [full ^ (1 << x) for x in range(space.size)]
        position = next((u for u in family
                         if not topology.interior_commutes(u)), None)
    interior_preserving = position is None
    interior_witness = None if position is None else _mask_members(position)
    deletion_witnesses = tuple(
        x for x in range(space.size)
        if not topology.interior_commutes(full ^ (1 << x)))

    fibers = _fibers(space, booleanisation)
    fibers_singleton = all(len(members) == 1 for members in fibers)
    criterion = interior_preserving == fibers_singleton
    section = make_section(space, booleanisation)
    image = sum(1 << x for x in section.representatives)
    section_image_open = topology.is_open(image, topology.class_masks)

    reg_atoms = (nbr_classes, nbr_quotient_classes)
    reg_iso = None
    if nbr_classes <= max_reg_table_atoms:
        reg_iso = _reg_isomorphism(topology)
    else:
        skipped.append('reg_table')

    if hypotheses:
        failed = [name for name, holds in (
            ('saturation', saturated),
            ('open map', pi_open),
            ('closed map', pi_closed),
            ('closed interior', closed_interior),
            ('open bijection', open_bijection is not False),
            ('interior criterion', criterion),
            ('section image', section_image_open == fibers_singleton),
            ('regular opens', reg_iso is not False),
        ) if not holds]
        if failed:
            raise InternalInconsistency(
                "Topology checks failed: {}".format(", ".join(failed)),
            )
    return TopologyReport(hypotheses, nbr_classes, nbr_quotient_classes,
                          open_count, saturated, pi_open, pi_closed,
                          closed_interior, open_bijection, interior_method,
                          interior_preserving, interior_witness,
                          deletion_witnesses, fibers_singleton, criterion,
                          section_image_open, reg_atoms, reg_iso,
                          tuple(skipped))


def _reg_isomorphism(topology):
    """
    Reg(B) and Reg(A_∞) are powersets of classes. A class of B goes to the
    quotient classes meeting its projection; the induced map is checked
    against the full operation tables and for bijectivity.
    """
    reg_b = BooleanAlgebra(len(topology.class_masks))
    reg_q = BooleanAlgebra(len(topology.quotient_masks))
    atom_images = [sum(1 << q for q, qm in enumerate(topology.quotient_masks)
                       if qm & image)
                   for image in topology.class_images]
    element_map = np.zeros(reg_b.size, dtype=np.int64)
    for selection in reg_b.elements():
        for k, image in enumerate(atom_images):
            if (selection >> k) & 1:
                element_map[selection] |= image
    if element_map.max() > reg_q.top:
        return False
    preserves = \
        np.array_equal(element_map[reg_b.table('join')],
                       element_map[:, None] | element_map[None, :]) and \
        np.array_equal(element_map[reg_b.table('meet')],
                       element_map[:, None] & element_map[None, :]) and \
        np.array_equal(element_map[reg_b.table('complement')],
                       reg_q.top ^ element_map)
    if not preserves:
        return False
    try:
        hom = BooleanHom.from_element_map(reg_b, reg_q, element_map)
    except NotAHomomorphism:
        return False
    return reg_b.size == reg_q.size and hom.is_injective()


@dataclass(frozen=True)
class UniquenessCertificate:
    unique: bool
    equals_state: bool
    table: tuple


def is_continuous(space, table):
    """A table is continuous iff it is constant on every zero class"""
    return all(len({table[x] for x in members}) == 1
               for members in space.zero_classes)


def state_uniqueness_check(space, booleanisation=None, section=None):
    """
    Enumerate class-constant tables t with t ∘ sigma = phi(s): on each zero
    class, the values forced by the section representatives inside it.

    :param PseudometricSpace space: State pseudometric
    :param Booleanisation booleanisation: Optional precomputed quotient
    :param Section section: Defaults to the canonical section
    :return UniquenessCertificate certificate: Whether exactly one table
        exists, whether it is s, and the table
    :raise HypothesesUnmet: Unless the system is injective and s faithful
    """
    if not _faithful_injective(space):
        raise HypothesesUnmet(
            "Uniqueness needs an injective system and a faithful state",
        )
    if booleanisation is None:
        booleanisation = booleanise(space.decomposition.system)
    if section is None:
        section = make_section(space, booleanisation)
    mu = phi(space.state)
    table = [None] * space.size
    unique = True
    for members in space.zero_classes:
        forced = {mu.value(m) for m, x in enumerate(section.representatives)
                  if x in members}
        if len(forced) != 1:
            unique = False
            continue
        value = forced.pop()
        for x in members:
            table[x] = value
    equals_state = unique and all(Fraction(t) == v
                                  for t, v in zip(table, space.values))
    return UniquenessCertificate(unique, equals_state, tuple(table))


def extends_section_values(space, table, section, booleanisation=None):
    """
    Whether table is continuous and agrees with phi(s) along the section.
    """
    if booleanisation is None:
        booleanisation = booleanise(space.decomposition.system)
    mu = phi(space.state)
    return is_continuous(space, table) and all(
        table[x] == mu.value(m) for m, x in enumerate(section.representatives))
