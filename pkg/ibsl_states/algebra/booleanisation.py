"""
Booleanisation of a finite direct system: the direct limit realized as the
top component, with the projection pi(a) = p_i⊤(a) cross-checked against a
union-find quotient of the disjoint union.
"""
from dataclasses import dataclass
import logging

import numpy as np

from ibsl_states.algebra.finbool import BooleanHom
from ibsl_states.algebra.plonka import PlonkaElement, plonka_sum
from ibsl_states.errors import InternalInconsistency, NotAHomomorphism
from ibsl_states.utils.config_utils import DEFAULT_CAPS
from ibsl_states.utils.union_find import UnionFind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Booleanisation:
    """
    quotient is the top component; classes[m] lists the elements a with
    pi(a) = m, so every class is named by its representative in A_⊤.
    """
    system: object
    quotient: object
    pi: dict
    classes: tuple

    def project(self, element):
        return self.pi[element]

    def class_of(self, element):
        return self.classes[self.pi[element]]

    def projection_array(self, decomposition):
        """
        :param Decomposition decomposition: Decomposition over this system
        :return np.array pi: Projection of every raw element
        """
        return np.array([self.pi[e] for e in decomposition.labeling],
                        dtype=np.int64)


def booleanise(system, max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Compute the Booleanisation twice: union-find over all pairs
    (a, p_ij(a)) and the shortcut pi(a) = p_i⊤(a). The two partitions must
    coincide, and pi must be a surjective homomorphism of the Plonka sum.

    :param DirectSystem system: Valid direct system
    :param int max_carrier: Cap on the Plonka sum used for the
        homomorphism check
    :return Booleanisation booleanisation: Quotient, projection, classes
    :raise InternalInconsistency: If the two routes disagree
    """
    top = system.top_index
    quotient = system.components[top]
    elements = system.elements()
    union_find = UnionFind(elements)
    for (i, j), h in system.homs.items():
        if i == j:
            continue
        for a, image in enumerate(h.apply_table()):
            union_find.union(PlonkaElement(i, a), PlonkaElement(j, int(image)))
    pi = {e: system.hom(e.index, top).apply(e.inner) for e in elements}

    classes = [[] for _ in quotient.elements()]
    for e in elements:
        classes[pi[e]].append(e)
    uf_classes = sorted(union_find.classes())
    shortcut_classes = sorted(tuple(members) for members in classes)
    if uf_classes != shortcut_classes:
        raise InternalInconsistency(
            "Union-find quotient and top-component projection disagree",
        )
    leq = system.index.leq_matrix()
    injective = all(h.is_injective() for h in system.homs.values())
    for members in classes:
        indices = [e.index for e in members]
        present = set(indices)
        for i in present:
            if not present.issuperset(np.flatnonzero(leq[i]).tolist()):
                raise InternalInconsistency(
                    "Class of {} doesn't meet an up-set".format(members[0]),
                )
        if injective and len(present) != len(indices):
            raise InternalInconsistency(
                "Class of {} meets an index twice".format(members[0]),
            )
    booleanisation = Booleanisation(system, quotient, pi,
                                    tuple(tuple(c) for c in classes))
    _check_projection(booleanisation, max_carrier)
    logger.debug("Booleanisation has %d classes", len(classes))
    return booleanisation


def _check_projection(booleanisation, max_carrier):
    """pi commutes with ∨, ∧, ′ and the constants, over the whole sum"""
    system = booleanisation.system
    raw, labeling = plonka_sum(system, max_carrier)
    pi = np.array([booleanisation.pi[e] for e in labeling], dtype=np.int64)
    top = booleanisation.quotient.top
    if not np.array_equal(pi[raw.join], pi[:, None] | pi[None, :]) or \
            not np.array_equal(pi[raw.meet], pi[:, None] & pi[None, :]) or \
            not np.array_equal(pi[raw.neg], top ^ pi) or \
            pi[raw.zero] != 0 or pi[raw.one] != top:
        raise InternalInconsistency("Projection is not a homomorphism")
    if set(pi.tolist()) != set(booleanisation.quotient.elements()):
        raise InternalInconsistency("Projection is not surjective")


def is_trivial_booleanisation(system):
    """
    [0] = [1] in the Booleanisation, cross-checked against the existence
    of a trivial component.

    :param DirectSystem system: Valid direct system
    :return bool trivial: True if the Booleanisation has one element
    """
    least = system.least
    top = system.top_index
    p = system.hom(least, top)
    trivial = p.apply(0) == p.apply(system.components[least].top)
    has_trivial_component = any(c.is_trivial() for c in system.components)
    if trivial != has_trivial_component:
        raise InternalInconsistency(
            "Trivial quotient={} but trivial component={}".format(
                trivial, has_trivial_component),
        )
    return trivial


@dataclass(frozen=True)
class InducedHom:
    hom: BooleanHom
    square_commutes: bool
    state_preserving: bool = None
    measure_preserving: bool = None


def check_raw_hom(source, target, element_map):
    """
    Check that an element-level map between raw algebras preserves
    ∨, ∧, ′, 0 and 1.

    :param RawAlgebra source: Source tables
    :param RawAlgebra target: Target tables
    :param sequence element_map: Image of every source element
    :return np.array h: element_map as an array
    :raise NotAHomomorphism: With the first failing operation and binding
    """
    h = np.asarray(element_map, dtype=np.int64)
    assert h.shape == (source.size,),\
        "Map needs {} images, got {}".format(source.size, h.shape[0])
    if h.min() < 0 or h.max() >= target.size:
        raise NotAHomomorphism("Image outside the target carrier")
    for op, table_s, table_t in (('join', source.join, target.join),
                                 ('meet', source.meet, target.meet)):
        bad = np.argwhere(h[table_s] != table_t[h[:, None], h[None, :]])
        if bad.size:
            witness = (op,) + tuple(int(x) for x in bad[0])
            raise NotAHomomorphism(
                "Map doesn't preserve {} at {}".format(op, witness[1:]),
                witness=witness,
            )
    bad = np.flatnonzero(h[source.neg] != target.neg[h])
    if bad.size:
        raise NotAHomomorphism(
            "Map doesn't preserve complement at {}".format(int(bad[0])),
            witness=('complement', int(bad[0])),
        )
    if h[source.zero] != target.zero or h[source.one] != target.one:
        raise NotAHomomorphism("Map doesn't preserve the constants",
                               witness=('constants',))
    return h


def induce_hom(first, second, element_map, state_pair=None,
               max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Boolean homomorphism [a] -> [h(a)] between Booleanisations, with the
    square pi_2 ∘ h = h̄ ∘ pi_1 verified on every element.

    :param Decomposition first: Source algebra with its decomposition
    :param Decomposition second: Target algebra with its decomposition
    :param sequence element_map: h as the image raw id of every source id
    :param tuple state_pair: Optional (s_1, s_2) value tables by raw id;
        when h preserves them, h̄ is checked to preserve the induced
        measures on the Booleanisations
    :param int max_carrier: Cap on carriers
    :return InducedHom induced: h̄ with its certificate
    :raise NotAHomomorphism: If h isn't a homomorphism
    """
    h = check_raw_hom(first.raw, second.raw, element_map)
    booleanisation_1 = booleanise(first.system, max_carrier)
    booleanisation_2 = booleanise(second.system, max_carrier)
    pi_1 = booleanisation_1.projection_array(first)
    pi_2 = booleanisation_2.projection_array(second)
    class_map = {}
    for x in range(first.raw.size):
        image = int(pi_2[h[x]])
        if class_map.setdefault(int(pi_1[x]), image) != image:
            raise InternalInconsistency(
                "Induced map is not well defined on the class of {}".format(x),
            )
    try:
        hom = BooleanHom.from_element_map(booleanisation_1.quotient,
                                          booleanisation_2.quotient,
                                          class_map)
    except NotAHomomorphism as e:
        raise InternalInconsistency("Induced map: {}".format(e))
    square = np.array_equal(pi_2[h], hom.apply_table()[pi_1])
    if not square:
        raise InternalInconsistency("Projection square doesn't commute")
    state_preserving = None
    measure_preserving = None
    if state_pair is not None:
        values_1, values_2 = state_pair
        state_preserving = all(values_1[x] == values_2[h[x]]
                               for x in range(first.raw.size))
        if state_preserving:
            phi_1 = _class_values(values_1, pi_1)
            phi_2 = _class_values(values_2, pi_2)
            image_table = hom.apply_table()
            measure_preserving = all(
                phi_1[m] == phi_2[int(image_table[m])] for m in phi_1)
    return InducedHom(hom, square, state_preserving, measure_preserving)


def _class_values(values, pi):
    """Value of every class, read off any of its members"""
    class_values = {}
    for x, m in enumerate(pi.tolist()):
        class_values.setdefault(m, values[x])
    return class_values
