"""
States on involutive bisemilattices. A state is stored as its measure on
the top component; component measures and element values are derived.
Validation runs both from an element-value table and from component
weights, and the two routes must agree.
"""
from dataclasses import dataclass
from fractions import Fraction
import logging

import numpy as np

from ibsl_states.algebra.booleanisation import booleanise
from ibsl_states.algebra.finbool import Measure, atoms_of, measure_check
from ibsl_states.algebra.plonka import PlonkaElement, sum_decomposition
from ibsl_states.errors import (
    InternalInconsistency,
    InvalidState,
    TrivialComponent,
)
from ibsl_states.utils.config_utils import DEFAULT_CAPS

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = Fraction(37, 100)


@dataclass(frozen=True, eq=False)
class State:
    system: object
    top_measure: Measure

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self.system == other.system and \
            self.top_measure == other.top_measure

    __hash__ = object.__hash__

    def component_weights(self, i):
        """Weight of atom u of A_i: total top weight of atoms t with dual(t) = u"""
        top = self.system.top_index
        weights = [Fraction(0)] * self.system.components[i].atom_count
        for t, u in enumerate(self.system.hom(i, top).dual_map):
            weights[u] += self.top_measure.weights[t]
        return tuple(weights)

    def component_measure(self, i):
        return Measure(self.system.components[i], self.component_weights(i))

    def value(self, element):
        top = self.system.top_index
        image = self.system.hom(element.index, top).apply(element.inner)
        return self.top_measure.value(image)

    def value_table(self, decomposition):
        """
        :param Decomposition decomposition: Decomposition over self.system
        :return list values: s(x) for every raw id x
        """
        return [self.value(e) for e in decomposition.labeling]


@dataclass(frozen=True)
class StateReport:
    valid: bool
    faithful: bool
    violations: tuple = ()
    consequences: tuple = ()


def _as_fractions(table):
    return np.array([Fraction(v) for v in table], dtype=object)


def check_state_direct(decomposition, table):
    """
    Check s(1) = 1 and s(a ∨ b) = s(a) + s(b) for every pair whose meet is
    a local zero 0_i, over all pairs. For valid tables the consequences
    s(0) = 0, s(0_i) = 0, s(1_i) = 1 and s(a′) = 1 - s(a) are evaluated and
    recorded.

    :param Decomposition decomposition: Raw algebra with its decomposition
    :param sequence table: Rational value of every raw element
    :return StateReport report: Validity, faithfulness, first witness per
        violated condition
    """
    raw = decomposition.raw
    assert len(table) == raw.size,\
        "State table needs {} values, got {}".format(raw.size, len(table))
    values = _as_fractions(table)
    violations = []
    out_of_range = [x for x, v in enumerate(values) if not 0 <= v <= 1]
    if out_of_range:
        violations.append(('Range', (out_of_range[0],)))
    if values[raw.one] != 1:
        violations.append(('Unit', (raw.one,)))
    local_zeros = decomposition.local_zeros
    disjoint = np.isin(raw.meet, local_zeros)
    sums = values[:, None] + values[None, :]
    unequal = (values[raw.join] != sums).astype(bool)
    bad = np.argwhere(disjoint & unequal)
    if bad.size:
        violations.append(('Additivity', tuple(int(x) for x in bad[0])))
    valid = not violations
    consequences = ()
    if valid:
        consequences = (
            ('zero', values[raw.zero] == 0),
            ('local_zeros', all(values[z] == 0 for z in local_zeros)),
            ('local_ones', all(
                values[decomposition.back[PlonkaElement(i, c.top)]] == 1
                for i, c in enumerate(decomposition.system.components))),
            ('complement', all(values[raw.neg[x]] == 1 - values[x]
                               for x in range(raw.size))),
        )
        failed = [name for name, holds in consequences if not holds]
        if failed:
            raise InternalInconsistency(
                "Valid state breaks {}".format(", ".join(failed)),
            )
    zero_set = set(local_zeros)
    faithful = valid and all(values[x] > 0 for x in range(raw.size)
                             if x not in zero_set)
    return StateReport(valid, faithful, tuple(violations), consequences)


def check_state_componentwise(system, component_weights,
                              max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    Check each weight vector is a measure and m_j(p_ij(u)) = m_i(u) on the
    atoms u of A_i, which suffices by additivity. The induced element table
    is then run through check_state_direct and the verdicts must match.

    :param DirectSystem system: Valid direct system
    :param sequence component_weights: One weight vector per component
    :param int max_carrier: Cap on the Plonka sum
    :return StateReport report: Validity, faithfulness, violations
    :raise InternalInconsistency: If the two routes disagree
    """
    assert len(component_weights) == len(system.components),\
        "Expected {} weight vectors".format(len(system.components))
    weights = [tuple(Fraction(w) for w in ws) for ws in component_weights]
    violations = []
    valid_measures = []
    for i, component in enumerate(system.components):
        check = measure_check(component, weights[i])
        valid_measures.append(check.valid)
        if not check.valid:
            violations.append(('Measure', (i, check.reason)))

    def weight_of(i, element):
        return sum((weights[i][t] for t in atoms_of(element)), Fraction(0))

    for (i, j), h in sorted(system.homs.items()):
        if i == j or not (valid_measures[i] and valid_measures[j]):
            continue
        for u in range(system.components[i].atom_count):
            if weight_of(j, h.apply(1 << u)) != weights[i][u]:
                violations.append(('Preservation', (i, j, u)))
                break
    valid = not violations
    faithful = valid and all(w > 0 for ws in weights for w in ws)

    decomposition = sum_decomposition(system, max_carrier)
    table = [weight_of(e.index, e.inner) for e in decomposition.labeling]
    direct = check_state_direct(decomposition, table)
    if direct.valid != valid or direct.faithful != faithful:
        raise InternalInconsistency(
            "Componentwise check says valid={} faithful={}, direct check "
            "says valid={} faithful={}".format(valid, faithful, direct.valid,
                                               direct.faithful),
        )
    return StateReport(valid, faithful, tuple(violations),
                       direct.consequences)


def state_from_components(system, component_weights,
                          max_carrier=DEFAULT_CAPS['max_carrier']):
    """
    :return State state: The state with these component measures
    :raise InvalidState: If the weights don't define a state
    """
    report = check_state_componentwise(system, component_weights, max_carrier)
    if not report.valid:
        raise InvalidState("Weights don't define a state: {}".format(
            report.violations), report=report)
    top = system.top_index
    return State(system, Measure(system.components[top],
                                 component_weights[top]))


def state_from_table(decomposition, table):
    """
    :return State state: The state with these element values
    :raise InvalidState: If the table isn't a state
    """
    report = check_state_direct(decomposition, table)
    if not report.valid:
        raise InvalidState("Table is not a state: {}".format(
            report.violations), report=report)
    system = decomposition.system
    top = system.top_index
    weights = [Fraction(table[decomposition.back[PlonkaElement(top, atom)]])
               for atom in system.components[top].atoms()]
    state = State(system, Measure(system.components[top], weights))
    if any(state.value(e) != Fraction(table[x])
           for x, e in enumerate(decomposition.labeling)):
        raise InternalInconsistency(
            "State isn't determined by its values on the top component",
        )
    return state


def phi(state):
    """
    Measure on the Booleanisation, realized on the top component:
    phi(s)([b]) = s(b).
    """
    return state.top_measure


def phi_inverse(system, measure):
    """
    Pull a measure on the Booleanisation back to a state:
    s(a) = m(p_i⊤(a)).

    :param DirectSystem system: Valid direct system
    :param Measure measure: Measure on the top component
    :return State state: The state
    :raise TrivialComponent: If some component is trivial
    """
    trivial = [i for i, c in enumerate(system.components) if c.is_trivial()]
    if trivial:
        raise TrivialComponent(
            "Component {} is trivial, no state exists".format(trivial[0]),
        )
    assert measure.algebra == system.components[system.top_index],\
        "Measure must live on the top component"
    return State(system, measure)


def is_state_preserving(decomposition, table, measure, booleanisation):
    """s(b) = m(pi(b)) for every raw element b"""
    pi = booleanisation.projection_array(decomposition)
    return all(Fraction(table[x]) == measure.value(int(pi[x]))
               for x in range(decomposition.raw.size))


def carries_state(system):
    """
    :param DirectSystem system: Valid direct system
    :return bool carries: True iff no component is trivial
    :return State/None witness: The uniform state when carries is True
    """
    if any(c.is_trivial() for c in system.components):
        return False, None
    top = system.components[system.top_index]
    witness = phi_inverse(system, Measure.uniform(top))
    weights = [witness.component_weights(i)
               for i in system.index.indices()]
    if not check_state_componentwise(system, weights).valid:
        raise InternalInconsistency("Uniform witness is not a state")
    return True, witness


def is_faithful(state):
    """s(a) > 0 for every a that is not a local zero"""
    return all(state.value(e) > 0 for e in state.system.elements()
               if e.inner != 0)


@dataclass(frozen=True)
class FaithfulDiagnosis:
    faithful: bool
    regular_restrictions: bool
    injective_homs: bool
    witness: object = None


def faithful_diagnosis(state):
    """
    Faithfulness against its two ingredients: every component measure
    regular and every transition map injective.

    :param State state: Valid state
    :return FaithfulDiagnosis diagnosis: The three verdicts, and the first
        element of positive rank with value 0 if not faithful
    :raise InternalInconsistency: If faithful differs from the conjunction
    """
    system = state.system
    faithful = is_faithful(state)
    regular = all(state.component_measure(i).is_regular()
                  for i in system.index.indices())
    injective = all(h.is_injective() for h in system.homs.values())
    if faithful != (regular and injective):
        raise InternalInconsistency(
            "faithful={} but regular={} injective={}".format(
                faithful, regular, injective),
        )
    witness = None
    if not faithful:
        witness = next(e for e in system.elements()
                       if e.inner != 0 and state.value(e) == 0)
    return FaithfulDiagnosis(faithful, regular, injective, witness)


@dataclass(frozen=True)
class IntegralCheck:
    holds: bool
    witness: object = None


def integral_representation_check(state, component_weights=None,
                                  booleanisation=None):
    """
    s(b) as the sum of phi(s) over the atoms of the Booleanisation below
    pi(b), for every element b. The left side is summed from per-component
    weight vectors, the right side from the top measure through the
    union-find projection.

    :param State state: Valid state
    :param sequence component_weights: Weight vector per index, e.g. as read
        from a state document. Defaults to the state's own restrictions.
    :param Booleanisation booleanisation: Optional precomputed quotient
    :return IntegralCheck check: holds, or the first failing element
    """
    system = state.system
    if booleanisation is None:
        booleanisation = booleanise(system)
    if component_weights is None:
        component_weights = [state.component_weights(i)
                             for i in system.index.indices()]
    assert len(component_weights) == len(system.components),\
        "Expected {} weight vectors".format(len(system.components))
    mu = phi(state)
    for element in system.elements():
        value = sum((Fraction(component_weights[element.index][u])
                     for u in atoms_of(element.inner)), Fraction(0))
        integral = sum((mu.weights[t]
                        for t in atoms_of(booleanisation.project(element))),
                       Fraction(0))
        if value != integral:
            return IntegralCheck(False, element)
    return IntegralCheck(True)


@dataclass(frozen=True)
class AltCheck:
    satisfied: bool
    violation: str = None
    witness: tuple = None


def check_alt_state(decomposition, table):
    """
    Weaker state notion: t(1) = 1 and t(a ∨ b) = t(a) + t(b) only when
    a ∧ b is the constant 0.

    :param Decomposition decomposition: Raw algebra with its decomposition
    :param sequence table: Rational value of every raw element
    :return AltCheck check: Satisfied, or the failing condition and pair
    """
    raw = decomposition.raw
    assert len(table) == raw.size,\
        "Table needs {} values, got {}".format(raw.size, len(table))
    values = _as_fractions(table)
    if values[raw.one] != 1:
        return AltCheck(False, 'Unit', (raw.one,))
    sums = values[:, None] + values[None, :]
    unequal = (values[raw.join] != sums).astype(bool)
    bad = np.argwhere((raw.meet == raw.zero) & unequal)
    if bad.size:
        return AltCheck(False, 'Additivity', tuple(int(x) for x in bad[0]))
    return AltCheck(True)


@dataclass(frozen=True)
class AltCertificate:
    alpha: Fraction
    extension_family_size: int
    extension_holds: bool
    candidate_family_size: int
    candidates_satisfying: int
    restriction_holds: bool
    limitation: str = ("Tables satisfying the weaker condition were drawn "
                       "from a finite candidate family, not all maps")

    @property
    def holds(self):
        return self.extension_holds and self.restriction_holds


def _random_weights(rng, atom_count, max_numerator=9):
    numerators = rng.integers(0, max_numerator + 1, size=atom_count).tolist()
    total = sum(numerators)
    if total == 0:
        return tuple(Fraction(1, atom_count) for _ in range(atom_count))
    return tuple(Fraction(n, total) for n in numerators)


def alt_state_equivalence(decomposition, alpha=DEFAULT_ALPHA, seed=0,
                          nbr_random=8):
    """
    Compare the weaker state notion with measures on the least component.
    Extension direction: every measure in a family on A_i0 (Dirac, uniform,
    random), extended by the constant alpha outside A_i0, satisfies the
    weaker condition. Restriction direction: every candidate table
    satisfying it restricts to a measure on A_i0. Candidates are all vertex
    states, random convex combinations, random measures on A_i0 with a
    random constant elsewhere, and random tables.

    :param Decomposition decomposition: Raw algebra with its decomposition
    :param Fraction alpha: Constant in (0, 1) used off A_i0
    :param int seed: Seed for the random family members
    :param int nbr_random: Random members per family
    :return AltCertificate certificate: Family sizes and verdicts
    """
    assert 0 < alpha < 1, "alpha should be in (0, 1), not {}".format(alpha)
    rng = np.random.default_rng(seed)
    system = decomposition.system
    least = system.least
    base = system.components[least]
    base_ids = {decomposition.back[PlonkaElement(least, m)]: m
                for m in base.elements()}
    size = decomposition.raw.size

    def extension(weights, constant):
        measure = Measure(base, weights)
        return [measure.value(base_ids[x]) if x in base_ids else constant
                for x in range(size)]

    base_measures = []
    if not base.is_trivial():
        base_measures = [Measure.dirac(base, t).weights
                         for t in range(base.atom_count)]
        base_measures.append(Measure.uniform(base).weights)
        base_measures += [_random_weights(rng, base.atom_count)
                          for _ in range(nbr_random)]
    extension_holds = all(
        check_alt_state(decomposition, extension(w, Fraction(alpha))).satisfied
        for w in base_measures)

    candidates = []
    carries, _ = carries_state(system)
    if carries:
        vertices = state_space_vertices(system)
        candidates += [v.value_table(decomposition) for v in vertices]
        top = system.components[system.top_index]
        for _ in range(nbr_random):
            coefficients = _random_weights(rng, top.atom_count)
            state = convex_state(system, vertices, coefficients)
            candidates.append(state.value_table(decomposition))
    for weights in base_measures:
        constant = Fraction(int(rng.integers(1, 100)), 100)
        candidates.append(extension(weights, constant))
    for _ in range(nbr_random):
        candidates.append([Fraction(int(v), 10)
                           for v in rng.integers(0, 11, size=size)])

    satisfying = 0
    restriction_holds = True
    for table in candidates:
        if not check_alt_state(decomposition, table).satisfied:
            continue
        satisfying += 1
        weights = [table[decomposition.back[PlonkaElement(least, atom)]]
                   for atom in base.atoms()]
        if not measure_check(base, weights).valid:
            restriction_holds = False
            continue
        measure = Measure(base, weights)
        if any(Fraction(table[x]) != measure.value(m)
               for x, m in base_ids.items()):
            restriction_holds = False
    logger.info("Weaker state notion: %d of %d candidates satisfy it",
                satisfying, len(candidates))
    return AltCertificate(Fraction(alpha), len(base_measures),
                          extension_holds, len(candidates), satisfying,
                          restriction_holds)


def state_space_vertices(system):
    """
    Vertex states: Dirac measures on the atoms of the top component,
    pulled back.

    :param DirectSystem system: Valid direct system
    :return list vertices: One state per top atom
    :raise TrivialComponent: If the system carries no state
    """
    top = system.components[system.top_index]
    return [phi_inverse(system, Measure.dirac(top, t))
            for t in range(top.atom_count)]


def convex_state(system, vertices, coefficients):
    """
    :param DirectSystem system: Valid direct system
    :param list vertices: States on system
    :param sequence coefficients: Nonnegative rationals summing to 1
    :return State state: The convex combination
    """
    assert len(vertices) == len(coefficients),\
        "Need one coefficient per vertex"
    top = system.components[system.top_index]
    weights = [sum((Fraction(c) * v.top_measure.weights[t]
                    for v, c in zip(vertices, coefficients)), Fraction(0))
               for t in range(top.atom_count)]
    return phi_inverse(system, Measure(top, weights))


def faithful_state_exists(system):
    """
    A faithful state exists iff every transition map is injective and no
    component is trivial. The uniform state is the witness; without
    injectivity every vertex state is checked to be unfaithful.

    :param DirectSystem system: Valid direct system
    :return bool exists: Whether a faithful state exists
    :return State/None witness: A faithful state if one exists
    """
    carries, uniform = carries_state(system)
    if not carries:
        return False, None
    injective = all(h.is_injective() for h in system.homs.values())
    if injective:
        if not is_faithful(uniform):
            raise InternalInconsistency("Uniform state is not faithful")
        return True, uniform
    if any(is_faithful(v) for v in state_space_vertices(system)):
        raise InternalInconsistency(
            "Faithful vertex state on a non-injective system",
        )
    return False, None
