from fractions import Fraction
import unittest

import numpy as np
import pytest

from ibsl_states.algebra.booleanisation import booleanise
from ibsl_states.algebra.finbool import BooleanAlgebra, BooleanHom, Measure
import ibsl_states.algebra.generators as generators
from ibsl_states.algebra.plonka import (
    PlonkaElement,
    decompose,
    sum_decomposition,
    validate_system,
)
from ibsl_states.algebra.semilattice import validate_semilattice
from ibsl_states.errors import InvalidState, TrivialComponent
import ibsl_states.probability.states as states
import tests.golden_systems as golden


class TestDiamondState(unittest.TestCase):

    def setUp(self):
        self.system = golden.diamond_system()
        self.decomposition = sum_decomposition(self.system)
        self.state = states.state_from_components(self.system,
                                                  golden.DIAMOND_WEIGHTS)
        self.table = self.state.value_table(self.decomposition)

    def test_values(self):
        self.assertEqual(self.table[golden.D_PRIME], Fraction(5, 6))
        self.assertEqual(self.table[golden.A], Fraction(1, 2))
        self.assertEqual(self.table[golden.B], Fraction(1, 3))
        self.assertEqual(self.table[golden.B_PRIME], Fraction(2, 3))
        self.assertEqual(self.table[golden.E], Fraction(1, 3))
        self.assertEqual(self.table[golden.ZERO_I], 0)
        self.assertEqual(self.table[golden.ONE_J], 1)

    def test_both_routes_agree(self):
        componentwise = states.check_state_componentwise(
            self.system, golden.DIAMOND_WEIGHTS)
        direct = states.check_state_direct(self.decomposition, self.table)
        self.assertTrue(componentwise.valid and componentwise.faithful)
        self.assertTrue(direct.valid and direct.faithful)
        self.assertEqual(dict(direct.consequences),
                         {'zero': True, 'local_zeros': True,
                          'local_ones': True, 'complement': True})

    def test_phi(self):
        self.assertEqual(states.phi(self.state).weights,
                         (Fraction(1, 2), Fraction(1, 6), Fraction(1, 3)))

    def test_phi_round_trip(self):
        self.assertEqual(
            states.phi_inverse(self.system, states.phi(self.state)),
            self.state)

    def test_state_from_table(self):
        self.assertEqual(
            states.state_from_table(self.decomposition, self.table),
            self.state)

    def test_component_weights(self):
        for i, weights in enumerate(golden.DIAMOND_WEIGHTS):
            self.assertEqual(self.state.component_weights(i), weights)

    def test_integral_representation(self):
        self.assertTrue(
            states.integral_representation_check(self.state).holds)
        self.assertTrue(states.integral_representation_check(
            self.state, golden.DIAMOND_WEIGHTS).holds)

    def test_integral_representation_mismatch(self):
        weights = list(golden.DIAMOND_WEIGHTS)
        weights[1] = (Fraction(2, 3), Fraction(1, 3))
        check = states.integral_representation_check(self.state, weights)
        self.assertFalse(check.holds)
        self.assertEqual(check.witness, PlonkaElement(1, 1))

    def test_faithful(self):
        self.assertTrue(states.is_faithful(self.state))
        diagnosis = states.faithful_diagnosis(self.state)
        self.assertTrue(diagnosis.regular_restrictions)
        self.assertTrue(diagnosis.injective_homs)

    def test_dirac_not_faithful(self):
        top = self.system.components[self.system.top_index]
        state = states.phi_inverse(self.system, Measure.dirac(top, 0))
        diagnosis = states.faithful_diagnosis(state)
        self.assertFalse(diagnosis.faithful)
        self.assertFalse(diagnosis.regular_restrictions)
        self.assertTrue(diagnosis.injective_homs)
        self.assertEqual(state.value(diagnosis.witness), 0)

    def test_preservation_violation(self):
        weights = list(golden.DIAMOND_WEIGHTS)
        weights[1] = (Fraction(1, 3), Fraction(2, 3))
        report = states.check_state_componentwise(self.system, weights)
        self.assertFalse(report.valid)
        self.assertEqual(report.violations[0][0], 'Preservation')
        with self.assertRaises(InvalidState):
            states.state_from_components(self.system, weights)

    def test_measure_violation(self):
        weights = list(golden.DIAMOND_WEIGHTS)
        weights[0] = (Fraction(1, 2),)
        report = states.check_state_componentwise(self.system, weights)
        self.assertFalse(report.valid)
        self.assertEqual(report.violations[0], ('Measure', (0, 'BadTotal')))

    def test_direct_violations(self):
        table = list(self.table)
        table[golden.ONE_I] = Fraction(1, 2)
        report = states.check_state_direct(self.decomposition, table)
        self.assertFalse(report.valid)
        self.assertIn('Additivity', [name for name, _ in report.violations])
        report = states.check_state_direct(self.decomposition,
                                           [0] * len(table))
        self.assertEqual(report.violations[0], ('Unit', (golden.I0_ONE,)))

    def test_vertices(self):
        vertices = states.state_space_vertices(self.system)
        self.assertEqual(len(vertices), 3)
        combination = states.convex_state(
            self.system, vertices,
            (Fraction(1, 2), Fraction(1, 6), Fraction(1, 3)))
        self.assertEqual(combination, self.state)

    def test_faithful_state_exists(self):
        exists, witness = states.faithful_state_exists(self.system)
        self.assertTrue(exists)
        self.assertTrue(states.is_faithful(witness))

    def test_weaker_state_notion(self):
        self.assertTrue(states.check_alt_state(self.decomposition,
                                               self.table).satisfied)
        certificate = states.alt_state_equivalence(self.decomposition)
        self.assertTrue(certificate.holds)
        self.assertGreater(certificate.candidates_satisfying, 0)

    def test_weaker_state_notion_unit(self):
        table = [Fraction(1, 2)] * len(self.table)
        check = states.check_alt_state(self.decomposition, table)
        self.assertFalse(check.satisfied)
        self.assertEqual(check.violation, 'Unit')

    def test_state_preserving(self):
        booleanisation = booleanise(self.system)
        self.assertTrue(states.is_state_preserving(
            self.decomposition, self.table, states.phi(self.state),
            booleanisation))


class TestChainState(unittest.TestCase):

    def setUp(self):
        self.decomposition = decompose(golden.chain_raw())
        self.system = self.decomposition.system

    def test_unique_state(self):
        carries, state = states.carries_state(self.system)
        self.assertTrue(carries)
        table = state.value_table(self.decomposition)
        self.assertEqual(table, [0, 1, 1, 0, 1, 0])

    def test_not_faithful(self):
        _, state = states.carries_state(self.system)
        diagnosis = states.faithful_diagnosis(state)
        self.assertFalse(diagnosis.faithful)
        self.assertFalse(diagnosis.injective_homs)
        self.assertEqual(self.decomposition.raw.names[
            self.decomposition.back[diagnosis.witness]], "a'")

    def test_no_faithful_state(self):
        self.assertEqual(states.faithful_state_exists(self.system),
                         (False, None))

    def test_weaker_state_notion(self):
        certificate = states.alt_state_equivalence(self.decomposition,
                                                   seed=4)
        self.assertTrue(certificate.holds)


def trivial_top_system():
    index = validate_semilattice([[0, 1], [1, 1]]).semilattice
    components = [BooleanAlgebra(1), BooleanAlgebra(0)]
    homs = {(0, 1): BooleanHom(components[0], components[1], ())}
    return validate_system(index, components, homs).system


def test_trivial_component_has_no_state():
    system = trivial_top_system()
    assert states.carries_state(system) == (False, None)
    with pytest.raises(TrivialComponent):
        states.phi_inverse(system, None)
    report = states.check_state_componentwise(system, [(1,), ()])
    assert not report.valid


@pytest.fixture(scope='module')
def generated_systems():
    return generators.system_family(seed=314, nbr_systems=200)


def test_generated_state_existence(generated_systems):
    for system in generated_systems:
        carries, witness = states.carries_state(system)
        assert carries == (not any(c.is_trivial()
                                   for c in system.components))
        if carries:
            weights = [witness.component_weights(i)
                       for i in system.index.indices()]
            assert states.check_state_componentwise(system, weights).valid


def test_generated_phi_round_trip(generated_systems):
    rng = np.random.default_rng(8)
    for system in generated_systems:
        if not states.carries_state(system)[0]:
            continue
        top = system.components[system.top_index]
        numerators = rng.integers(0, 5, size=top.atom_count).tolist()
        if sum(numerators) == 0:
            numerators[0] = 1
        measure = Measure(top, [Fraction(n, sum(numerators))
                                for n in numerators])
        state = states.phi_inverse(system, measure)
        assert states.phi(state) == measure
        decomposition = sum_decomposition(system)
        table = state.value_table(decomposition)
        assert states.state_from_table(decomposition, table) == state
        assert states.integral_representation_check(state).holds
        faithful = states.is_faithful(state)
        injective = all(h.is_injective() for h in system.homs.values())
        assert faithful == (injective and measure.is_regular())
