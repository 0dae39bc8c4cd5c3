import unittest

import numpy as np
import pytest

import ibsl_states.algebra.booleanisation as booleanisation
from ibsl_states.algebra.finbool import hom_compose
import ibsl_states.algebra.generators as generators
from ibsl_states.algebra.plonka import (
    PlonkaElement,
    decompose,
    sum_decomposition,
)
from ibsl_states.errors import NotAHomomorphism
import tests.golden_systems as golden


class TestChainBooleanisation(unittest.TestCase):

    def setUp(self):
        self.decomposition = decompose(golden.chain_raw())
        self.booleanisation = booleanisation.booleanise(
            self.decomposition.system)

    def test_quotient(self):
        self.assertEqual(self.booleanisation.quotient.atom_count, 1)

    def test_classes(self):
        names = self.decomposition.raw.names
        back = self.decomposition.back
        classes = sorted(sorted(names[back[e]] for e in members)
                         for members in self.booleanisation.classes)
        self.assertEqual(classes, [['0', "a'", "b'"], ['1', 'a', 'b']])

    def test_projection_array(self):
        pi = self.booleanisation.projection_array(self.decomposition)
        np.testing.assert_array_equal(pi, [0, 1, 1, 0, 1, 0])

    def test_not_trivial(self):
        self.assertFalse(booleanisation.is_trivial_booleanisation(
            self.decomposition.system))


class TestDiamondBooleanisation(unittest.TestCase):

    def setUp(self):
        self.system = golden.diamond_system()
        self.booleanisation = booleanisation.booleanise(self.system)

    def test_classes(self):
        self.assertEqual(len(self.booleanisation.classes), 8)
        self.assertEqual(self.booleanisation.class_of(
            PlonkaElement(1, 1)), (PlonkaElement(1, 1), PlonkaElement(3, 1)))
        top_class = self.booleanisation.classes[7]
        self.assertEqual([e.index for e in top_class], [0, 1, 2, 3])

    def test_one_element_per_index(self):
        for members in self.booleanisation.classes:
            indices = [e.index for e in members]
            self.assertEqual(len(indices), len(set(indices)))

    def test_project(self):
        # a ∨ b lands on d'
        self.assertEqual(self.booleanisation.project(PlonkaElement(1, 1)) |
                         self.booleanisation.project(PlonkaElement(2, 1)), 5)


class TestInducedHom(unittest.TestCase):

    def setUp(self):
        self.chain = decompose(golden.chain_raw())
        self.two = sum_decomposition(golden.boolean_system(1))
        self.four = sum_decomposition(golden.boolean_system(2))
        self.collapse = [0, 1, 1, 0, 1, 0]
        self.inclusion = [0, 2, 3, 1]

    def test_induced(self):
        induced = booleanisation.induce_hom(self.chain, self.two,
                                            self.collapse)
        self.assertEqual(induced.hom.dual_map, (0,))
        self.assertTrue(induced.square_commutes)
        self.assertIsNone(induced.state_preserving)

    def test_measure_preserving(self):
        values = ([0, 1, 1, 0, 1, 0], [0, 1])
        induced = booleanisation.induce_hom(self.chain, self.two,
                                            self.collapse, state_pair=values)
        self.assertTrue(induced.state_preserving)
        self.assertTrue(induced.measure_preserving)

    def test_state_not_preserved(self):
        values = ([0, 1, 1, 0, 1, 0], [1, 0])
        induced = booleanisation.induce_hom(self.chain, self.two,
                                            self.collapse, state_pair=values)
        self.assertFalse(induced.state_preserving)
        self.assertIsNone(induced.measure_preserving)

    def test_not_a_hom(self):
        with self.assertRaises(NotAHomomorphism) as context:
            booleanisation.induce_hom(self.chain, self.two, [0] * 6)
        self.assertEqual(context.exception.witness[0], 'complement')

    def test_functorial(self):
        first = booleanisation.induce_hom(self.four, self.chain,
                                          self.inclusion)
        second = booleanisation.induce_hom(self.chain, self.two,
                                           self.collapse)
        composite_map = [self.collapse[x] for x in self.inclusion]
        composite = booleanisation.induce_hom(self.four, self.two,
                                              composite_map)
        self.assertEqual(composite.hom.dual_map,
                         hom_compose(second.hom, first.hom).dual_map)


@pytest.fixture(scope='module')
def generated_systems():
    return generators.system_family(seed=99, nbr_systems=200)


def test_generated_booleanisations(generated_systems):
    for system in generated_systems:
        quotient = booleanisation.booleanise(system)
        top = system.top_index
        assert len(quotient.classes) == system.components[top].size
        for m, members in enumerate(quotient.classes):
            assert PlonkaElement(top, m) in members
        trivial = any(c.is_trivial() for c in system.components)
        assert booleanisation.is_trivial_booleanisation(system) == trivial
