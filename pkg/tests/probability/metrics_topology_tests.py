from fractions import Fraction
import unittest

import numpy as np
import pytest

from ibsl_states.algebra.booleanisation import booleanise
import ibsl_states.algebra.generators as generators
from ibsl_states.algebra.plonka import decompose, sum_decomposition
from ibsl_states.errors import BadChooser, HypothesesUnmet
import ibsl_states.probability.metrics_topology as metrics
import ibsl_states.probability.states as states
import tests.golden_systems as golden


class TestDiamondPseudometric(unittest.TestCase):

    def setUp(self):
        system = golden.diamond_system()
        self.decomposition = sum_decomposition(system)
        self.booleanisation = booleanise(system)
        state = states.state_from_components(system, golden.DIAMOND_WEIGHTS)
        self.space = metrics.pseudometric(self.decomposition, state)

    def test_axioms(self):
        self.assertTrue(all(holds for _, holds in self.space.axioms))
        self.assertEqual([name for name, _ in self.space.axioms],
                         ['nonnegative', 'zero_diagonal', 'symmetric',
                          'triangle'])

    def test_distance_to_zero(self):
        zero = self.decomposition.raw.zero
        for x in range(self.space.size):
            self.assertEqual(self.space.distance(x, zero),
                             self.space.values[x])

    def test_distances(self):
        self.assertEqual(self.space.distance(golden.A, golden.B),
                         Fraction(5, 6))
        self.assertEqual(self.space.distance(golden.A, golden.C), 0)
        self.assertEqual(self.space.distance(golden.D, golden.D_PRIME), 1)

    def test_component_identities(self):
        self.assertTrue(metrics.component_distance_identities(
            self.space).holds)

    def test_not_metric(self):
        self.assertFalse(metrics.is_metric(self.space, self.booleanisation))
        self.assertEqual(len(self.space.zero_classes), 8)

    def test_kolmogorov_quotient(self):
        certificate = metrics.kolmogorov_quotient(self.space,
                                                  self.booleanisation)
        self.assertTrue(certificate.hypotheses_met)
        self.assertTrue(certificate.classes_match)
        self.assertTrue(certificate.distances_transported)
        self.assertTrue(certificate.quotient_is_metric)
        self.assertEqual(certificate.quotient_distances.shape, (8, 8))

    def test_sections(self):
        self.assertEqual(
            metrics.count_sections(self.space, self.booleanisation), 256)
        section = metrics.make_section(self.space, self.booleanisation)
        self.assertEqual(len(section.representatives), 8)
        certificate = metrics.verify_section(self.space, section,
                                             self.booleanisation)
        self.assertTrue(certificate.passed)

    def test_bad_chooser(self):
        with self.assertRaises(BadChooser):
            metrics.make_section(self.space, self.booleanisation,
                                 chooser=lambda m, members: -1)
        with self.assertRaises(BadChooser):
            metrics.make_section(self.space, self.booleanisation,
                                 chooser=lambda m, members: None)

    def test_last_member_section(self):
        section = metrics.make_section(self.space, self.booleanisation,
                                       chooser=lambda m, members: members[-1])
        self.assertTrue(metrics.verify_section(
            self.space, section, self.booleanisation).passed)

    def test_topology_report(self):
        report = metrics.topology_report(self.space, self.booleanisation,
                                         max_subset_bruteforce=12)
        self.assertTrue(report.hypotheses_met)
        self.assertEqual(report.interior_method, 'witness_family')
        self.assertEqual(report.open_count, 256)
        self.assertTrue(report.saturated)
        self.assertTrue(report.pi_open)
        self.assertTrue(report.pi_closed)
        self.assertTrue(report.closed_interior)
        self.assertTrue(report.open_bijection)
        self.assertFalse(report.interior_preserving)
        self.assertEqual(len(report.interior_witness), 17)
        self.assertFalse(report.fibers_singleton)
        self.assertTrue(report.interior_criterion_holds)
        self.assertFalse(report.section_image_open)
        self.assertTrue(report.reg_iso)
        self.assertEqual(report.reg_atoms, (8, 8))
        self.assertNotIn(golden.D, report.deletion_witnesses)
        self.assertNotIn(golden.D_PRIME, report.deletion_witnesses)
        self.assertIn(golden.A, report.deletion_witnesses)
        self.assertEqual(len(report.deletion_witnesses), 16)

    def test_topology_report_skips(self):
        report = metrics.topology_report(self.space, self.booleanisation,
                                         max_open_classes=4,
                                         max_subset_bruteforce=12,
                                         max_reg_table_atoms=4)
        self.assertIsNone(report.open_count)
        self.assertIsNone(report.reg_iso)
        self.assertEqual(report.skipped, ('open_enumeration', 'reg_table'))

    def test_state_uniqueness(self):
        certificate = metrics.state_uniqueness_check(self.space,
                                                     self.booleanisation)
        self.assertTrue(certificate.unique)
        self.assertTrue(certificate.equals_state)
        section = metrics.make_section(self.space, self.booleanisation)
        self.assertTrue(metrics.extends_section_values(
            self.space, certificate.table, section, self.booleanisation))

    def test_discontinuous_table(self):
        table = list(self.space.values)
        table[golden.A] = Fraction(1, 4)
        self.assertFalse(metrics.is_continuous(self.space, table))


class TestChainPseudometric(unittest.TestCase):

    def setUp(self):
        self.decomposition = decompose(golden.chain_raw())
        _, state = states.carries_state(self.decomposition.system)
        self.space = metrics.pseudometric(self.decomposition, state)

    def test_zero_classes(self):
        names = self.decomposition.raw.names
        classes = sorted(sorted(names[x] for x in members)
                         for members in self.space.zero_classes)
        self.assertEqual(classes, [['0', "a'", "b'"], ['1', 'a', 'b']])

    def test_kolmogorov_informational(self):
        certificate = metrics.kolmogorov_quotient(self.space)
        self.assertFalse(certificate.hypotheses_met)
        self.assertTrue(certificate.classes_match)
        self.assertTrue(certificate.distances_transported)

    def test_topology_informational(self):
        report = metrics.topology_report(self.space)
        self.assertFalse(report.hypotheses_met)
        self.assertEqual(report.interior_method, 'bruteforce')
        self.assertFalse(report.interior_preserving)
        self.assertTrue(report.interior_criterion_holds)
        self.assertIn(self.decomposition.raw.names.index('b'),
                      report.deletion_witnesses)

    def test_uniqueness_needs_hypotheses(self):
        with self.assertRaises(HypothesesUnmet):
            metrics.state_uniqueness_check(self.space)


def test_singleton_classes_are_metric():
    system = golden.boolean_system(2)
    decomposition = sum_decomposition(system)
    _, state = states.carries_state(system)
    space = metrics.pseudometric(decomposition, state)
    assert metrics.is_metric(space)
    report = metrics.topology_report(space)
    assert report.interior_preserving
    assert report.fibers_singleton
    assert report.section_image_open
    assert report.deletion_witnesses == ()


def test_pseudometric_axioms_detect_asymmetry():
    distances = np.array([[Fraction(0), Fraction(1)],
                          [Fraction(1, 2), Fraction(0)]], dtype=object)
    axioms = dict(metrics.pseudometric_axioms(distances))
    assert not axioms['symmetric']
    assert axioms['triangle']


@pytest.fixture(scope='module')
def faithful_instances():
    system = golden.boolean_system(3)
    instances = [(sum_decomposition(system),
                  states.carries_state(system)[1])]
    for system in generators.system_family(seed=77, nbr_systems=120):
        if system.size > 24:
            continue
        exists, state = states.faithful_state_exists(system)
        if exists:
            instances.append((sum_decomposition(system), state))
    return instances[:25]


def test_generated_faithful_instances(faithful_instances):
    for decomposition, state in faithful_instances:
        space = metrics.pseudometric(decomposition, state)
        booleanisation = booleanise(decomposition.system)
        assert metrics.component_distance_identities(space).holds
        assert metrics.kolmogorov_quotient(space, booleanisation).classes_match
        section = metrics.make_section(space, booleanisation)
        assert metrics.verify_section(space, section, booleanisation).passed
        report = metrics.topology_report(space, booleanisation,
                                         max_subset_bruteforce=10)
        assert report.interior_criterion_holds
        certificate = metrics.state_uniqueness_check(space, booleanisation)
        assert certificate.unique and certificate.equals_state
