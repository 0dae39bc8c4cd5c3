from fractions import Fraction
import json
import unittest

import jsonschema
import numpy as np

import ibsl_states.utils.report_utils as report_utils
import tests.golden_systems as golden


class TestReportUtils(unittest.TestCase):

    def test_jsonable(self):
        value = {'weights': (Fraction(1, 2), Fraction(1)),
                 'ids': np.array([1, 2]),
                 'flag': np.bool_(True),
                 3: None}
        self.assertEqual(report_utils.jsonable(value),
                         {'weights': ['1/2', '1'], 'ids': [1, 2],
                          'flag': True, '3': None})

    def test_make_check(self):
        check = report_utils.make_check('Unit', False, (1,), 'state')
        self.assertEqual(check, {'name': 'Unit', 'passed': False,
                                 'witness': [1], 'detail': 'state'})
        check = report_utils.make_check('ngib', None)
        self.assertEqual(check, {'name': 'ngib', 'passed': None})

    def test_report_passes_with_informational_checks(self):
        checks = [report_utils.make_check('a', True),
                  report_utils.make_check('b', None)]
        report = report_utils.make_report('validate', 'ok', checks)
        self.assertTrue(report['passed'])
        self.assertEqual(report['data'], {})

    def test_report_fails(self):
        checks = [report_utils.make_check('a', True),
                  report_utils.make_check('b', False)]
        report = report_utils.make_report('validate', 'not ok', checks,
                                          {'value': Fraction(5, 6)})
        self.assertFalse(report['passed'])
        self.assertEqual(report['data'], {'value': '5/6'})

    def test_bad_report(self):
        with self.assertRaises(jsonschema.exceptions.ValidationError):
            report_utils.make_report('validate', 3, [])

    def test_rational_frame(self):
        frame = report_utils.rational_frame(
            [[Fraction(0), Fraction(1, 3)], [Fraction(1, 3), Fraction(0)]],
            ['x', 'y'])
        self.assertEqual(frame.loc['x', 'y'], '1/3')
        self.assertEqual(frame.loc['y', 'y'], '0')

    def test_operation_frame(self):
        frame = report_utils.operation_frame(golden.chain_raw(), 'join')
        self.assertEqual(frame.loc['a', "a'"], '1')
        self.assertEqual(frame.loc["b'", '1'], 'b')

    def test_value_frame(self):
        frame = report_utils.value_frame(['0', '1'], ['i0', 'i0'],
                                         [Fraction(0), Fraction(1)])
        self.assertEqual(list(frame.columns),
                         ['element', 'component', 'value'])
        self.assertEqual(frame['value'].tolist(), ['0', '1'])

    def test_report_text(self):
        report = report_utils.make_report(
            'decompose', 'Decomposed', [report_utils.make_check('a', True)],
            {'document': 'name x\nkind system\n'})
        text = report_utils.report_text(report)
        lines = text.split('\n')
        self.assertEqual(lines[0], 'Decomposed')
        self.assertIn('kind system', lines)

    def test_report_json(self):
        report = report_utils.make_report('metric', 'metric', [])
        frame = report_utils.rational_frame([[Fraction(0)]], ['0'])
        parsed = json.loads(report_utils.report_json(report,
                                                     {'distances': frame}))
        self.assertEqual(parsed['data']['tables']['distances'],
                         {'index': ['0'], 'columns': ['0'], 'data': [['0']]})
        self.assertNotIn('tables', report['data'])
