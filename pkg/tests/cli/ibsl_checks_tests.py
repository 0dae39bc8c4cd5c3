from contextlib import contextmanager
from io import StringIO
import json
import os
import sys
import unittest
from unittest.mock import patch

from testfixtures import TempDirectory

import ibsl_states.cli.ibsl_checks as ibsl_checks
import ibsl_states.metadata.json_operations as json_ops

DOCUMENTS_DIR = os.path.join(os.path.dirname(__file__), '..', '..',
                             'documents')

NOT_COMMUTATIVE = """name broken
kind raw
raw
  elements 0 1
  zero 0
  one 1
  neg: 1 0
  join 0: 0 1
  join 1: 0 1
  meet 0: 0 0
  meet 1: 0 1
end
"""


@contextmanager
def captured_output():
    """
    Context manager that captures stdout and potential errors.

    :return str sys.stdout: Console output
    :return str sys.stderr: Errors
    """
    new_out, new_err = StringIO(), StringIO()
    old_out, old_err = sys.stdout, sys.stderr
    try:
        sys.stdout, sys.stderr = new_out, new_err
        yield sys.stdout, sys.stderr
    finally:
        sys.stdout, sys.stderr = old_out, old_err


def doc_path(file_name):
    return os.path.join(DOCUMENTS_DIR, file_name)


class TestIBSLChecks(unittest.TestCase):

    def setUp(self):
        self.tempdir = TempDirectory()
        self.temp_path = self.tempdir.path
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop('PLONKA_CAP', None)

    def tearDown(self):
        self.env.stop()
        TempDirectory.cleanup_all()

    def run_cli(self, *argv):
        with captured_output() as (out, err):
            exit_code = ibsl_checks.main(list(argv))
        return exit_code, out.getvalue().strip()

    def test_parse_args(self):
        with patch('argparse._sys.argv',
                   ['python', 'check-state', 'a.system', 'b.state',
                    '--format', 'json', '--seed', '3']):
            parsed_args = ibsl_checks.parse_args()
            self.assertEqual(parsed_args.command, 'check-state')
            self.assertEqual(parsed_args.system, 'a.system')
            self.assertEqual(parsed_args.state, 'b.state')
            self.assertEqual(parsed_args.format, 'json')
            self.assertEqual(parsed_args.seed, 3)
            self.assertIsNone(parsed_args.cap)
            self.assertFalse(parsed_args.verbose)

    def test_parse_args_count_exclusive(self):
        with captured_output():
            with self.assertRaises(SystemExit):
                ibsl_checks.parse_args(['count', '--nd', '3', '4',
                                        '--forests', '3'])

    def test_validate_system(self):
        exit_code, output = self.run_cli('validate', doc_path('ex14.system'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0],
                         "Valid direct system; Płonka sum passes I1–I8")

    def test_validate_raw(self):
        exit_code, output = self.run_cli('validate', doc_path('ex22.raw'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0],
                         "Raw algebra passes I1–I8")

    def test_validate_broken_raw(self):
        self.tempdir.write('broken.raw', NOT_COMMUTATIVE, encoding='utf-8')
        exit_code, output = self.run_cli(
            'validate', os.path.join(self.temp_path, 'broken.raw'))
        self.assertEqual(exit_code, 1)
        self.assertTrue(output.startswith("Raw algebra fails"))

    def test_booleanise_broken_raw(self):
        self.tempdir.write('broken.raw', NOT_COMMUTATIVE, encoding='utf-8')
        exit_code, output = self.run_cli(
            'booleanise', os.path.join(self.temp_path, 'broken.raw'))
        self.assertEqual(exit_code, 1)
        self.assertTrue(output.startswith("Not an involutive bisemilattice"))

    def test_empty_document(self):
        self.tempdir.write('empty.system', b'')
        exit_code, output = self.run_cli(
            'validate', os.path.join(self.temp_path, 'empty.system'))
        self.assertEqual(exit_code, 2)
        self.assertEqual(output, '')

    def test_missing_document(self):
        exit_code, _ = self.run_cli('validate', 'no_such.system')
        self.assertEqual(exit_code, 2)

    def test_decompose(self):
        exit_code, output = self.run_cli('decompose', doc_path('ex22.raw'))
        self.assertEqual(exit_code, 0)
        self.assertIn("Decomposed into 2 components", output)
        self.assertIn('kind system', output)

    def test_sum_over_cap(self):
        exit_code, _ = self.run_cli('sum', doc_path('ex14.system'),
                                    '--cap', '4')
        self.assertEqual(exit_code, 1)

    def test_sum_of_raw_document(self):
        exit_code, output = self.run_cli('sum', doc_path('ex22.raw'))
        self.assertEqual(exit_code, 2)
        self.assertEqual(output, '')

    def test_check_state_with_system_document(self):
        exit_code, output = self.run_cli('check-state',
                                         doc_path('ex14.system'),
                                         doc_path('ex14.system'))
        self.assertEqual(exit_code, 2)
        self.assertEqual(output, '')

    def test_phi_inverse_with_state_document(self):
        exit_code, _ = self.run_cli('phi-inverse', doc_path('ex14.system'),
                                    doc_path('ex34.state'))
        self.assertEqual(exit_code, 2)

    def test_atom_cap(self):
        self.tempdir.write('wide.system',
                           'name wide\nkind system\nsemilattice\n'
                           '  elements k\nend\ncomponent k atoms=17\n',
                           encoding='utf-8')
        exit_code, output = self.run_cli(
            'sum', os.path.join(self.temp_path, 'wide.system'))
        self.assertEqual(exit_code, 1)
        self.assertEqual(output.split('\n')[0],
                         "Algebra with 17 atoms exceeds cap of 16")

    def test_zero_cap(self):
        exit_code, output = self.run_cli('sum', doc_path('ex14.system'),
                                         '--cap', '0')
        self.assertEqual(exit_code, 2)
        self.assertEqual(output, '')

    def test_check_state(self):
        exit_code, output = self.run_cli('check-state',
                                         doc_path('ex14.system'),
                                         doc_path('ex34.state'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0], "valid, faithful")

    def test_phi(self):
        exit_code, output = self.run_cli('phi', doc_path('ex14.system'),
                                         doc_path('ex34.state'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output, "phi(s) = c=1/2, d=1/6, e=1/3")

    def test_phi_inverse(self):
        exit_code, output = self.run_cli(
            'phi-inverse', doc_path('ex14.system'),
            doc_path('ex14-uniform.measure'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0], "valid, faithful")

    def test_no_faithful_state(self):
        exit_code, output = self.run_cli('faithful', doc_path('ex22.system'))
        self.assertEqual(exit_code, 1)
        self.assertEqual(output.split('\n')[0], "no faithful state exists")

    def test_metric_chain(self):
        self.tempdir.write('ex22.state',
                           'name s\nkind state\ntop-measure b=1\n',
                           encoding='utf-8')
        exit_code, output = self.run_cli(
            'metric', doc_path('ex22.system'),
            os.path.join(self.temp_path, 'ex22.state'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0],
                         "pseudometric with 2 zero classes")

    def test_topology(self):
        self.tempdir.write('caps.json', json.dumps(
            {'max_subset_bruteforce': 12}).encode())
        exit_code, output = self.run_cli(
            'topology', doc_path('ex14.system'), doc_path('ex34.state'),
            '--config', os.path.join(self.temp_path, 'caps.json'))
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0],
                         "8 zero classes over 8 quotient classes")

    def test_count_nd(self):
        exit_code, output = self.run_cli('count', '--nd', '3', '4')
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0],
                         "N_d = 8 (chain 4 × forests 2)")

    def test_count_forests_oracle(self):
        exit_code, output = self.run_cli('count', '--forests', '4',
                                         '--oracle')
        self.assertEqual(exit_code, 0)
        self.assertEqual(output.split('\n')[0], "forests(4) = 38")

    def test_enumerate_disagrees_for_two_components(self):
        exit_code, output = self.run_cli('enumerate', '3', '2')
        self.assertEqual(exit_code, 1)
        self.assertEqual(output.split('\n')[0],
                         "3 inclusive systems up to isomorphism")

    def test_json_format(self):
        exit_code, output = self.run_cli('count', '--nd', '3', '3',
                                         '--format', 'json')
        self.assertEqual(exit_code, 0)
        report = json.loads(output)
        self.assertEqual(report['command'], 'count')
        self.assertTrue(report['passed'])
        self.assertEqual(report['data']['value'], 6)

    def test_output_file(self):
        output_path = os.path.join(self.temp_path, 'report.json')
        exit_code, _ = self.run_cli('count', '--chain', '3', '2',
                                    '--output', output_path)
        self.assertEqual(exit_code, 0)
        report = json_ops.read_json_file(output_path,
                                         schema_name='REPORT_SCHEMA')
        self.assertEqual(report['summary'], "chain factor = 4")

    def test_invalid_config(self):
        self.tempdir.write('caps.json', json.dumps(
            {'max_carrier': 0}).encode())
        exit_code, output = self.run_cli(
            'count', '--forests', '3',
            '--config', os.path.join(self.temp_path, 'caps.json'))
        self.assertEqual(exit_code, 2)
        self.assertEqual(output, '')

    def test_count_bad_range(self):
        exit_code, output = self.run_cli('count', '--nd', '3', '1')
        self.assertEqual(exit_code, 2)
        self.assertEqual(output, '')
