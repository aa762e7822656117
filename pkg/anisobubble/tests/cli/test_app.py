from anisobubble.cli.app import main, run
from anisobubble.cli.constants import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_TOLERANCE
from anisobubble.numerics.errors import NonFiniteIntegrandError
from anisobubble.tests.base_test import TestCase
from unittest.mock import patch
import json
import os
import pandas as pd
import tempfile


class RunTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out_dir = os.path.join(self.tmp.name, 'out')
        return super().setUp()

    def tearDown(self):
        self.tmp.cleanup()
        return super().tearDown()

    def write_config(self, obj):
        path = os.path.join(self.tmp.name, 'config.json')
        with open(path, 'w') as file:
            json.dump(obj, file)
        return path

    def read_artifact(self, file_name, mode='r'):
        with open(os.path.join(self.out_dir, file_name), mode) as file:
            return file.read()

    def test_xi_p(self):
        code = run('xi-p', flags=dict(draws=1500, seed=7, out_dir=self.out_dir))
        self.assertEqual(code, EXIT_OK)
        report = json.loads(self.read_artifact('xi-p.json'))
        self.assertTrue(report['pass'])
        self.assertEqual(report['seed'], 7)
        self.assertEqual(report['subcommand'], 'xi-p')
        self.assertEqual(report['violations'], 0)
        csv = self.read_artifact('xi-p.csv', 'rb')
        self.assertTrue(csv.startswith(b'constant,draws,k,p,violations,worst_ratio\r\n'))
        self.assertEqual(csv.count(b'\r\n'), 16)
        self.assertNotIn(b'\n', csv.replace(b'\r\n', b''))

    def test_csv_is_reproducible(self):
        flags = dict(draws=1500, seed=11, out_dir=self.out_dir)
        run('xi-p', flags=flags)
        first = self.read_artifact('xi-p.csv', 'rb')
        run('xi-p', flags=flags)
        self.assertEqual(self.read_artifact('xi-p.csv', 'rb'), first)
        self.assertEqual(
            [f for f in os.listdir(self.out_dir) if f.endswith('.tmp')],
            [],
        )

    def test_tolerance_failure_still_writes_the_report(self):
        path = self.write_config(dict(
            version=1,
            norm=dict(family='euclidean'),
            commands=dict(interaction=dict(separations=[10.0, 20.0], tolerance=1e-12)),
        ))
        code = run('interaction', path, flags=dict(out_dir=self.out_dir))
        self.assertEqual(code, EXIT_TOLERANCE)
        report = json.loads(self.read_artifact('interaction.json'))
        self.assertFalse(report['pass'])
        self.assertEqual(len(report['config']['commands']['interaction']['separations']), 2)
        self.assertTrue(os.path.exists(os.path.join(self.out_dir, 'interaction.csv')))

    def test_config_errors(self):
        path = self.write_config(dict(version=1, norm=dict(params={})))
        self.assertEqual(run('xi-p', path, flags=dict(out_dir=self.out_dir)), EXIT_CONFIG)
        with open(path, 'w') as file:
            file.write('{"version": ')
        self.assertEqual(run('xi-p', path, flags=dict(out_dir=self.out_dir)), EXIT_CONFIG)
        self.assertEqual(run('no-such-command', flags=dict(out_dir=self.out_dir)), EXIT_CONFIG)
        self.assertEqual(run('pfunction-check', flags=dict(out_dir=self.out_dir)), EXIT_CONFIG)
        self.assertEqual(run('xi-p', flags=dict(draws=0, out_dir=self.out_dir)), EXIT_CONFIG)
        self.assertFalse(os.path.exists(self.out_dir))

    def test_proof_bubble_off_grid_center(self):
        path = self.write_config(dict(
            version=1,
            norm=dict(family='euclidean'),
            matrix=dict(n=[4], p=[1.5]),
            commands={'proof-bubble': dict(shift=0.3137)},
        ))
        code = run('proof-bubble', path, flags=dict(out_dir=self.out_dir))
        self.assertEqual(code, EXIT_OK)
        rows = pd.read_csv(os.path.join(self.out_dir, 'proof-bubble.csv'))
        self.assertEqual(len(rows), 1)
        self.assertLessEqual(rows['center_error'][0], 1e-6)
        self.assertLessEqual(rows['scale_error'][0], 1e-6)

    @patch('anisobubble.cli.app.run_command')
    def test_numerical_error(self, run_command):
        run_command.side_effect = NonFiniteIntegrandError(3, float('nan'))
        code = run('residual', flags=dict(out_dir=self.out_dir))
        self.assertEqual(code, EXIT_NUMERICAL)
        report = json.loads(self.read_artifact('residual.json'))
        self.assertFalse(report['pass'])
        self.assertEqual(report['error']['code'], 'non-finite-integrand')
        self.assertEqual(report['error']['details']['index'], 3)

    @patch('anisobubble.cli.app.run_command')
    def test_rejected_input(self, run_command):
        run_command.side_effect = ValueError('bad cell')
        self.assertEqual(run('residual', flags=dict(out_dir=self.out_dir)), EXIT_CONFIG)

    def test_main(self):
        code = main(['xi-p', '--draws', '1500', '--seed', '3', '--out-dir', self.out_dir, '--threads', '1'])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(self.read_artifact('xi-p.json'))['seed'], 3)
        with self.assertRaises(SystemExit):
            main(['pfunction-check', 'not-a-variant'])
