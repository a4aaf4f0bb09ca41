"""
End-to-end tests of the command-line interface through main().
"""
import contextlib
import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

# Add the src directory to the sys.path to allow importing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from main import EXIT_INTERNAL, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, inventory, main
from file_service import FileService
from variant_manifest import VariantManifest

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

AND_BLIF = ".model g\n.inputs a b\n.outputs y\n.gate AND I0=a I1=b O=y\n.end\n"
OR_BLIF = ".model g\n.inputs a b\n.outputs y\n.gate OR I0=a I1=b O=y\n.end\n"


def run(*argv):
    """Runs main() and returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(['-q', *argv])
    return code, out.getvalue(), err.getvalue()


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def write(self, name, text):
        with open(self.path(name), 'w', encoding='utf-8') as f:
            f.write(text)
        return self.path(name)


class TestRedactFlow(CliTestCase):
    def test_redact_program_verify(self):
        """Test the redact -> program -> verify round trip on a sequential design"""
        source = os.path.join(FIXTURES, 'counter.blif')
        code, _, _ = run('redact', '-i', source, '-o', self.path('r.blif'), '-b', self.path('r.bits'),
                         '--seed', '5', '--report', self.path('r.json'))
        self.assertEqual(code, EXIT_OK)
        with open(self.path('r.json'), encoding='utf-8') as f:
            report = json.load(f)
        self.assertEqual(report['seed'], 5)
        self.assertEqual(report['stats']['n_r'],
                         report['stats']['n_o'] + report['stats']['n_a'] + report['stats']['n_b'])
        self.assertEqual(report['stats']['coverage_problems'], [])

        code, _, _ = run('program', '-i', self.path('r.blif'), '-b', self.path('r.bits'),
                         '-o', self.path('p.blif'))
        self.assertEqual(code, EXIT_OK)
        code, out, _ = run('verify', '-a', source, '-r', self.path('p.blif'), '--cycles', '50')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('equivalent', out)
        code, _, _ = run('verify', '-a', source, '-r', self.path('r.blif'), '-b', self.path('r.bits'),
                         '--cycles', '50')
        self.assertEqual(code, EXIT_OK)

    def test_packed_bitstream_and_info(self):
        source = os.path.join(FIXTURES, 'adder4.blif')
        code, _, _ = run('redact', '-i', source, '-o', self.path('r.json'), '-b', self.path('r.bitsbin'),
                         '--seed', '2', '--preset', 'F2')
        self.assertEqual(code, EXIT_OK)
        with open(self.path('r.bitsbin'), 'rb') as f:
            self.assertEqual(f.read(4), b"RDBS")
        code, out, _ = run('info', '-i', self.path('r.json'), '-b', self.path('r.bitsbin'))
        self.assertEqual(code, EXIT_OK)
        rows = dict(line.split() for line in out.splitlines())
        self.assertEqual(rows['CLUT2'], '0')
        self.assertEqual(rows['bitstream_bits'], rows['bitstream_file_bits'])
        self.assertEqual(rows['elements'], rows['bitstream_file_segments'])

    def test_set_overrides(self):
        source = os.path.join(FIXTURES, 'mux4.blif')
        code, _, _ = run('redact', '-i', source, '-o', self.path('r.blif'), '-b', self.path('r.bits'),
                         '--set', 'cpi_fraction=0', '--set', 'coverage=0.5')
        self.assertEqual(code, EXIT_OK)
        g = FileService().read_netlist(self.path('r.blif'))
        self.assertNotIn('CPI2', {k for k, v in inventory(g).items() if v})


class TestExitCodes(CliTestCase):
    def test_mismatch(self):
        """Test that a non-equivalent design exits 2 and names the counterexample"""
        code, out, _ = run('verify', '-a', self.write('and.blif', AND_BLIF), '-r', self.write('or.blif', OR_BLIF))
        self.assertEqual(code, EXIT_MISMATCH)
        self.assertIn('a=1 b=0', out)

    def test_parse_error(self):
        bad = self.write('bad.blif', ".model m\n.inputs a\n.outputs y\n.names a y\n2 1\n.end\n")
        code, _, err = run('info', '-i', bad)
        self.assertEqual(code, EXIT_USAGE)
        self.assertTrue(err.startswith('error: netlist: NetlistSyntaxError:'))

    def test_undecodable_netlist(self):
        path = self.path('bad.blif')
        with open(path, 'wb') as f:
            f.write(b".model m\n.inputs a\xff\n.end\n")
        code, _, err = run('info', '-i', path)
        self.assertEqual(code, EXIT_USAGE)
        self.assertTrue(err.startswith('error: netlist: NetlistSyntaxError:'))

    @patch('design.RedactedDesign.cut_point_count', return_value=-1)
    def test_failed_self_check_is_internal(self, mock_count):
        """Test that a broken pipeline self-check exits 3, not as a user error"""
        code, _, err = run('redact', '-i', os.path.join(FIXTURES, 'c17.blif'), '-o', self.path('r.blif'),
                           '-b', self.path('r.bits'))
        self.assertEqual(code, EXIT_INTERNAL)
        self.assertTrue(err.startswith('error: internal: RedactorInternalError:'))
        self.assertTrue(mock_count.called)

    def test_fabric_without_bitstream(self):
        source = os.path.join(FIXTURES, 'c17.blif')
        run('redact', '-i', source, '-o', self.path('r.blif'), '-b', self.path('r.bits'))
        code, _, err = run('verify', '-a', source, '-r', self.path('r.blif'))
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('error: params: ParamsError:', err)

    def test_wrong_bitstream(self):
        source = os.path.join(FIXTURES, 'c17.blif')
        run('redact', '-i', source, '-o', self.path('r.blif'), '-b', self.path('r.bits'))
        empty = self.write('empty.bits', "# bitstream v1 segments=0 bits=0\n")
        code, _, err = run('program', '-i', self.path('r.blif'), '-b', empty, '-o', self.path('p.blif'))
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('error: bitstream: SegmentMismatchError:', err)

    def test_missing_file(self):
        code, _, err = run('info', '-i', self.path('absent.blif'))
        self.assertEqual(code, EXIT_USAGE)
        self.assertTrue(err.startswith('error: io:'))

    def test_bad_params(self):
        code, _, err = run('redact', '-i', os.path.join(FIXTURES, 'c17.blif'), '-o', self.path('r.blif'),
                           '-b', self.path('r.bits'), '--set', 'gamma_min=9')
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('error: params:', err)

    def test_usage_error(self):
        err = io.StringIO()
        with contextlib.redirect_stderr(err), self.assertRaises(SystemExit) as ctx:
            main(['redact', '-i', 'x.blif'])
        self.assertEqual(ctx.exception.code, EXIT_USAGE)
        self.assertIn('error: usage: ArgumentError:', err.getvalue())


class TestVariantCommands(CliTestCase):
    def test_gen_variants_then_metrics_and_compare(self):
        """Test a family sweep followed by metrics and compare on its manifest"""
        source = os.path.join(FIXTURES, 'c17.blif')
        out_dir = self.path('variants')
        code, _, _ = run('gen-variants', '-i', source, '--seeds', '1', '2', '--family', 'S', '--out-dir', out_dir)
        self.assertEqual(code, EXIT_OK)
        manifest = VariantManifest.load(out_dir)
        self.assertEqual(len(manifest.variants), 10)
        self.assertTrue(os.path.exists(manifest.resolve('c17-S3-s2.blif')))
        self.assertTrue(os.path.exists(manifest.resolve('c17-S3-s2.bits')))

        code, _, _ = run('metrics', '-a', source, '--manifest', out_dir, '--samples', '2',
                         '--json', self.path('m.json'), '--csv', self.path('m.csv'))
        self.assertEqual(code, EXIT_OK)
        with open(self.path('m.json'), encoding='utf-8') as f:
            doc = json.load(f)
        self.assertIn('all', doc['function_counts'])
        self.assertEqual(doc['function_space']['2'], {'recurrence': 12, 'depending_on_all': 10})
        self.assertEqual(len(doc['overhead']), 10)
        self.assertIn('S0-s1', doc['complexity'])
        with open(self.path('m.csv'), encoding='utf-8') as f:
            self.assertEqual(f.readline().strip(), 'section,row,column,value')

        code, out, _ = run('compare', '--manifest', out_dir, '--vectors', '64')
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual(len(doc['similarity']['labels']), 10)
        self.assertEqual(doc['similarity']['matrix'][0][0], 1.0)

    def test_variant_pairs(self):
        source = os.path.join(FIXTURES, 'full_adder.blif')
        for seed in ('1', '2'):
            run('redact', '-i', source, '-o', self.path(f'v{seed}.blif'), '-b', self.path(f'v{seed}.bits'),
                '--seed', seed)
        code, out, _ = run('compare', '--variant', f"{self.path('v1.blif')}:{self.path('v1.bits')}",
                           '--variant', f"{self.path('v2.blif')}:{self.path('v2.bits')}")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)['similarity']['labels'], ['v1', 'v2'])

    def test_unknown_preset(self):
        code, _, err = run('gen-variants', '-i', os.path.join(FIXTURES, 'c17.blif'), '--seeds', '1',
                           '--preset', 'nope', '--out-dir', self.path('v'))
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('ParamsError', err)

    def test_no_variants(self):
        code, _, err = run('compare')
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('no variants', err)


if __name__ == '__main__':
    unittest.main()
