"""
Unit tests for FileService and the variant manifest.
"""
import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

# Add the src directory to the sys.path to allow importing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bitstream import Bitstream
from errors import NetlistSyntaxError, ParamsError
from fabric import BitSegment, ElementKind
from file_service import FileService
from netlist_formats import serialize_netlist
from variant_manifest import VariantManifest, VariantRecord

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


class TestFileService(unittest.TestCase):
    def setUp(self):
        self.files = FileService()
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_format_from_extension(self):
        self.assertEqual(self.files.netlist_format("x/design.json"), "json")
        self.assertEqual(self.files.netlist_format("x/design.BLIF"), "blif")
        self.assertEqual(self.files.netlist_format("x/design.txt"), "blif")
        self.assertEqual(self.files.netlist_format("x/design.txt", "json"), "json")
        self.assertEqual(self.files.bitstream_format("a.bitsbin"), "packed")
        self.assertEqual(self.files.bitstream_format("a.bits"), "text")
        self.assertEqual(self.files.bitstream_format("a.bits", packed=True), "packed")

    def test_netlist_written_in_chosen_format(self):
        """Test that a .json path gets the JSON graph and reads back equal"""
        g = self.files.read_netlist(os.path.join(FIXTURES, 'counter.blif'))
        path = os.path.join(self.tmp, "nested", "counter.json")
        self.files.write_netlist(path, g)
        with open(path, encoding='utf-8') as f:
            self.assertTrue(f.read().lstrip().startswith("{"))
        self.assertEqual(serialize_netlist(self.files.read_netlist(path)), serialize_netlist(g))

    def test_bitstream_files(self):
        b = Bitstream([BitSegment(0, ElementKind.CLUT, 2, (0, 1, 1, 0))])
        for name in ("design.bits", "design.bitsbin"):
            path = os.path.join(self.tmp, name)
            self.files.write_bitstream(path, b)
            self.assertEqual(self.files.read_bitstream(path), b)
        with open(os.path.join(self.tmp, "design.bitsbin"), 'rb') as f:
            self.assertEqual(f.read(4), b"RDBS")

    def test_undecodable_netlist(self):
        """Test that a netlist with non-UTF-8 bytes is a syntax error"""
        path = os.path.join(self.tmp, "bad.blif")
        with open(path, "wb") as f:
            f.write(b".model m\n.inputs \xff\n.end\n")
        with self.assertRaises(NetlistSyntaxError):
            self.files.read_netlist(path)

    def test_list_netlists(self):
        for name in ("b.blif", "a.json", "notes.txt"):
            open(os.path.join(self.tmp, name), 'w').close()
        found = [os.path.basename(p) for p in self.files.list_netlists(self.tmp)]
        self.assertEqual(found, ["a.json", "b.blif"])

    @patch('os.listdir')
    def test_list_netlists_unreadable(self, mock_listdir):
        mock_listdir.side_effect = OSError("denied")
        self.assertEqual(self.files.list_netlists(self.tmp), [])

    def test_normalize_path(self):
        self.assertEqual(self.files.normalize_path(""), "")
        self.assertEqual(self.files.normalize_path("a/./b"), os.path.normpath("a/b"))


class TestVariantManifest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_save_and_load(self):
        """Test that a saved manifest loads back sorted by preset and seed"""
        manifest = VariantManifest(self.tmp, "designs/c17.blif")
        manifest.add(VariantRecord("S1", 2, "c17-S1-s2.blif", "c17-S1-s2.bits", {"d_max": 2}, {"n_r": 2}))
        manifest.add(VariantRecord("S0", 9, "c17-S0-s9.blif", "c17-S0-s9.bits"))
        manifest.add(VariantRecord("S1", 1, "c17-S1-s1.blif", "c17-S1-s1.bits"))
        manifest.save()

        loaded = VariantManifest.load(self.tmp)
        self.assertEqual(loaded.source, "designs/c17.blif")
        self.assertEqual([v.label for v in loaded.variants], ["S0-s9", "S1-s1", "S1-s2"])
        record = loaded.find("S1-s2")
        self.assertEqual(record.params, {"d_max": 2})
        self.assertEqual(loaded.resolve(record.netlist), os.path.join(loaded.out_dir, "c17-S1-s2.blif"))
        self.assertIsNone(loaded.find("S9-s0"))

    def test_missing_manifest(self):
        with self.assertRaises(ParamsError):
            VariantManifest.load(os.path.join(self.tmp, "absent.yaml"))

    def test_bad_entry(self):
        path = os.path.join(self.tmp, "manifest.yaml")
        with open(path, 'w', encoding='utf-8') as f:
            f.write("source: x\nvariants:\n  - preset: S0\n    colour: red\n")
        with self.assertRaises(ParamsError):
            VariantManifest.load(path)


if __name__ == '__main__':
    unittest.main()
