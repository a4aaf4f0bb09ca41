"""
Unit tests for the indistinguishability metrics and the metrics report.
"""
import io
import json
import math
import os
import sys
import unittest
from types import SimpleNamespace

# Add the src directory to the sys.path to allow importing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bitstream import Bitstream
from cones import identify_cut_points
from errors import DomainError, ParamsError
from expansion import expand_design
from fabric import BitSegment, Clut, ElementKind, InputBinding
from file_service import FileService
from metrics import (MetricsReport, TdiWeights, clut_function_distribution, complexity_estimates,
                     count_all_input_functions, count_functions_depending_on_all, gate_overhead,
                     similarity_matrix, tdi_s, tdi_s_reports)
from models import Kind
from netlist import Hypergraph
from params_manager import RedactionParams
from redactor import redact_netlist

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def load_fixture(name):
    return FileService().read_netlist(os.path.join(FIXTURES, name))


def and_gate():
    g = Hypergraph("and2")
    a = g.add_vertex(Kind.PI, name="a")
    b = g.add_vertex(Kind.PI, name="b")
    y = g.add_vertex(Kind.AND, [a, b], name="y")
    g.add_vertex(Kind.PO, [y], name="y")
    return g


class TestFunctionCounts(unittest.TestCase):
    def test_recurrence(self):
        self.assertEqual([count_all_input_functions(n) for n in range(4)], [0, 2, 12, 242])

    def test_inclusion_exclusion(self):
        self.assertEqual(count_functions_depending_on_all(1), 2)
        self.assertEqual(count_functions_depending_on_all(2), 10)
        self.assertEqual(count_functions_depending_on_all(3), 218)

    def test_out_of_range(self):
        with self.assertRaises(DomainError):
            count_all_input_functions(-1)
        with self.assertRaises(DomainError):
            count_functions_depending_on_all(17)

    def test_distribution_ignores_dummies_and_cpis(self):
        """Test that AND2 with a dummy input counts as the same function"""
        b1 = Bitstream([BitSegment(0, ElementKind.CLUT, 2, (0, 0, 0, 1)),
                        BitSegment(1, ElementKind.CPI, 2, (0,))])
        b2 = Bitstream([BitSegment(0, ElementKind.CLUT, 2, (1, 1, 1, 0)),
                        BitSegment(1, ElementKind.CLUT, 3, (0, 0, 0, 1, 0, 0, 0, 1))])
        dist = clut_function_distribution([b1, b2])
        self.assertEqual(dist.unique_counts(), {2: 2, 3: 1})
        self.assertEqual(dist.totals(), {2: 2, 3: 1})
        self.assertEqual(dist.cumulative(2), [0.5, 1.0])
        self.assertEqual(dist.cumulative(4), [])

    def test_distribution_totals_match_element_widths(self):
        """Test that each width's histogram total equals the CLUT plus CSB count of that width"""
        for name in ('adder4.blif', 'counter.blif'):
            result = redact_netlist(load_fixture(name), 4, RedactionParams())
            design = result.design
            expected = design.widths("CLUT") + design.widths("CSB")
            self.assertEqual(clut_function_distribution([result.bitstream]).totals(), dict(sorted(expected.items())))


class TestStructuralScore(unittest.TestCase):
    def test_and_gate_score(self):
        """Test that the AND output scores FI_size 3 + FI_gates 1 + FI_drivers 2"""
        g = and_gate()
        cp = identify_cut_points(g)[0]
        self.assertEqual(tdi_s(g, cp), 6)
        self.assertEqual(tdi_s(g, cp, TdiWeights(1, 0, 0, 0)), 3)

    def test_score_is_linear_in_weights(self):
        """Test that scaling or summing weight vectors scales or sums every cut-point score"""
        g = load_fixture('counter.blif')
        w = TdiWeights(1, 2, 0, 3)
        u = TdiWeights(0, 1, 4, 1)
        for cp in identify_cut_points(g):
            base = tdi_s(g, cp, w)
            self.assertAlmostEqual(tdi_s(g, cp, TdiWeights(2.5, 5, 0, 7.5)), 2.5 * base)
            self.assertAlmostEqual(tdi_s(g, cp, TdiWeights(1, 3, 4, 4)), base + tdi_s(g, cp, u))

    def test_bad_weights(self):
        with self.assertRaises(ParamsError):
            TdiWeights(0, 0, 0, 0)
        with self.assertRaises(ParamsError):
            TdiWeights(-1, 1, 1, 1)

    def test_reports_on_identical_variants(self):
        g = load_fixture('adder4.blif')
        report = tdi_s_reports(g, {"x": g, "y": g}, n_samples=4)
        self.assertEqual(len(report.samples), 4)
        self.assertEqual(report.variants["x"], report.original)
        self.assertEqual(report.matches, {"x|y": 4})
        self.assertEqual(report.variance(), [0.0] * 4)

    def test_samples_span_the_range(self):
        g = load_fixture('adder4.blif')
        report = tdi_s_reports(g, {"x": g}, n_samples=3)
        self.assertEqual(len(set(report.samples)), 3)
        self.assertEqual(report.original[0], min(report.original))

    def test_redacted_variants_are_scored(self):
        g = load_fixture('counter.blif')
        variants = {f"s{seed}": redact_netlist(g, seed, RedactionParams()).netlist for seed in (1, 2)}
        report = tdi_s_reports(g, variants, n_samples=5)
        self.assertGreater(len(report.samples), 0)
        self.assertIn("s1|s2", report.to_dict()["matches"])

    def test_no_variants(self):
        with self.assertRaises(DomainError):
            tdi_s_reports(and_gate(), {})
        with self.assertRaises(DomainError):
            tdi_s_reports(and_gate(), {"x": and_gate()}, n_samples=0)


class TestSimilarity(unittest.TestCase):
    def test_identical_designs(self):
        g = load_fixture('full_adder.blif')
        matrix = similarity_matrix([g, g], n_vectors=64)
        self.assertEqual(matrix.tolist(), [[1.0, 1.0], [1.0, 1.0]])

    def test_symmetric_with_unit_diagonal(self):
        g = load_fixture('mux4.blif')
        variants = [redact_netlist(g, seed, RedactionParams()).netlist for seed in (1, 2, 3)]
        matrix = similarity_matrix(variants, n_vectors=128, seed=4)
        for i in range(3):
            self.assertEqual(matrix[i, i], 1.0)
            for j in range(3):
                self.assertEqual(matrix[i, j], matrix[j, i])
                self.assertTrue(0.0 <= matrix[i, j] <= 1.0)

    def test_needs_vectors(self):
        with self.assertRaises(DomainError):
            similarity_matrix([and_gate()], n_vectors=0)


class TestComplexity(unittest.TestCase):
    def test_estimates(self):
        """Test 2^d, 2*s!, log2 C(12, 10) and C(5, 2) on a hand-built record"""
        clut = Clut(0, [InputBinding(k) for k in range(3)], (0,) * 8, base_width=2)
        design = SimpleNamespace(table_elements=lambda: [clut], n_r=12, n_o=10,
                                 cpi_candidates=5, cpis=[None, None])
        report = complexity_estimates(design)
        self.assertEqual(report.dummy_factors, {0: 2})
        self.assertEqual(report.permutation_variants, {0: 12})
        self.assertAlmostEqual(report.log2_cut_point_choices, math.log2(66))
        self.assertAlmostEqual(report.log2_cut_point_choices, 6.044, places=3)
        self.assertEqual(report.cpi_configurations, 10)
        self.assertEqual(report.to_dict()["cpi_configurations"], "10")

    def test_overhead(self):
        g = load_fixture('c17.blif')
        expanded = expand_design(redact_netlist(g, 1, RedactionParams()).netlist)
        self.assertGreater(gate_overhead(g, expanded), 1.0)
        self.assertEqual(gate_overhead(g, g), 1.0)

    def test_overhead_needs_cells(self):
        g = Hypergraph()
        a = g.add_vertex(Kind.PI, name="a")
        g.add_vertex(Kind.PO, [a], name="a")
        with self.assertRaises(DomainError):
            gate_overhead(g, g)


class TestMetricsReport(unittest.TestCase):
    def setUp(self):
        self.report = MetricsReport(function_counts={"v1": {"2": 3}}, bitstream_bits={"v1": 13},
                                    similarity_labels=["v1", "v2"], similarity=[[1.0, 0.25], [0.25, 1.0]],
                                    overhead={"v1": 4.5})

    def test_json(self):
        doc = json.loads(self.report.to_json())
        self.assertEqual(doc["similarity"]["labels"], ["v1", "v2"])
        self.assertIsNone(doc["tdi"])
        self.assertEqual(doc["bitstream_bits"], {"v1": 13})

    def test_csv(self):
        stream = io.StringIO()
        self.report.write_csv(stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], "section,row,column,value")
        self.assertIn("unique_functions,v1,2,3", lines)
        self.assertIn("similarity,v1,v2,0.25", lines)
        self.assertIn("gate_overhead,v1,,4.5", lines)


if __name__ == '__main__':
    unittest.main()
