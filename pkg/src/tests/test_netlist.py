"""
Unit tests for the hypergraph IR and the BLIF/JSON netlist formats.
"""
import json
import os
import sys
import unittest

# Add the src directory to the sys.path to allow importing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bitstream import fabric_slots, parse_bitstream, program, serialize_bitstream
from equivalence import verify_design
from errors import (CombinationalCycleError, DomainError, MultiplyDrivenNetError, NetlistSyntaxError,
                    UndrivenNetError, UnsupportedArityError)
from file_service import FileService
from models import Kind
from netlist import Hypergraph
from netlist_formats import parse_netlist, serialize_netlist

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')
GOLDEN = os.path.join(os.path.dirname(__file__), 'golden')

AND_BLIF = """\
.model and2
.inputs a b
.outputs y
.names a b y
11 1
.end
"""


def load_fixture(name):
    return FileService().read_netlist(os.path.join(FIXTURES, name))


def same_graph(a, b):
    def records(g):
        return [(v.id, v.kind, tuple(v.fanins), v.name, v.bits, v.element, v.index)
                for v in (g.vertices[i] for i in g)]
    return records(a) == records(b) and a.pi_names() == b.pi_names() and a.po_names() == b.po_names()


class TestBlifReader(unittest.TestCase):
    def test_names_table_becomes_table_vertex(self):
        """Test that a two-input .names table parses to an AND truth table"""
        g = parse_netlist(AND_BLIF)
        y = g.vertices[g.id_of('y')]
        self.assertEqual(y.kind, Kind.TABLE)
        self.assertEqual(y.bits, (0, 0, 0, 1))
        self.assertEqual(g.pi_names(), ['a', 'b'])
        self.assertEqual(g.po_names(), ['y'])

    def test_canonical_ids(self):
        """Test that PIs come first, definitions in file order, POs last"""
        g = load_fixture('full_adder.blif')
        names = [g.vertices[v].name for v in g]
        self.assertEqual(names, ['a', 'b', 'cin', 'p', 'sum', 'g', 't', 'cout', 'sum', 'cout'])
        self.assertEqual([g.kind(v) for v in g.po_ids], [Kind.PO, Kind.PO])
        self.assertTrue(g.is_canonical())

    def test_offset_table_rows(self):
        """Test that OFF-set rows invert the table"""
        g = parse_netlist(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 0\n.end\n")
        self.assertEqual(g.vertices[g.id_of('y')].bits, (1, 1, 1, 0))

    def test_constant_tables(self):
        g = parse_netlist(".model m\n.inputs a\n.outputs one zero\n.names one\n1\n.names zero\n.end\n")
        self.assertEqual(g.kind(g.id_of('one')), Kind.CONST1)
        self.assertEqual(g.kind(g.id_of('zero')), Kind.CONST0)

    def test_line_continuation_and_comments(self):
        text = ".model m # name\n.inputs a \\\n b\n.outputs y\n.gate AND I0=a I1=b O=y\n.end\n"
        g = parse_netlist(text)
        self.assertEqual(g.pi_names(), ['a', 'b'])
        self.assertEqual(g.kind(g.id_of('y')), Kind.AND)

    def test_latch_becomes_dff(self):
        g = load_fixture('shift_register.blif')
        self.assertEqual(len(g.ff_ids), 3)
        self.assertEqual(g.kind(g.id_of('q1')), Kind.DFF)

    def test_syntax_error_reports_line(self):
        """Test that syntax errors carry the line number"""
        with self.assertRaises(NetlistSyntaxError) as ctx:
            parse_netlist(".model m\n.inputs a\n.outputs y\n.names a y\n2 1\n.end\n")
        self.assertEqual(ctx.exception.line, 5)

    def test_unknown_command(self):
        with self.assertRaises(NetlistSyntaxError):
            parse_netlist(".model m\n.inputs a\n.bogus\n.end\n")

    def test_table_wider_than_six(self):
        names = " ".join(f"i{k}" for k in range(7))
        text = f".model m\n.inputs {names}\n.outputs y\n.names {names} y\n1111111 1\n.end\n"
        with self.assertRaises(UnsupportedArityError):
            parse_netlist(text)

    def test_multiply_driven_net(self):
        """Test that a net driven by two gates is rejected"""
        text = ".model m\n.inputs a b\n.outputs y\n.gate AND I0=a I1=b O=y\n.gate OR I0=a I1=b O=y\n.end\n"
        with self.assertRaises(MultiplyDrivenNetError):
            parse_netlist(text)

    def test_undriven_net(self):
        with self.assertRaises(UndrivenNetError):
            parse_netlist(".model m\n.inputs a\n.outputs y\n.gate AND I0=a I1=x O=y\n.end\n")

    def test_combinational_cycle(self):
        text = ".model m\n.inputs a\n.outputs y\n.gate NOT I0=y O=x\n.gate NOT I0=x O=y\n.end\n"
        with self.assertRaises(CombinationalCycleError) as ctx:
            parse_netlist(text)
        self.assertEqual(len(ctx.exception.cycle), 2)

    def test_bad_latch_init(self):
        with self.assertRaises(NetlistSyntaxError):
            parse_netlist(".model m\n.inputs a\n.outputs q\n.latch a q 1\n.end\n")

    def test_fabric_cells(self):
        """Test that CLUT/CSB/CPI/CFG cells parse with their element ids"""
        text = (".model f\n.inputs a b\n.outputs y q\n"
                ".subckt CLUT2 id=0 I0=a I1=b O=n\n"
                ".subckt CSB2 id=1 I0=n I1=a O=m Q=q\n"
                ".subckt CPI2 id=2 I0=m I1=b O=y\n"
                ".subckt CFG id=3 bit=1 O=k\n.end\n")
        g = parse_netlist(text)
        self.assertEqual(g.kind(g.id_of('n')), Kind.CLUT)
        self.assertEqual(g.kind(g.id_of('q')), Kind.DFF)
        self.assertEqual(g.vertices[g.id_of('q')].element, 1)
        self.assertEqual(g.csb_registers(g.id_of('m')), [g.id_of('q')])
        self.assertEqual(g.vertices[g.id_of('k')].index, 1)
        self.assertTrue(g.has_fabric)

    def test_csb_needs_register(self):
        with self.assertRaises(NetlistSyntaxError):
            parse_netlist(".model f\n.inputs a b\n.outputs y\n.subckt CSB2 id=0 I0=a I1=b O=y\n.end\n")


class TestJsonGraph(unittest.TestCase):
    def test_dff_feedback_ring_is_legal(self):
        """Test that a DFF breaks a NOT feedback loop"""
        doc = {
            "vertices": [
                {"id": 0, "kind": "DFF", "fanins": [1], "name": "q"},
                {"id": 1, "kind": "NOT", "fanins": [0], "name": "d"},
                {"id": 2, "kind": "PO", "fanins": [0], "name": "q"},
            ],
            "inputs": [],
            "outputs": ["q"],
        }
        g = parse_netlist(json.dumps(doc), "json")
        self.assertEqual(g.ff_ids, [0])

    def test_malformed_json(self):
        with self.assertRaises(NetlistSyntaxError):
            parse_netlist("{not json", "json")

    def test_round_trip_keeps_ids(self):
        g = load_fixture('c17.blif')
        text = serialize_netlist(g, "json")
        self.assertTrue(same_graph(parse_netlist(text, "json"), g))


class TestRoundTrip(unittest.TestCase):
    def test_every_fixture_round_trips(self):
        """Test that parse(serialize(g)) reproduces every fixture exactly"""
        for name in sorted(os.listdir(FIXTURES)):
            with self.subTest(fixture=name):
                g = load_fixture(name)
                text = serialize_netlist(g)
                self.assertTrue(same_graph(parse_netlist(text), g))
                self.assertEqual(serialize_netlist(parse_netlist(text)), text)

    def test_po_named_differently_gets_buffer(self):
        g = Hypergraph("m")
        a = g.add_vertex(Kind.PI, name="a")
        g.add_vertex(Kind.PO, [a], name="y")
        text = serialize_netlist(g)
        self.assertIn(".names a y\n1 1", text)
        parsed = parse_netlist(text)
        self.assertEqual(parsed.po_names(), ['y'])


class TestGoldenRedactedNetlist(unittest.TestCase):
    """A frozen redacted design with one CLUT, one CPI and one CSB."""

    def read(self, name, mode='r'):
        with open(os.path.join(GOLDEN, name), mode) as f:
            return f.read()

    def build(self):
        g = Hypergraph("sticky")
        a = g.add_vertex(Kind.PI, name="a")
        b = g.add_vertex(Kind.PI, name="b")
        c0 = g.add_vertex(Kind.CLUT, [a, b], name="c0", element=0)
        y = g.add_vertex(Kind.CPI, [c0, a], name="y", element=1)
        c1 = g.add_vertex(Kind.CSB, [y], name="c1", element=2)
        q = g.add_vertex(Kind.DFF, [c1], name="q", element=2)
        g.set_fanins(c0, [a, b, q])
        g.set_fanins(c1, [y, q])
        g.add_vertex(Kind.PO, [y], name="y")
        g.add_vertex(Kind.PO, [q], name="q")
        return g

    def test_fabric_cells_serialize_to_golden_text(self):
        """Test that a graph with fabric cells serializes byte-for-byte to the frozen file"""
        golden = self.read('sticky_redacted.blif')
        self.assertEqual(serialize_netlist(self.build()), golden)
        self.assertEqual(serialize_netlist(parse_netlist(golden)), golden)
        self.assertTrue(same_graph(parse_netlist(golden), self.build()))

    def test_golden_bitstream_programs_the_original(self):
        original = parse_netlist(self.read('sticky.blif'))
        redacted = parse_netlist(self.read('sticky_redacted.blif'))
        b = parse_bitstream(self.read('sticky_redacted.bits', 'rb'))
        self.assertEqual(serialize_bitstream(b), self.read('sticky_redacted.bits', 'rb'))
        self.assertEqual([s.element_id for s in fabric_slots(redacted)], [0, 1, 2])
        resolved = program(redacted, b)
        self.assertFalse(resolved.has_fabric)
        self.assertTrue(verify_design(original, resolved, cycles=64).equivalent)


class TestHypergraph(unittest.TestCase):
    def setUp(self):
        self.g = Hypergraph("t")
        self.a = self.g.add_vertex(Kind.PI, name="a")
        self.b = self.g.add_vertex(Kind.PI, name="b")
        self.x = self.g.add_vertex(Kind.AND, [self.a, self.b], name="x")
        self.y = self.g.add_vertex(Kind.NOT, [self.x], name="y")
        self.po = self.g.add_vertex(Kind.PO, [self.y], name="y")

    def test_fanout_index(self):
        self.assertEqual(self.g.fanouts(self.a), [self.x])
        self.assertEqual(self.g.consumers(self.y), [self.po])
        self.assertEqual(self.g.po_consumers(self.y), [self.po])

    def test_port_and_signal_namespaces(self):
        """Test that a PO may share the name of the net it reads"""
        self.assertEqual(self.g.id_of('y'), self.y)
        self.assertEqual(self.g.port_id('y'), self.po)

    def test_remove_vertex_with_readers(self):
        with self.assertRaises(DomainError):
            self.g.remove_vertex(self.x)

    def test_substitute(self):
        """Test that substitute moves readers and the net name onto the new vertex"""
        new = self.g.add_vertex(Kind.NAND, [self.a, self.b], name=self.g.fresh_name())
        self.g.substitute(self.x, new)
        self.assertNotIn(self.x, self.g)
        self.assertEqual(self.g.id_of('x'), new)
        self.assertEqual(self.g.vertices[self.y].fanins, [new])

    def test_compact_renumbers(self):
        self.g.remove_vertex(self.po)
        self.g.remove_vertex(self.y)
        out = self.g.add_vertex(Kind.PO, [self.x], name="x")
        compacted, id_map = self.g.compact()
        self.assertEqual(sorted(compacted.vertices), [0, 1, 2, 3])
        self.assertEqual(id_map[out], 3)
        self.assertTrue(compacted.is_canonical())

    def test_duplicate_name(self):
        with self.assertRaises(MultiplyDrivenNetError):
            self.g.add_vertex(Kind.NOT, [self.a], name="x")


if __name__ == '__main__':
    unittest.main()
