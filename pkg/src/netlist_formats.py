# src/netlist_formats.py
"""
Readers and writers for the two netlist formats.

BLIF subset::

    .model top
    .inputs a b c
    .outputs y
    .names a b t        # up to 6 inputs, rows of {0,1,-} plus one output literal
    11 1
    .gate XOR I0=t I1=c O=y
    .latch t q [type ctrl] [init]
    .subckt CLUT2 id=0 I0=a I1=b O=n4
    .subckt CSB2 id=1 I0=a I1=q O=n5 Q=q
    .subckt CPI2 id=2 I0=n4 I1=b O=y
    .subckt CFG id=0 bit=3 O=n9
    .end

A trailing ``\\`` continues a line and ``#`` starts a comment. Vertex ids are
assigned PIs first, then definitions in file order, then POs.

JSON graph: ``{"vertices": [...], "inputs": [...], "outputs": [...], "model": ...}``
with the per-vertex key order ``id, kind, fanins, name`` followed by the optional
``bits``, ``element`` and ``index``.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from errors import (MultiplyDrivenNetError, NetlistSyntaxError, UndrivenNetError,
                    UnsupportedArityError)
from models import ARITY, LIBRARY_GATES, MAX_TABLE_WIDTH, Kind, Vertex
from netlist import Hypergraph
from validator import NetlistValidator

logger = logging.getLogger(__name__)

FORMATS = ("blif", "json")

LATCH_TYPES = ("fe", "re", "ah", "al", "as")
LATCH_INITS = ("0", "2", "3")

_CELL_RE = re.compile(r"^(CLUT|CSB|CPI)(\d+)$")
_PIN_RE = re.compile(r"^I(\d+)$")


# -------------------------------------------------------------------
# BLIF reader
# -------------------------------------------------------------------

@dataclass
class _Definition:
    """A net-driving statement before ids are known."""
    kind: Kind
    output: str
    inputs: List[str]
    line: int
    bits: Optional[Tuple[int, ...]] = None
    element: Optional[int] = None
    index: Optional[int] = None
    register: Optional[str] = None
    rows: List[Tuple[str, str, int]] = field(default_factory=list)


def _logical_lines(text: str):
    """Yields (line number, text) with comments dropped and continuations joined."""
    pending, start = "", 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not pending:
            start = number
        if line.endswith("\\"):
            pending += line[:-1] + " "
            continue
        line = pending + line
        pending = ""
        if line.strip():
            yield start, line
    if pending.strip():
        yield start, pending


def _column(line: str, token: str) -> int:
    return line.find(token) + 1


def _parse_pins(line: str, number: int, args: List[str]) -> Dict[str, str]:
    pins: Dict[str, str] = {}
    for arg in args:
        if "=" not in arg:
            raise NetlistSyntaxError(f"expected PIN=net, got {arg!r}", number, _column(line, arg))
        pin, net = arg.split("=", 1)
        if not net or pin in pins:
            raise NetlistSyntaxError(f"bad pin assignment {arg!r}", number, _column(line, arg))
        pins[pin] = net
    return pins


def _input_pins(line: str, number: int, pins: Dict[str, str]) -> List[str]:
    ordered = []
    for pin in pins:
        m = _PIN_RE.match(pin)
        if m:
            ordered.append((int(m.group(1)), pins[pin]))
    ordered.sort()
    if [i for i, _ in ordered] != list(range(len(ordered))):
        raise NetlistSyntaxError("input pins must be I0..In-1 without gaps", number, 1)
    return [net for _, net in ordered]


def _table_bits(definition: _Definition) -> Tuple[int, ...]:
    width = len(definition.inputs)
    literals = {out for _, out, _ in definition.rows}
    if len(literals) > 1:
        _, _, number = definition.rows[0]
        raise NetlistSyntaxError(f"table for {definition.output!r} mixes ON-set and OFF-set rows", number, 1)
    on_set = not literals or literals == {"1"}
    bits = [0 if on_set else 1] * (1 << width)
    for pattern, _, _ in definition.rows:
        for k in range(1 << width):
            if all(ch == "-" or int(ch) == (k >> j) & 1 for j, ch in enumerate(pattern)):
                bits[k] = 1 if on_set else 0
    return tuple(bits)


def _parse_blif(text: str) -> Hypergraph:
    model = "top"
    inputs: List[Tuple[str, int]] = []
    outputs: List[Tuple[str, int]] = []
    definitions: List[_Definition] = []
    table: Optional[_Definition] = None
    ended = False

    for number, line in _logical_lines(text):
        tokens = line.split()
        head = tokens[0]
        if ended:
            raise NetlistSyntaxError("statement after .end", number, _column(line, head))
        if not head.startswith("."):
            if table is None:
                raise NetlistSyntaxError("table row outside .names", number, _column(line, head))
            width = len(table.inputs)
            if width == 0:
                if len(tokens) != 1 or tokens[0] not in ("0", "1"):
                    raise NetlistSyntaxError("constant row must be 0 or 1", number, 1)
                table.rows.append(("", tokens[0], number))
                continue
            if len(tokens) != 2:
                raise NetlistSyntaxError("table row needs an input pattern and an output literal",
                                         number, _column(line, head))
            pattern, out = tokens
            if len(pattern) != width or any(ch not in "01-" for ch in pattern):
                raise NetlistSyntaxError(f"bad input pattern {pattern!r}", number, _column(line, pattern))
            if out not in ("0", "1"):
                raise NetlistSyntaxError(f"bad output literal {out!r}", number, _column(line, out))
            table.rows.append((pattern, out, number))
            continue

        table = None
        args = tokens[1:]
        if head == ".model":
            model = args[0] if args else model
        elif head == ".inputs":
            inputs.extend((name, number) for name in args)
        elif head == ".outputs":
            outputs.extend((name, number) for name in args)
        elif head == ".names":
            if not args:
                raise NetlistSyntaxError(".names needs an output net", number, _column(line, head))
            if len(args) - 1 > MAX_TABLE_WIDTH:
                raise UnsupportedArityError(
                    f"table {args[-1]!r} has {len(args) - 1} inputs (line {number}); at most {MAX_TABLE_WIDTH} supported")
            table = _Definition(Kind.TABLE, args[-1], args[:-1], number)
            definitions.append(table)
        elif head == ".latch":
            if len(args) not in (2, 3, 4, 5):
                raise NetlistSyntaxError(".latch expects d q [type ctrl] [init]", number, _column(line, head))
            extra = args[2:]
            if len(extra) in (2, 3) and extra[0] not in LATCH_TYPES:
                raise NetlistSyntaxError(f"unknown latch type {extra[0]!r}", number, _column(line, extra[0]))
            if len(extra) in (1, 3) and extra[-1] not in LATCH_INITS:
                raise NetlistSyntaxError(f"latch init {extra[-1]!r} is not 0, 2 or 3",
                                         number, _column(line, extra[-1]))
            definitions.append(_Definition(Kind.DFF, args[1], [args[0]], number))
        elif head == ".gate":
            if not args:
                raise NetlistSyntaxError(".gate needs a gate kind", number, _column(line, head))
            try:
                kind = Kind(args[0].upper())
            except ValueError:
                kind = None
            if kind not in LIBRARY_GATES:
                raise NetlistSyntaxError(f"unknown gate {args[0]!r}", number, _column(line, args[0]))
            pins = _parse_pins(line, number, args[1:])
            if "O" not in pins:
                raise NetlistSyntaxError("gate has no O pin", number, _column(line, head))
            ins = _input_pins(line, number, pins)
            low, high = ARITY[kind]
            if not low <= len(ins) <= high:
                raise UnsupportedArityError(f"{kind} with {len(ins)} inputs (line {number})")
            definitions.append(_Definition(kind, pins["O"], ins, number))
        elif head == ".subckt":
            definitions.append(_parse_subckt(line, number, args))
        elif head == ".end":
            ended = True
        else:
            raise NetlistSyntaxError(f"unknown command {head!r}", number, _column(line, head))

    return _assemble(model, inputs, outputs, definitions)


def _parse_subckt(line: str, number: int, args: List[str]) -> _Definition:
    if not args:
        raise NetlistSyntaxError(".subckt needs a cell name", number, 1)
    cell = args[0]
    pins = _parse_pins(line, number, args[1:])
    if "O" not in pins or "id" not in pins:
        raise NetlistSyntaxError(f"{cell} needs id= and O=", number, _column(line, cell))
    try:
        element = int(pins["id"])
    except ValueError:
        raise NetlistSyntaxError(f"element id {pins['id']!r} is not an integer",
                                 number, _column(line, "id=")) from None
    if cell == "CFG":
        try:
            index = int(pins.get("bit", ""))
        except ValueError:
            raise NetlistSyntaxError("CFG needs an integer bit=", number, _column(line, cell)) from None
        return _Definition(Kind.CFG, pins["O"], [], number, element=element, index=index)
    m = _CELL_RE.match(cell)
    if not m:
        raise NetlistSyntaxError(f"unknown cell {cell!r}", number, _column(line, cell))
    kind, width = Kind(m.group(1)), int(m.group(2))
    ins = _input_pins(line, number, pins)
    if len(ins) != width:
        raise NetlistSyntaxError(f"{cell} wired with {len(ins)} inputs", number, _column(line, cell))
    low, high = ARITY[kind]
    if not low <= width <= high:
        raise UnsupportedArityError(f"{cell} outside widths {low}..{high} (line {number})")
    register = pins.get("Q")
    if kind == Kind.CSB and register is None:
        raise NetlistSyntaxError(f"{cell} needs a Q= register net", number, _column(line, cell))
    if kind != Kind.CSB and register is not None:
        raise NetlistSyntaxError(f"{cell} has no Q pin", number, _column(line, "Q="))
    return _Definition(kind, pins["O"], ins, number, element=element, register=register)


def _assemble(model: str, inputs: List[Tuple[str, int]], outputs: List[Tuple[str, int]],
              definitions: List[_Definition]) -> Hypergraph:
    net_ids: Dict[str, int] = {}
    net_lines: Dict[str, int] = {}
    records: List[Vertex] = []

    def claim(name: str, line: int) -> int:
        if name in net_ids:
            raise MultiplyDrivenNetError(
                f"net {name!r} driven on line {net_lines[name]} and again on line {line}")
        vid = len(records)
        net_ids[name] = vid
        net_lines[name] = line
        return vid

    for name, line in inputs:
        records.append(Vertex(claim(name, line), Kind.PI, [], name))

    pending: List[Tuple[Vertex, List[str], int]] = []
    for d in definitions:
        if d.kind == Kind.TABLE and not d.inputs:
            literal = {out for _, out, _ in d.rows}
            kind, bits = (Kind.CONST1, None) if literal == {"1"} else (Kind.CONST0, None)
        elif d.kind == Kind.TABLE:
            kind, bits = Kind.TABLE, _table_bits(d)
        else:
            kind, bits = d.kind, None
        core = Vertex(claim(d.output, d.line), kind, [], d.output, bits, d.element, d.index)
        records.append(core)
        pending.append((core, d.inputs, d.line))
        if d.register is not None:
            reg = Vertex(claim(d.register, d.line), Kind.DFF, [core.id], d.register, element=d.element)
            records.append(reg)

    for vertex, nets, line in pending:
        for net in nets:
            if net not in net_ids:
                raise UndrivenNetError(f"net {net!r} read on line {line} has no driver")
            vertex.fanins.append(net_ids[net])

    ports = set()
    for name, line in outputs:
        if name in ports:
            raise MultiplyDrivenNetError(f"output {name!r} declared twice (line {line})")
        ports.add(name)
        if name not in net_ids:
            raise UndrivenNetError(f"output {name!r} has no driver")
        records.append(Vertex(len(records), Kind.PO, [net_ids[name]], name))

    return Hypergraph.build(model, records)


# -------------------------------------------------------------------
# BLIF writer
# -------------------------------------------------------------------

def _table_rows(bits: Tuple[int, ...], width: int) -> List[str]:
    return ["".join(str((k >> j) & 1) for j in range(width)) + " 1"
            for k, b in enumerate(bits) if b]


def _serialize_blif(g: Hypergraph) -> str:
    out = [f".model {g.name}",
           ".inputs " + " ".join(g.pi_names()) if g.pi_ids else ".inputs",
           ".outputs " + " ".join(g.po_names()) if g.po_ids else ".outputs"]
    emitted = set()
    for vid in g:
        v = g.vertices[vid]
        if v.kind in (Kind.PI, Kind.PO) or vid in emitted:
            continue
        names = [g.vertices[f].name for f in v.fanins]
        pins = " ".join(f"I{j}={n}" for j, n in enumerate(names))
        if v.kind == Kind.CONST0:
            out.append(f".names {v.name}")
        elif v.kind == Kind.CONST1:
            out.extend([f".names {v.name}", "1"])
        elif v.kind == Kind.TABLE:
            out.append(".names " + " ".join(names + [v.name]))
            out.extend(_table_rows(v.bits, len(names)))
        elif v.kind in LIBRARY_GATES:
            out.append(f".gate {v.kind} {pins} O={v.name}")
        elif v.kind == Kind.DFF and v.element is not None and g.kind(v.fanins[0]) == Kind.CSB:
            continue
        elif v.kind == Kind.DFF:
            out.append(f".latch {names[0]} {v.name} 0")
        elif v.kind == Kind.CFG:
            out.append(f".subckt CFG id={v.element} bit={v.index} O={v.name}")
        elif v.kind == Kind.CSB:
            register = g.csb_registers(vid)[0]
            emitted.add(register)
            out.append(f".subckt CSB{v.width} id={v.element} {pins} O={v.name} "
                       f"Q={g.vertices[register].name}")
        else:
            out.append(f".subckt {v.kind}{v.width} id={v.element} {pins} O={v.name}")
    for po in g.po_ids:
        v = g.vertices[po]
        driver = g.vertices[v.fanins[0]].name
        if driver != v.name:
            out.extend([f".names {driver} {v.name}", "1 1"])
    out.append(".end")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------------
# JSON graph
# -------------------------------------------------------------------

def _vertex_record(v: Vertex) -> dict:
    record = {"id": v.id, "kind": v.kind.value, "fanins": list(v.fanins), "name": v.name}
    if v.bits is not None:
        record["bits"] = "".join(str(b) for b in v.bits)
    if v.element is not None:
        record["element"] = v.element
    if v.index is not None:
        record["index"] = v.index
    return record


def _serialize_json(g: Hypergraph) -> str:
    doc = {
        "vertices": [_vertex_record(g.vertices[vid]) for vid in g],
        "inputs": g.pi_names(),
        "outputs": g.po_names(),
        "model": g.name,
    }
    return json.dumps(doc, indent=2) + "\n"


def _parse_json(text: str) -> Hypergraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetlistSyntaxError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("vertices"), list):
        raise NetlistSyntaxError("JSON graph must be an object with a 'vertices' list", 1, 1)
    by_name_pi: Dict[str, Vertex] = {}
    by_name_po: Dict[str, Vertex] = {}
    others: List[Vertex] = []
    for position, record in enumerate(doc["vertices"]):
        try:
            kind = Kind(record["kind"])
            bits = record.get("bits")
            vertex = Vertex(int(record["id"]), kind, [int(f) for f in record.get("fanins", [])],
                            str(record["name"]),
                            tuple(int(ch) for ch in bits) if bits is not None else None,
                            record.get("element"), record.get("index"))
        except (KeyError, TypeError, ValueError) as e:
            raise NetlistSyntaxError(f"vertex record #{position}: {e}", 1, 1) from None
        low, high = ARITY[kind]
        if not low <= len(vertex.fanins) <= high:
            raise UnsupportedArityError(f"{kind} {vertex.name!r} has {len(vertex.fanins)} fanins")
        if kind == Kind.PI:
            by_name_pi[vertex.name] = vertex
        elif kind == Kind.PO:
            by_name_po[vertex.name] = vertex
        else:
            others.append(vertex)
    ordered_pis = [by_name_pi[n] for n in doc.get("inputs", []) if n in by_name_pi]
    ordered_pos = [by_name_po[n] for n in doc.get("outputs", []) if n in by_name_po]
    if len(ordered_pis) != len(by_name_pi) or len(ordered_pos) != len(by_name_po):
        raise NetlistSyntaxError("'inputs'/'outputs' do not list every port vertex", 1, 1)
    return Hypergraph.build(str(doc.get("model", "top")), ordered_pis + others + ordered_pos)


# -------------------------------------------------------------------
# Entry points
# -------------------------------------------------------------------

def parse_netlist(text: str, fmt: str = "blif") -> Hypergraph:
    """
    Parses and validates a netlist.

    Raises:
        NetlistError subclasses for syntax, arity, driver and cycle problems.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown netlist format {fmt!r}")
    g = _parse_blif(text) if fmt == "blif" else _parse_json(text)
    NetlistValidator().check(g)
    logger.debug("parsed netlist model=%s format=%s vertices=%d", g.name, fmt, len(g))
    return g


def serialize_netlist(g: Hypergraph, fmt: str = "blif") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown netlist format {fmt!r}")
    return _serialize_blif(g) if fmt == "blif" else _serialize_json(g)
