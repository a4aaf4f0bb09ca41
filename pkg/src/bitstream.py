# src/bitstream.py
"""
Functional bitstream: per-element configuration segments in chain order.

Two file formats:

text (``.bits``)::

    # bitstream v1 segments=<N> bits=<T>
    <element id> <CLUT|CSB|CPI> <width> <bits, LSB first>

packed (``.bitsbin``), little-endian: magic ``RDBS``, u8 version, u32 segment
count, then per segment u32 id, u8 kind code, u16 width and the bits packed
LSB-first into whole bytes.
"""
import logging
import struct
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from errors import BitstreamError, BitstreamFormatError, FabricError, SegmentMismatchError
from fabric import BitSegment, ElementKind, check_width, restrict, segment_length, strip_independent_inputs
from logic import select_index
from models import MAX_TABLE_WIDTH, Kind
from netlist import Hypergraph
from rng import Rng
from validator import NetlistValidator

logger = logging.getLogger(__name__)

TEXT_HEADER = "# bitstream v1"
MAGIC = b"RDBS"
VERSION = 1
FORMATS = ("text", "packed")

_HEADER = struct.Struct("<4sBI")
_SEGMENT = struct.Struct("<IBH")


@dataclass
class Bitstream:
    segments: List[BitSegment] = field(default_factory=list)

    def __post_init__(self):
        ids = [s.element_id for s in self.segments]
        if ids != sorted(set(ids)):
            raise BitstreamError("segments must have distinct ids in ascending order")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def total_bits(self) -> int:
        return sum(len(s.bits) for s in self.segments)

    def segment(self, element_id: int) -> BitSegment:
        for s in self.segments:
            if s.element_id == element_id:
                return s
        raise SegmentMismatchError(f"no segment for element #{element_id}")

    def config(self) -> Dict[int, Tuple[int, ...]]:
        """Element id -> bits, the form the simulator reads."""
        return {s.element_id: s.bits for s in self.segments}

    def flip(self, element_id: int, index: int) -> "Bitstream":
        """Copy with one configuration bit inverted."""
        segments = []
        for s in self.segments:
            if s.element_id == element_id:
                bits = list(s.bits)
                bits[index] ^= 1
                s = BitSegment(s.element_id, s.element_kind, s.width, tuple(bits))
            segments.append(s)
        return Bitstream(segments)


def generate_bitstream(design) -> Bitstream:
    """Collects every element segment of a RedactedDesign in creation-id order."""
    segments = []
    for element in design.elements():
        try:
            segments.append(element.segment())
        except FabricError as e:
            raise BitstreamError(str(e)) from None
    b = Bitstream(segments)
    logger.info("bitstream segments=%d bits=%d", len(b), b.total_bits)
    return b


# -------------------------------------------------------------------
# Fabric discovered from a netlist
# -------------------------------------------------------------------

@dataclass(frozen=True)
class FabricSlot:
    element_id: int
    kind: ElementKind
    width: int
    vertex: int


def fabric_slots(g: Hypergraph) -> List[FabricSlot]:
    """Fabric cores of ``g`` in element-id order."""
    slots = [FabricSlot(g.vertices[v].element, ElementKind(g.vertices[v].kind.value),
                        len(g.vertices[v].fanins), v)
             for v in g.fabric_ids]
    return sorted(slots, key=lambda s: s.element_id)


def random_fill_bitstream(g: Hypergraph, rng: Rng) -> Bitstream:
    """
    A uniformly random configuration for every fabric core of ``g``.

    Each element draws from its own substream, so two netlists with the same
    element ids and widths receive the same fill.
    """
    segments = []
    for slot in fabric_slots(g):
        stream = rng.split(f"element:{slot.element_id}")
        if slot.kind == ElementKind.CPI:
            index = stream.range(slot.width)
            bits = tuple((index >> i) & 1 for i in range(segment_length(slot.kind, slot.width)))
        else:
            length = segment_length(slot.kind, slot.width)
            word = stream.word(length)
            bits = tuple((word >> i) & 1 for i in range(length))
        segments.append(BitSegment(slot.element_id, slot.kind, slot.width, bits))
    return Bitstream(segments)


# -------------------------------------------------------------------
# Serialization
# -------------------------------------------------------------------

def _bits_text(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def serialize_bitstream(b: Bitstream, fmt: str = "text") -> bytes:
    if fmt == "text":
        lines = [f"{TEXT_HEADER} segments={len(b)} bits={b.total_bits}"]
        lines.extend(f"{s.element_id} {s.element_kind} {s.width} {_bits_text(s.bits)}" for s in b.segments)
        return ("\n".join(lines) + "\n").encode("ascii")
    if fmt == "packed":
        out = bytearray(_HEADER.pack(MAGIC, VERSION, len(b)))
        for s in b.segments:
            out += _SEGMENT.pack(s.element_id, s.element_kind.code, s.width)
            packed = bytearray((len(s.bits) + 7) // 8)
            for i, bit in enumerate(s.bits):
                if bit:
                    packed[i // 8] |= 1 << (i % 8)
            out += packed
        return bytes(out)
    raise ValueError(f"unknown bitstream format {fmt!r}")


def _parse_packed(data: bytes) -> Bitstream:
    if len(data) < _HEADER.size:
        raise BitstreamFormatError("truncated header")
    magic, version, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BitstreamFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise BitstreamFormatError(f"unsupported version {version}")
    offset = _HEADER.size
    segments = []
    for n in range(count):
        if offset + _SEGMENT.size > len(data):
            raise BitstreamFormatError(f"segment {n}: truncated record")
        element_id, code, width = _SEGMENT.unpack_from(data, offset)
        offset += _SEGMENT.size
        try:
            kind = ElementKind.from_code(code)
            check_width(kind, width)
        except (ValueError, FabricError) as e:
            raise BitstreamFormatError(f"segment {n}: {e}") from None
        length = segment_length(kind, width)
        size = (length + 7) // 8
        if offset + size > len(data):
            raise BitstreamFormatError(f"segment {n}: truncated bits")
        chunk = data[offset:offset + size]
        offset += size
        bits = tuple((chunk[i // 8] >> (i % 8)) & 1 for i in range(length))
        segments.append(_segment(n, element_id, kind, width, bits))
    if offset != len(data):
        raise BitstreamFormatError(f"{len(data) - offset} trailing bytes")
    return _bitstream(segments)


def _parse_text(data: bytes) -> Bitstream:
    try:
        lines = data.decode("ascii").splitlines()
    except UnicodeDecodeError:
        raise BitstreamFormatError("text bitstream is not ASCII") from None
    if not lines or not lines[0].startswith(TEXT_HEADER):
        raise BitstreamFormatError("missing bitstream header")
    header = dict(item.split("=", 1) for item in lines[0][len(TEXT_HEADER):].split() if "=" in item)
    segments = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise BitstreamFormatError(f"line {number}: expected 'id kind width bits'")
        try:
            element_id, kind, width = int(parts[0]), ElementKind(parts[1]), int(parts[2])
        except ValueError as e:
            raise BitstreamFormatError(f"line {number}: {e}") from None
        if set(parts[3]) - {"0", "1"}:
            raise BitstreamFormatError(f"line {number}: bits must be 0/1")
        segments.append(_segment(number, element_id, kind, width, tuple(int(c) for c in parts[3])))
    b = _bitstream(segments)
    try:
        declared = (int(header["segments"]), int(header["bits"]))
    except (KeyError, ValueError):
        raise BitstreamFormatError("header must declare segments= and bits=") from None
    if declared != (len(b), b.total_bits):
        raise BitstreamFormatError(f"header declares {declared[0]} segments / {declared[1]} bits, "
                                   f"found {len(b)} / {b.total_bits}")
    return b


def _segment(where: int, element_id: int, kind: ElementKind, width: int, bits: Tuple[int, ...]) -> BitSegment:
    try:
        return BitSegment(element_id, kind, width, bits)
    except FabricError as e:
        raise BitstreamFormatError(f"segment {where}: {e}") from None


def _bitstream(segments: List[BitSegment]) -> Bitstream:
    try:
        return Bitstream(segments)
    except BitstreamError as e:
        raise BitstreamFormatError(str(e)) from None


def parse_bitstream(data: bytes) -> Bitstream:
    """Reads either format; packed files are recognized by their magic."""
    if data[:len(MAGIC)] == MAGIC:
        return _parse_packed(data)
    return _parse_text(data)


# -------------------------------------------------------------------
# Programming
# -------------------------------------------------------------------

def _realize(g: Hypergraph, table: Sequence[int], sources: Sequence[int]) -> int:
    """
    New vertex computing ``table`` over ``sources``: a constant, a TABLE, or
    (beyond six live inputs) a MUX2 over the last input's cofactors.
    """
    table, kept = strip_independent_inputs(table)
    sources = [sources[j] for j in kept]
    if not sources:
        return g.add_vertex(Kind.CONST1 if table[0] else Kind.CONST0, name=g.fresh_name("k"))
    if len(sources) <= MAX_TABLE_WIDTH:
        return g.add_vertex(Kind.TABLE, sources, name=g.fresh_name("t"), bits=table)
    last = len(sources) - 1
    lo = _realize(g, restrict(table, last, 0), sources[:last])
    hi = _realize(g, restrict(table, last, 1), sources[:last])
    return g.add_vertex(Kind.MUX2, [sources[last], lo, hi], name=g.fresh_name("m"))


def _sweep(g: Hypergraph) -> int:
    """Removes logic that reaches no PO, directly or through live flip-flops."""
    live = set(g.po_ids)
    stack = list(g.po_ids)
    while stack:
        for src in g.vertices[stack.pop()].fanins:
            if src not in live:
                live.add(src)
                stack.append(src)
    dead = [v for v in g.vertices if v not in live and g.vertices[v].kind != Kind.PI]
    for v in dead:
        g.set_fanins(v, [])
    for v in dead:
        g.remove_vertex(v)
    return len(dead)


def _check_slots(g: Hypergraph, b: Bitstream) -> None:
    slots = {s.element_id: s for s in fabric_slots(g)}
    cfg = {g.vertices[v].element for v in g.vertices if g.vertices[v].kind == Kind.CFG}
    expected = set(slots) | cfg
    given = {s.element_id for s in b.segments}
    if given != expected:
        missing = sorted(expected - given)
        extra = sorted(given - expected)
        raise SegmentMismatchError(f"segments do not match the fabric (missing {missing}, unexpected {extra})")
    for eid, slot in slots.items():
        s = b.segment(eid)
        if (s.element_kind, s.width) != (slot.kind, slot.width):
            raise SegmentMismatchError(f"element #{eid} is {slot.kind}{slot.width}, "
                                       f"segment says {s.element_kind}{s.width}")


def program(g: Hypergraph, b: Bitstream) -> Hypergraph:
    """
    Resolves every fabric element of ``g`` to fixed logic under ``b``.

    CLUT/CSB cores become tables over the inputs their function depends on,
    CPIs become buffers of the selected input, config registers become
    constants. Logic left without a path to an output is swept.

    Raises:
        SegmentMismatchError: segment ids, kinds or widths differ from the fabric.
        BitstreamError: a CPI selects a missing input.
    """
    _check_slots(g, b)
    work = g.copy()
    for slot in fabric_slots(work):
        seg = b.segment(slot.element_id)
        v = work.vertices[slot.vertex]
        if slot.kind == ElementKind.CPI:
            index = select_index(seg.bits)
            if index >= slot.width:
                raise BitstreamError(f"CPI #{slot.element_id} selects input {index} of {slot.width}")
            new = work.add_vertex(Kind.BUF, [v.fanins[index]], name=work.fresh_name("b"))
        else:
            new = _realize(work, seg.bits, list(v.fanins))
        for reg in (work.csb_registers(slot.vertex) if slot.kind == ElementKind.CSB else []):
            work.vertices[reg].element = None
        work.substitute(slot.vertex, new)
    for vid in [v for v in work.vertices if work.vertices[v].kind == Kind.CFG]:
        cfg = work.vertices[vid]
        bits = b.segment(cfg.element).bits
        if not 0 <= cfg.index < len(bits):
            raise SegmentMismatchError(f"config register {cfg.name!r} reads bit {cfg.index} of {len(bits)}")
        bit = bits[cfg.index]
        new = work.add_vertex(Kind.CONST1 if bit else Kind.CONST0, name=work.fresh_name("k"))
        work.substitute(vid, new)
    swept = _sweep(work)
    resolved, _ = work.compact()
    NetlistValidator().check(resolved)
    logger.info("programmed elements=%d swept=%d", len(b), swept)
    return resolved
