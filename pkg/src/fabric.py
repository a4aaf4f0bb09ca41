# src/fabric.py
"""Configurable fabric elements and the truth-table kernels behind them.

Truth tables are LSB-first tuples: bit ``k`` is the output when input ``j``
carries bit ``j`` of ``k``.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from errors import FabricError
from logic import gate_word, int_to_bits, select_index, select_width, table_word
from models import ARITY, GATE_KINDS, MAX_ELEMENT_WIDTH, MAX_TABLE_WIDTH, Kind
from netlist import Hypergraph

Bits = Tuple[int, ...]


class Role(str, Enum):
    FUNCTIONAL = "functional"
    DUMMY = "dummy"

    def __str__(self) -> str:
        return self.value


class ElementKind(str, Enum):
    CLUT = "CLUT"
    CSB = "CSB"
    CPI = "CPI"

    def __str__(self) -> str:
        return self.value

    @property
    def code(self) -> int:
        return _KIND_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "ElementKind":
        for kind, value in _KIND_CODES.items():
            if value == code:
                return kind
        raise ValueError(f"unknown element kind code {code}")


_KIND_CODES = {ElementKind.CLUT: 0, ElementKind.CSB: 1, ElementKind.CPI: 2}


def check_width(kind: ElementKind, width: int) -> None:
    lo, hi = ARITY[Kind(kind.value)]
    if not lo <= width <= hi:
        raise FabricError(f"{kind.value} width {width} outside [{lo}, {hi}]")


def segment_length(kind: ElementKind, width: int) -> int:
    if kind == ElementKind.CPI:
        return select_width(width)
    return 1 << width


@dataclass(frozen=True)
class BitSegment:
    element_id: int
    element_kind: ElementKind
    width: int
    bits: Bits

    def __post_init__(self):
        check_width(self.element_kind, self.width)
        expected = segment_length(self.element_kind, self.width)
        if len(self.bits) != expected:
            raise FabricError(f"{self.element_kind}{self.width} #{self.element_id} needs "
                              f"{expected} bits, got {len(self.bits)}")


@dataclass
class InputBinding:
    source: int
    role: Role = Role.FUNCTIONAL

    @property
    def is_dummy(self) -> bool:
        return self.role == Role.DUMMY


@dataclass
class Clut:
    id: int
    inputs: List[InputBinding]
    bits: Optional[Bits]
    vertex: int = -1
    output_inverted_absorbed: bool = False
    added_dummies: int = 0
    base_width: int = 0

    kind = ElementKind.CLUT

    @property
    def width(self) -> int:
        return len(self.inputs)

    @property
    def functional_width(self) -> int:
        return sum(1 for b in self.inputs if not b.is_dummy)

    @property
    def sources(self) -> List[int]:
        return [b.source for b in self.inputs]

    def segment(self) -> BitSegment:
        if self.bits is None:
            raise FabricError(f"CLUT #{self.id} is not programmed")
        return BitSegment(self.id, self.kind, self.width, tuple(self.bits))


@dataclass
class Csb:
    """A CLUT followed by a data flip-flop; both outputs may be wired out."""
    clut: Clut
    reg_vertex: int
    reg_output_role: Role = Role.FUNCTIONAL
    comb_output_exposed: bool = False
    converted: bool = False

    kind = ElementKind.CSB

    @property
    def id(self) -> int:
        return self.clut.id

    @property
    def width(self) -> int:
        return self.clut.width

    @property
    def vertex(self) -> int:
        return self.clut.vertex

    @property
    def functional_output(self) -> int:
        """The vertex whose net carries original logic (register or combinational core)."""
        return self.reg_vertex if self.reg_output_role == Role.FUNCTIONAL else self.clut.vertex

    def segment(self) -> BitSegment:
        if self.clut.bits is None:
            raise FabricError(f"CSB #{self.id} is not programmed")
        return BitSegment(self.id, self.kind, self.width, tuple(self.clut.bits))


@dataclass
class Cpi:
    id: int
    inputs: List[InputBinding]
    select_bits: Optional[Bits]
    vertex: int = -1

    kind = ElementKind.CPI

    @property
    def width(self) -> int:
        return len(self.inputs)

    @property
    def functional_position(self) -> int:
        positions = [i for i, b in enumerate(self.inputs) if not b.is_dummy]
        if len(positions) != 1:
            raise FabricError(f"CPI #{self.id} has {len(positions)} functional inputs")
        return positions[0]

    def segment(self) -> BitSegment:
        if self.select_bits is None:
            raise FabricError(f"CPI #{self.id} is not programmed")
        return BitSegment(self.id, self.kind, self.width, tuple(self.select_bits))


Element = Union[Clut, Csb, Cpi]


# -------------------------------------------------------------------
# Truth-table kernels
# -------------------------------------------------------------------

def table_width(bits: Sequence[int]) -> int:
    width = len(bits).bit_length() - 1
    if len(bits) == 0 or 1 << width != len(bits):
        raise FabricError(f"truth table length {len(bits)} is not a power of two")
    return width


def input_pattern(position: int, width: int) -> int:
    """Word whose bit k is bit ``position`` of k, over all 2^width minterms."""
    word = 0
    for k in range(1 << width):
        if (k >> position) & 1:
            word |= 1 << k
    return word


def encode_truth_table(g: Hypergraph, cone: Iterable[int], root: int,
                       input_order: Sequence[int]) -> Bits:
    """
    Exhaustively evaluates a combinational cone.

    Args:
        cone: vertices computed inside the cone (root included).
        input_order: leaf vertices; leaf j drives bit j of the minterm index.

    Returns:
        The LSB-first truth table of ``root``.
    """
    width = len(input_order)
    if width > MAX_TABLE_WIDTH:
        raise FabricError(f"cone support {width} exceeds {MAX_TABLE_WIDTH}")
    members = set(cone)
    if root not in members:
        raise FabricError("cone root must be a cone member")
    mask = (1 << (1 << width)) - 1
    values: Dict[int, int] = {leaf: input_pattern(j, width) for j, leaf in enumerate(input_order)}

    def evaluate(vid: int) -> int:
        if vid in values:
            return values[vid]
        if vid not in members:
            raise FabricError(f"vertex {g.vertices[vid].name!r} is neither a cone member nor a leaf")
        v = g.vertices[vid]
        if v.kind not in GATE_KINDS:
            raise FabricError(f"{v.kind} vertex {v.name!r} cannot be absorbed into a table")
        ins = [evaluate(src) for src in v.fanins]
        if v.kind == Kind.TABLE:
            word = table_word(v.bits, ins, mask)
        else:
            word = gate_word(v.kind, ins, mask)
        values[vid] = word
        return word

    return int_to_bits(evaluate(root), 1 << width)


def clut_eval(bits: Sequence[int], input_values: Sequence[int]) -> int:
    if len(bits) != 1 << len(input_values):
        raise FabricError(f"{len(bits)} table bits for {len(input_values)} inputs")
    return bits[sum((v & 1) << j for j, v in enumerate(input_values))]


def cpi_eval(select_bits: Sequence[int], input_values: Sequence[int]) -> int:
    if len(select_bits) != select_width(len(input_values)):
        raise FabricError(f"{len(select_bits)} select bits for {len(input_values)} inputs")
    index = select_index(select_bits)
    if index >= len(input_values):
        raise FabricError(f"select index {index} out of range")
    return input_values[index]


def extend_with_dummy(bits: Sequence[int], insert_position: int) -> Bits:
    """Inserts an input the function ignores; the table doubles in size."""
    width = table_width(bits)
    if not 0 <= insert_position <= width:
        raise FabricError(f"insert position {insert_position} outside [0, {width}]")
    if width + 1 > MAX_ELEMENT_WIDTH:
        raise FabricError(f"width {width + 1} exceeds {MAX_ELEMENT_WIDTH}")
    low_mask = (1 << insert_position) - 1
    return tuple(bits[(k & low_mask) | ((k >> (insert_position + 1)) << insert_position)]
                 for k in range(1 << (width + 1)))


def check_permutation(perm: Sequence[int], width: int) -> None:
    if sorted(perm) != list(range(width)):
        raise FabricError(f"{list(perm)} is not a permutation of {width} positions")


def permute_inputs(bits: Sequence[int], perm: Sequence[int]) -> Bits:
    """
    Rewrites the table for rewired inputs.

    ``perm[i]`` is the new position of old input ``i``; pair with
    ``apply_permutation`` on the binding list.
    """
    width = table_width(bits)
    check_permutation(perm, width)
    out = []
    for new_k in range(1 << width):
        old_k = 0
        for old_pos, new_pos in enumerate(perm):
            old_k |= ((new_k >> new_pos) & 1) << old_pos
        out.append(bits[old_k])
    return tuple(out)


def apply_permutation(items: Sequence, perm: Sequence[int]) -> list:
    out = [None] * len(items)
    for old_pos, new_pos in enumerate(perm):
        out[new_pos] = items[old_pos]
    return out


def invert_output(bits: Sequence[int]) -> Bits:
    return tuple(1 - b for b in bits)


def complement_input(bits: Sequence[int], position: int) -> Bits:
    """Table of f with input ``position`` negated."""
    width = table_width(bits)
    if not 0 <= position < width:
        raise FabricError(f"input {position} outside [0, {width})")
    flip = 1 << position
    return tuple(bits[k ^ flip] for k in range(1 << width))


def restrict(bits: Sequence[int], position: int, value: int) -> Bits:
    """Cofactor with input ``position`` tied to ``value``; one input narrower."""
    width = table_width(bits)
    if not 0 <= position < width:
        raise FabricError(f"input {position} outside [0, {width})")
    low_mask = (1 << position) - 1
    out = []
    for k in range(1 << (width - 1)):
        full = (k & low_mask) | ((value & 1) << position) | ((k >> position) << (position + 1))
        out.append(bits[full])
    return tuple(out)


def depends_on(bits: Sequence[int], position: int) -> bool:
    return restrict(bits, position, 0) != restrict(bits, position, 1)


def strip_independent_inputs(bits: Sequence[int]) -> Tuple[Bits, List[int]]:
    """
    Drops every input the function ignores.

    Returns:
        (reduced table, original positions of the kept inputs)
    """
    table = tuple(bits)
    kept = list(range(table_width(table)))
    position = 0
    while position < len(kept):
        if depends_on(table, position):
            position += 1
        else:
            table = restrict(table, position, 0)
            del kept[position]
    return table, kept


def canonical_key(bits: Sequence[int]) -> str:
    """Hex key of the dependent-input function, prefixed by its support size."""
    table, kept = strip_independent_inputs(bits)
    value = sum(b << i for i, b in enumerate(table))
    return f"{len(kept)}:{value:0{max(1, len(table) // 4)}x}"
