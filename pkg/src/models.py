# src/models.py
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

# -------------------------------------------------------------------
# 1. Kind (vertex kinds of the circuit IR)
# -------------------------------------------------------------------

MAX_TABLE_WIDTH = 6
MAX_ELEMENT_WIDTH = 8


class Kind(str, Enum):
    PI = "PI"
    PO = "PO"
    CONST0 = "CONST0"
    CONST1 = "CONST1"
    BUF = "BUF"
    NOT = "NOT"
    AND = "AND"
    OR = "OR"
    NAND = "NAND"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    MUX2 = "MUX2"
    TABLE = "TABLE"
    DFF = "DFF"
    # configurable fabric
    CLUT = "CLUT"
    CSB = "CSB"
    CPI = "CPI"
    CFG = "CFG"

    def __str__(self) -> str:
        return self.value


LIBRARY_GATES = (
    Kind.CONST0, Kind.CONST1, Kind.BUF, Kind.NOT, Kind.AND, Kind.OR,
    Kind.NAND, Kind.NOR, Kind.XOR, Kind.XNOR, Kind.MUX2,
)
GATE_KINDS = LIBRARY_GATES + (Kind.TABLE,)
FABRIC_KINDS = (Kind.CLUT, Kind.CSB, Kind.CPI)

# (min, max) fanin count; None means "width decides"
ARITY = {
    Kind.PI: (0, 0),
    Kind.PO: (1, 1),
    Kind.CONST0: (0, 0),
    Kind.CONST1: (0, 0),
    Kind.BUF: (1, 1),
    Kind.NOT: (1, 1),
    Kind.AND: (2, 4),
    Kind.OR: (2, 4),
    Kind.NAND: (2, 4),
    Kind.NOR: (2, 4),
    Kind.XOR: (2, 2),
    Kind.XNOR: (2, 2),
    Kind.MUX2: (3, 3),
    Kind.TABLE: (0, MAX_TABLE_WIDTH),
    Kind.DFF: (1, 1),
    Kind.CLUT: (1, MAX_ELEMENT_WIDTH),
    Kind.CSB: (1, MAX_ELEMENT_WIDTH),
    Kind.CPI: (2, MAX_ELEMENT_WIDTH),
    Kind.CFG: (0, 0),
}


def is_combinational(kind: Kind) -> bool:
    """Vertices evaluated inside one clock cycle (gates and fabric cores)."""
    return kind in GATE_KINDS or kind in FABRIC_KINDS


def is_source(kind: Kind) -> bool:
    """Cone leaves: values that are not recomputed combinationally."""
    return kind in (Kind.PI, Kind.DFF, Kind.CFG)


# -------------------------------------------------------------------
# 2. Vertex
# -------------------------------------------------------------------

@dataclass
class Vertex:
    """
    One node of the hypergraph. Its output net carries ``name``.

    ``bits`` is the LSB-first truth table of a TABLE vertex. ``element`` links
    fabric cores, CSB registers and config registers to their fabric element;
    ``index`` is the bit position of a config register inside its segment.
    """
    id: int
    kind: Kind
    fanins: List[int] = field(default_factory=list)
    name: str = ""
    bits: Optional[Tuple[int, ...]] = None
    element: Optional[int] = None
    index: Optional[int] = None

    @property
    def width(self) -> int:
        return len(self.fanins)


# -------------------------------------------------------------------
# 3. CutPoint
# -------------------------------------------------------------------

class CutKind(str, Enum):
    PO = "PO"
    PSEUDO_PO = "pseudo-PO"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CutPoint:
    """A PO, or the data input of a flip-flop (``vertex_id`` is the DFF itself)."""
    vertex_id: int
    kind: CutKind
    driver_id: int
    name: str

    @property
    def key(self) -> Tuple[str, str]:
        return (self.kind.value, self.name)
