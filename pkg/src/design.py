# src/design.py
"""The redacted design under construction: working graph, fabric elements, counters."""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from cones import identify_cut_points
from fabric import Clut, Cpi, Csb, Element, InputBinding, Role
from models import Kind
from netlist import Hypergraph
from rng import Rng

logger = logging.getLogger(__name__)

Position = Tuple[int, ...]


class TopoIndex:
    """
    Positions consistent with every combinational edge of the working graph.

    Original vertices keep their topological rank ``(i,)``. A vertex inserted
    after ``u`` gets ``pos(u) + (-c,)`` with a growing counter ``c``, which sorts
    it after ``u``, before every earlier insertion after ``u``, and before ``u``'s
    successors.
    """

    def __init__(self, order: Sequence[int]):
        self._pos: Dict[int, Position] = {v: (i,) for i, v in enumerate(order)}
        self._counter = 0

    def __getitem__(self, vid: int) -> Position:
        return self._pos[vid]

    def __contains__(self, vid: int) -> bool:
        return vid in self._pos

    def assign(self, vid: int, position: Position) -> None:
        self._pos[vid] = position

    def after(self, vid: int) -> Position:
        self._counter += 1
        return self._pos[vid] + (-self._counter,)

    def before_all(self) -> Position:
        """A slot ahead of every original vertex (readers of flip-flops only)."""
        self._counter += 1
        return (-1, -self._counter)

    def discard(self, vid: int) -> None:
        self._pos.pop(vid, None)


CONST_POSITION: Position = (-2,)


@dataclass(frozen=True)
class Decomposition:
    """One covered cone: its support size and the width of the element covering it."""
    element_id: int
    root: int
    members: FrozenSet[int]
    support: int
    width: int


class RedactedDesign:
    def __init__(self, original: Hypergraph, order: Sequence[int]):
        self.original = original
        self.graph = original.copy()
        self.pos = TopoIndex(order)
        self.cluts: List[Clut] = []
        self.csbs: List[Csb] = []
        self.cpis: List[Cpi] = []
        self.absorbed: Dict[int, int] = {}
        self.decompositions: List[Decomposition] = []
        self.n_o = len(original.po_ids) + len(original.ff_ids)
        self.n_a = 0
        self.n_b = 0
        self.cpi_candidates = 0
        self._next_element_id = 0
        self._const0: Optional[int] = None

    # --- element bookkeeping ---
    def new_element_id(self) -> int:
        eid = self._next_element_id
        self._next_element_id += 1
        return eid

    def elements(self) -> List[Element]:
        """Every element in chain (creation id) order."""
        return sorted([*self.cluts, *self.csbs, *self.cpis], key=lambda e: e.id)

    def table_elements(self) -> List[Union[Clut, Csb]]:
        return sorted([*self.cluts, *self.csbs], key=lambda e: e.id)

    def element_at(self, vid: int) -> Optional[Union[Clut, Csb, Cpi]]:
        """Element whose core is vertex ``vid``."""
        for e in self.elements():
            if e.vertex == vid:
                return e
        return None

    @staticmethod
    def bindings(element: Element) -> List[InputBinding]:
        return element.clut.inputs if isinstance(element, Csb) else element.inputs

    def set_bindings(self, element: Element, inputs: List[InputBinding]) -> None:
        if isinstance(element, Csb):
            element.clut.inputs = inputs
        else:
            element.inputs = inputs
        self.graph.set_fanins(element.vertex, [b.source for b in inputs])

    def functional_output(self, element: Element) -> int:
        if isinstance(element, Csb):
            return element.functional_output
        return element.vertex

    # --- graph edits that keep bindings in sync ---
    def redirect(self, old: int, new: int, consumers: Optional[Iterable[int]] = None) -> None:
        targets = self.graph.consumers(old) if consumers is None else sorted(set(consumers))
        self.graph.redirect_fanouts(old, new, targets)
        for e in self.elements():
            if e.vertex in targets:
                for b in self.bindings(e):
                    if b.source == old:
                        b.source = new

    def remove(self, vid: int) -> None:
        self.graph.remove_vertex(vid)
        self.pos.discard(vid)

    def add(self, kind: Kind, position: Position, fanins: Sequence[int] = (), name: Optional[str] = None,
            element: Optional[int] = None) -> int:
        vid = self.graph.add_vertex(kind, fanins, name=name, element=element)
        self.pos.assign(vid, position)
        return vid

    def const0(self) -> int:
        """Shared constant used when no other dummy source exists."""
        if self._const0 is None:
            self._const0 = self.add(Kind.CONST0, CONST_POSITION, name=self.graph.fresh_name("k"))
        return self._const0

    # --- dummy sources ---
    def dummy_candidates(self, position: Position, exclude: Iterable[int]) -> List[int]:
        """Signals that may feed a vertex at ``position`` without closing a combinational loop."""
        excluded = set(exclude)
        g = self.graph
        return [v for v in g.vertices
                if v not in excluded
                and g.vertices[v].kind not in (Kind.PO, Kind.CFG)
                and (g.vertices[v].kind == Kind.DFF or self.pos[v] < position)]

    def pick_dummy(self, position: Position, exclude: Iterable[int], rng: Optional[Rng]) -> int:
        """
        Random candidate when ``rng`` is given, otherwise the nearest earlier signal
        (then the lowest-id flip-flop). Falls back to the shared constant.
        """
        candidates = self.dummy_candidates(position, exclude)
        if not candidates:
            return self.const0()
        if rng is not None:
            return rng.choice(candidates)
        earlier = [v for v in candidates if self.pos[v] < position]
        if earlier:
            return max(earlier, key=lambda v: (self.pos[v], v))
        return min(candidates)

    # --- accounting ---
    @property
    def n_r(self) -> int:
        return self.n_o + self.n_a + self.n_b

    def cut_point_count(self) -> int:
        return len(identify_cut_points(self.graph))

    def widths(self, kind: str) -> Counter:
        pool = {"CLUT": self.cluts, "CSB": self.csbs, "CPI": self.cpis}[kind]
        return Counter(e.width for e in pool)

    def pre_expansion_widths(self) -> Counter:
        """Widths of CLUT/CSB elements as mapped, before dummy inputs were added."""
        return Counter(e.base_width if isinstance(e, Clut) else e.clut.base_width
                       for e in self.table_elements())

    def stats(self) -> Dict[str, object]:
        return {
            "cluts": len(self.cluts),
            "csbs": len(self.csbs),
            "cpis": len(self.cpis),
            "clut_widths": dict(sorted(self.widths("CLUT").items())),
            "csb_widths": dict(sorted(self.widths("CSB").items())),
            "cpi_widths": dict(sorted(self.widths("CPI").items())),
            "mapped_widths": dict(sorted(self.pre_expansion_widths().items())),
            "absorbed": len(self.absorbed),
            "n_o": self.n_o,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "n_r": self.n_r,
            "cpi_candidates": self.cpi_candidates,
        }

    def finalize(self) -> Tuple[Hypergraph, Dict[int, int]]:
        """Working graph in canonical id layout, plus the id map."""
        return self.graph.compact()

    # --- convenience for element construction ---
    @staticmethod
    def functional(sources: Iterable[int]) -> List[InputBinding]:
        return [InputBinding(s, Role.FUNCTIONAL) for s in sources]
