# src/netlist.py
"""The circuit IR: a hypergraph of gates, flip-flops, ports and fabric cells.

Nets are implicit: a vertex drives exactly one net (named after the vertex) and
the fanout index lists every consumer of that net, once per connected pin.
"""
import copy
import logging
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from errors import DomainError, MultiplyDrivenNetError, UndrivenNetError
from models import FABRIC_KINDS, GATE_KINDS, Kind, Vertex

logger = logging.getLogger(__name__)


class Hypergraph:
    def __init__(self, name: str = "top"):
        self.name = name
        self.vertices: Dict[int, Vertex] = {}
        self.pi_ids: List[int] = []
        self.po_ids: List[int] = []
        self._fanouts: Dict[int, List[int]] = {}
        self._signals: Dict[str, int] = {}
        self._ports: Dict[str, int] = {}
        self._next_id = 0
        self._name_counter = 0

    @classmethod
    def build(cls, name: str, vertices: Iterable[Vertex]) -> "Hypergraph":
        """
        Assembles a graph from complete vertex records; fanins may point forward.

        PIs and POs keep the order in which they appear in ``vertices``.
        """
        g = cls(name)
        records = list(vertices)
        for v in records:
            if v.id in g.vertices:
                raise DomainError(f"vertex id {v.id} already in use")
            if v.name in (g._ports if v.kind == Kind.PO else g._signals):
                raise MultiplyDrivenNetError(f"net {v.name!r} driven more than once")
            g._insert(v)
        for v in records:
            for src in v.fanins:
                if src not in g.vertices:
                    raise UndrivenNetError(f"{v.name!r} reads vertex {src}, which does not exist")
        g._rebuild_fanouts()
        return g

    # --- container protocol ---
    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, vid: int) -> bool:
        return vid in self.vertices

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.vertices))

    def vertex(self, vid: int) -> Vertex:
        try:
            return self.vertices[vid]
        except KeyError:
            raise DomainError(f"unknown vertex id {vid}") from None

    def kind(self, vid: int) -> Kind:
        return self.vertex(vid).kind

    # --- id lists ---
    @property
    def ff_ids(self) -> List[int]:
        return [v for v in sorted(self.vertices) if self.vertices[v].kind == Kind.DFF]

    @property
    def gate_ids(self) -> List[int]:
        return [v for v in sorted(self.vertices) if self.vertices[v].kind in GATE_KINDS]

    @property
    def fabric_ids(self) -> List[int]:
        return [v for v in sorted(self.vertices) if self.vertices[v].kind in FABRIC_KINDS]

    @property
    def has_fabric(self) -> bool:
        return any(v.kind in FABRIC_KINDS or v.kind == Kind.CFG for v in self.vertices.values())

    def pi_names(self) -> List[str]:
        return [self.vertices[v].name for v in self.pi_ids]

    def po_names(self) -> List[str]:
        return [self.vertices[v].name for v in self.po_ids]

    # --- names ---
    def id_of(self, name: str) -> int:
        """Id of the vertex driving net ``name`` (ports excluded)."""
        try:
            return self._signals[name]
        except KeyError:
            raise DomainError(f"unknown net {name!r}") from None

    def port_id(self, name: str) -> int:
        try:
            return self._ports[name]
        except KeyError:
            raise DomainError(f"unknown output port {name!r}") from None

    def has_name(self, name: str) -> bool:
        return name in self._signals

    def fresh_name(self, prefix: str = "n") -> str:
        while True:
            self._name_counter += 1
            candidate = f"{prefix}{self._name_counter}"
            if candidate not in self._signals and candidate not in self._ports:
                return candidate

    def rename(self, vid: int, name: str) -> None:
        v = self.vertex(vid)
        table = self._ports if v.kind == Kind.PO else self._signals
        if name == v.name:
            return
        if name in table:
            raise MultiplyDrivenNetError(f"net {name!r} already driven")
        table.pop(v.name, None)
        v.name = name
        table[name] = vid

    # --- mutation ---
    def add_vertex(self, kind: Kind, fanins: Sequence[int] = (), name: Optional[str] = None,
                   bits: Optional[Sequence[int]] = None, element: Optional[int] = None,
                   index: Optional[int] = None, vid: Optional[int] = None) -> int:
        if vid is None:
            vid = self._next_id
        if vid in self.vertices:
            raise DomainError(f"vertex id {vid} already in use")
        if name is None:
            name = self.fresh_name()
        table = self._ports if kind == Kind.PO else self._signals
        if name in table:
            raise MultiplyDrivenNetError(f"net {name!r} already driven")
        for src in fanins:
            if src not in self.vertices:
                raise DomainError(f"fanin {src} of {name!r} does not exist")
        vertex = Vertex(vid, kind, list(fanins), name,
                        tuple(bits) if bits is not None else None, element, index)
        self.vertices[vid] = vertex
        self._fanouts[vid] = []
        table[name] = vid
        for src in vertex.fanins:
            self._fanouts[src].append(vid)
        if kind == Kind.PI:
            self.pi_ids.append(vid)
        elif kind == Kind.PO:
            self.po_ids.append(vid)
        self._next_id = max(self._next_id, vid + 1)
        return vid

    def remove_vertex(self, vid: int) -> None:
        v = self.vertex(vid)
        if self._fanouts[vid]:
            raise DomainError(f"vertex {v.name!r} still drives {len(self._fanouts[vid])} pin(s)")
        for src in v.fanins:
            self._fanouts[src].remove(vid)
        del self._fanouts[vid]
        del self.vertices[vid]
        (self._ports if v.kind == Kind.PO else self._signals).pop(v.name, None)
        if v.kind == Kind.PI:
            self.pi_ids.remove(vid)
        elif v.kind == Kind.PO:
            self.po_ids.remove(vid)

    def set_fanins(self, vid: int, fanins: Sequence[int]) -> None:
        v = self.vertex(vid)
        for src in fanins:
            if src not in self.vertices:
                raise DomainError(f"fanin {src} of {v.name!r} does not exist")
        for src in v.fanins:
            self._fanouts[src].remove(vid)
        v.fanins = list(fanins)
        for src in v.fanins:
            self._fanouts[src].append(vid)

    def replace_fanin(self, vid: int, position: int, source: int) -> None:
        fanins = list(self.vertex(vid).fanins)
        fanins[position] = source
        self.set_fanins(vid, fanins)

    def redirect_fanouts(self, old: int, new: int, consumers: Optional[Iterable[int]] = None) -> None:
        """Move every pin reading ``old`` (or only those of ``consumers``) onto ``new``."""
        targets = self.consumers(old) if consumers is None else sorted(set(consumers))
        for c in targets:
            fanins = [new if src == old else src for src in self.vertices[c].fanins]
            self.set_fanins(c, fanins)

    def substitute(self, old: int, new: int) -> None:
        """``new`` takes over every reader and the net name of ``old``, which is removed."""
        name = self.vertex(old).name
        self.redirect_fanouts(old, new)
        self.remove_vertex(old)
        self.rename(new, name)

    # --- queries ---
    def fanouts(self, vid: int) -> List[int]:
        return list(self._fanouts[vid])

    def consumers(self, vid: int) -> List[int]:
        return sorted(set(self._fanouts[vid]))

    def po_consumers(self, vid: int) -> List[int]:
        return [c for c in self.consumers(vid) if self.vertices[c].kind == Kind.PO]

    def count_kinds(self) -> Dict[Kind, int]:
        counts: Dict[Kind, int] = {}
        for v in self.vertices.values():
            counts[v.kind] = counts.get(v.kind, 0) + 1
        return counts

    def copy(self) -> "Hypergraph":
        return copy.deepcopy(self)

    def is_canonical(self) -> bool:
        return [self.vertices[v].id for v in self._canonical_order()] == list(range(len(self)))

    def compact(self) -> Tuple["Hypergraph", Dict[int, int]]:
        """
        Renumbers the graph into the canonical layout the BLIF reader produces.

        Returns:
            (new graph, old id -> new id)
        """
        order = self._canonical_order()
        id_map = {old: new for new, old in enumerate(order)}
        out = Hypergraph(self.name)
        out._name_counter = self._name_counter
        for old in order:
            v = self.vertices[old]
            out._insert(Vertex(id_map[old], v.kind, [id_map[f] for f in v.fanins],
                               v.name, v.bits, v.element, v.index))
        out._rebuild_fanouts()
        return out, id_map

    def _canonical_order(self) -> List[int]:
        internal = [v for v in sorted(self.vertices)
                    if self.vertices[v].kind not in (Kind.PI, Kind.PO)]
        attached = set()
        order = list(self.pi_ids)
        for vid in internal:
            if vid in attached:
                continue
            order.append(vid)
            v = self.vertices[vid]
            if v.kind == Kind.CSB:
                for reg in self.csb_registers(vid):
                    attached.add(reg)
                    order.append(reg)
        order.extend(self.po_ids)
        return order

    def csb_registers(self, core: int) -> List[int]:
        element = self.vertices[core].element
        return [c for c in self.consumers(core)
                if self.vertices[c].kind == Kind.DFF and self.vertices[c].element == element]

    def _insert(self, vertex: Vertex) -> None:
        self.vertices[vertex.id] = vertex
        (self._ports if vertex.kind == Kind.PO else self._signals)[vertex.name] = vertex.id
        if vertex.kind == Kind.PI:
            self.pi_ids.append(vertex.id)
        elif vertex.kind == Kind.PO:
            self.po_ids.append(vertex.id)
        self._next_id = max(self._next_id, vertex.id + 1)

    def _rebuild_fanouts(self) -> None:
        self._fanouts = {vid: [] for vid in self.vertices}
        for vid in sorted(self.vertices):
            for src in self.vertices[vid].fanins:
                self._fanouts[src].append(vid)
