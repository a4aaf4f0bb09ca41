# src/cones.py
"""Graph queries over the hypergraph: ordering, cones, MFFCs and cut-points."""
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx

from errors import CombinationalCycleError, DomainError
from models import GATE_KINDS, CutKind, CutPoint, Kind, is_source
from netlist import Hypergraph


def combinational_view(g: Hypergraph) -> nx.DiGraph:
    """DiGraph of every fanin edge except those leaving a flip-flop."""
    view = nx.DiGraph()
    view.add_nodes_from(g.vertices)
    for vid, v in g.vertices.items():
        for src in v.fanins:
            if g.vertices[src].kind != Kind.DFF:
                view.add_edge(src, vid)
    return view


def topological_sort(g: Hypergraph) -> List[int]:
    """
    Deterministic topological order of the combinational view.

    Ties are broken by ascending id. Flip-flop outputs act as sources.

    Raises:
        CombinationalCycleError: listing one offending cycle.
    """
    view = combinational_view(g)
    try:
        return list(nx.lexicographical_topological_sort(view))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(view)]
        raise CombinationalCycleError(cycle, [g.vertices[v].name for v in cycle]) from None


def extract_mffc(g: Hypergraph, root: int) -> FrozenSet[int]:
    """
    Maximum fanout-free cone of ``root``.

    Only gates are absorbed; PIs, flip-flop outputs, fabric cells and config
    registers stay leaves.
    """
    kind = g.kind(root)
    if kind not in GATE_KINDS and kind != Kind.DFF:
        raise DomainError(f"MFFC root {g.vertex(root).name!r} is a {kind}, not a gate or DFF")
    cone = {root}
    remaining: Dict[int, int] = {}
    stack = [root]
    while stack:
        node = stack.pop()
        for src in g.vertex(node).fanins:
            if src in cone or g.kind(src) not in GATE_KINDS:
                continue
            remaining[src] = remaining.get(src, len(g.fanouts(src))) - 1
            if remaining[src] == 0:
                cone.add(src)
                stack.append(src)
    return frozenset(cone)


def identify_cut_points(g: Hypergraph) -> List[CutPoint]:
    """POs in port order, then flip-flop data inputs in ascending id order."""
    points = [CutPoint(po, CutKind.PO, g.vertices[po].fanins[0], g.vertices[po].name)
              for po in g.po_ids]
    points.extend(CutPoint(ff, CutKind.PSEUDO_PO, g.vertices[ff].fanins[0], g.vertices[ff].name)
                  for ff in g.ff_ids)
    return points


@dataclass(frozen=True)
class Cone:
    members: FrozenSet[int]
    drivers: FrozenSet[int]

    @property
    def size(self) -> int:
        return len(self.members) + len(self.drivers)


def fan_in_cone(g: Hypergraph, cp: CutPoint) -> Cone:
    if cp.vertex_id not in g or g.vertices[cp.vertex_id].fanins[:1] != [cp.driver_id]:
        raise DomainError(f"cut-point {cp.name!r} does not belong to this graph")
    return fan_in_cone_of(g, cp.driver_id)


def fan_in_cone_of(g: Hypergraph, start: int) -> Cone:
    """Transitive fanin of ``start`` (inclusive) stopping at PIs, DFF outputs and config registers."""
    if is_source(g.kind(start)):
        return Cone(frozenset(), frozenset([start]))
    members, drivers = {start}, set()
    stack = [start]
    while stack:
        node = stack.pop()
        for src in g.vertices[node].fanins:
            if is_source(g.vertices[src].kind):
                drivers.add(src)
            elif src not in members:
                members.add(src)
                stack.append(src)
    return Cone(frozenset(members), frozenset(drivers))


def fan_out_cone(g: Hypergraph, v: int) -> FrozenSet[int]:
    """Transitive fanout of ``v`` up to (excluding) POs and flip-flop data inputs."""
    seen = set()
    stack = [v]
    while stack:
        node = stack.pop()
        for c in g.consumers(node):
            if g.vertices[c].kind in (Kind.PO, Kind.DFF) or c in seen:
                continue
            seen.add(c)
            stack.append(c)
    return frozenset(seen)


def cone_sizes(g: Hypergraph, order: List[int]) -> Tuple[Dict[int, int], Dict[int, int]]:
    """
    |FI(v)| and |FO(v)| for every vertex at once, using integer bitsets.

    Args:
        order: a topological order of ``g`` (see topological_sort).
    """
    fanin_bits: Dict[int, int] = {}
    for vid in order:
        v = g.vertices[vid]
        acc = 0
        for src in v.fanins:
            acc |= 1 << src
            if not is_source(g.vertices[src].kind):
                acc |= fanin_bits[src]
        fanin_bits[vid] = acc

    fanout_bits: Dict[int, int] = {}

    def collect(vid: int) -> int:
        acc = 0
        for c in g.consumers(vid):
            if g.vertices[c].kind in (Kind.PO, Kind.DFF):
                continue
            acc |= (1 << c) | fanout_bits[c]
        return acc

    for vid in reversed(order):
        if g.vertices[vid].kind != Kind.DFF:
            fanout_bits[vid] = collect(vid)
    for vid in g.ff_ids:
        fanout_bits[vid] = collect(vid)

    return ({v: bits.bit_count() for v, bits in fanin_bits.items()},
            {v: bits.bit_count() for v, bits in fanout_bits.items()})
