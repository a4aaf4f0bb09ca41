from abc import ABC, abstractmethod
from typing import List, Sequence

from models import Kind
from netlist import Hypergraph


class ElementExpander(ABC):
    @abstractmethod
    def expand(self, g: Hypergraph, vid: int) -> List[int]:
        """Replaces fabric core ``vid`` of ``g`` in place; returns the vertices added."""


def mux_tree(g: Hypergraph, selects: Sequence[int], leaves: Sequence[int], added: List[int]) -> int:
    """
    Binary MUX2 tree: ``selects[0]`` picks between adjacent leaves, ``selects[1]``
    between the resulting pairs, and so on. ``len(leaves)`` must be ``2 ** len(selects)``.
    """
    level = list(leaves)
    for sel in selects:
        nxt = []
        for lo, hi in zip(level[0::2], level[1::2]):
            vid = g.add_vertex(Kind.MUX2, [sel, lo, hi], name=g.fresh_name("m"))
            added.append(vid)
            nxt.append(vid)
        level = nxt
    return level[0]


def config_registers(g: Hypergraph, element: int, count: int, added: List[int]) -> List[int]:
    regs = [g.add_vertex(Kind.CFG, name=g.fresh_name("cfg"), element=element, index=k)
            for k in range(count)]
    added.extend(regs)
    return regs
