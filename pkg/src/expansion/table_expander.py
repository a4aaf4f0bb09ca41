"""
Expander for CLUT and CSB cores: 2^w config registers at the leaves of a
MUX2 tree selected by the element inputs, input 0 nearest the leaves.
"""
from typing import List

from expansion.base import ElementExpander, config_registers, mux_tree
from netlist import Hypergraph


class TableExpander(ElementExpander):
    def expand(self, g: Hypergraph, vid: int) -> List[int]:
        core = g.vertices[vid]
        added: List[int] = []
        leaves = config_registers(g, core.element, 1 << len(core.fanins), added)
        root = mux_tree(g, list(core.fanins), leaves, added)
        g.substitute(vid, root)
        return added


class RegisteredTableExpander(TableExpander):
    """CSB core: the table tree plus its register, which becomes a plain flip-flop."""

    def expand(self, g: Hypergraph, vid: int) -> List[int]:
        for reg in g.csb_registers(vid):
            g.vertices[reg].element = None
        return super().expand(g, vid)
