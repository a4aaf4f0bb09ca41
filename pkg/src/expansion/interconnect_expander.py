"""
Expander for CPI cores: ceil(log2 n) select registers driving a MUX2 tree over
the inputs. Unused leaves repeat the last input.
"""
from typing import List

from expansion.base import ElementExpander, config_registers, mux_tree
from logic import select_width
from netlist import Hypergraph


class InterconnectExpander(ElementExpander):
    def expand(self, g: Hypergraph, vid: int) -> List[int]:
        core = g.vertices[vid]
        added: List[int] = []
        n = len(core.fanins)
        selects = config_registers(g, core.element, select_width(n), added)
        leaves = list(core.fanins) + [core.fanins[-1]] * ((1 << len(selects)) - n)
        root = mux_tree(g, selects, leaves, added)
        g.substitute(vid, root)
        return added
