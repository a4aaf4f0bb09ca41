import logging
from typing import Dict, Union

from errors import FabricError
from expansion.base import ElementExpander
from expansion.interconnect_expander import InterconnectExpander
from expansion.table_expander import RegisteredTableExpander, TableExpander
from fabric import Clut, Cpi, Csb, Element
from models import Kind
from netlist import Hypergraph
from validator import NetlistValidator

logger = logging.getLogger(__name__)


class ExpanderFactory:
    def __init__(self):
        self.expanders: Dict[Kind, ElementExpander] = {}
        self.register_expander(Kind.CLUT, TableExpander())
        self.register_expander(Kind.CSB, RegisteredTableExpander())
        self.register_expander(Kind.CPI, InterconnectExpander())

    def get_expander(self, kind: Kind) -> ElementExpander:
        try:
            return self.expanders[kind]
        except KeyError:
            raise FabricError(f"no gate-level expansion for {kind}") from None

    def register_expander(self, kind: Kind, expander: ElementExpander):
        self.expanders[kind] = expander


def expand_design(g: Hypergraph, factory: Union[ExpanderFactory, None] = None) -> Hypergraph:
    """
    Copy of ``g`` with every fabric core replaced by config registers and MUX2
    trees, in canonical layout. Net names of the cores survive on the tree roots.
    """
    factory = factory or ExpanderFactory()
    work = g.copy()
    added = 0
    for vid in work.fabric_ids:
        added += len(factory.get_expander(work.kind(vid)).expand(work, vid))
    expanded, _ = work.compact()
    NetlistValidator().check(expanded)
    logger.debug("expanded fabric vertices_added=%d", added)
    return expanded


def expand_to_gates(element: Element) -> Hypergraph:
    """
    Standalone fragment for one element: PIs ``i0..``, output ``o`` from the
    core and, for a CSB, output ``q`` from its register.
    """
    g = Hypergraph(f"{element.kind}{element.width}_{element.id}")
    pis = [g.add_vertex(Kind.PI, name=f"i{j}") for j in range(element.width)]
    kind = {Clut: Kind.CLUT, Csb: Kind.CSB, Cpi: Kind.CPI}[type(element)]
    core = g.add_vertex(kind, pis, name="core", element=element.id)
    g.add_vertex(Kind.PO, [core], name="o")
    if isinstance(element, Csb):
        reg = g.add_vertex(Kind.DFF, [core], name="reg", element=element.id)
        g.add_vertex(Kind.PO, [reg], name="q")
    return expand_design(g)
