"""CPI placement on fabric output wires."""
import logging
import math
from typing import List

from fabric import Cpi, InputBinding, Role
from logic import int_to_bits, select_width
from models import Kind

logger = logging.getLogger(__name__)

CPI_WIDTH = 2


def _interceptable(self, source: int) -> bool:
    """
    A wire can take a CPI when it has readers besides its own CSB register and
    moving them does not steal a port name from a PI or flip-flop.
    """
    g = self.design.graph
    v = g.vertices[source]
    own = set(g.csb_registers(source)) if v.kind == Kind.CSB else set()
    if not [c for c in g.consumers(source) if c not in own]:
        return False
    if v.kind in (Kind.PI, Kind.DFF):
        return all(g.vertices[po].name != v.name for po in g.po_consumers(source))
    return True


def identify_candidate_wires(self) -> List[int]:
    """Functional outputs of CLUTs/CSBs; PO-feeding wires when there is no fabric."""
    design = self.design
    g = design.graph
    elements = design.table_elements()
    if elements:
        wires = [design.functional_output(e) for e in elements]
    elif self.params.coverage > 0:
        wires = list(dict.fromkeys(g.vertices[po].fanins[0] for po in g.po_ids))
    else:
        wires = []
    return [w for w in wires if _interceptable(self, w)]


def redact_interconnect_logic(self, source: int) -> Cpi:
    """Inserts a CPI2 between ``source`` and its readers, programmed to pass it through."""
    design, rng = self.design, self.rng
    randomized = self.params.randomize_interconnect
    g = design.graph
    v = g.vertices[source]
    own = set(g.csb_registers(source)) if v.kind == Kind.CSB else set()
    readers = [c for c in g.consumers(source) if c not in own]

    position = design.pos.before_all() if v.kind == Kind.DFF else design.pos.after(source)
    dummy = design.pick_dummy(position, [source], rng if randomized else None)
    leg = rng.range(CPI_WIDTH) if randomized else 0
    inputs = [InputBinding(dummy, Role.DUMMY) for _ in range(CPI_WIDTH)]
    inputs[leg] = InputBinding(source, Role.FUNCTIONAL)

    eid = design.new_element_id()
    vid = design.add(Kind.CPI, position, [b.source for b in inputs], name=g.fresh_name("p"), element=eid)
    takes_port_name = v.kind not in (Kind.PI, Kind.DFF) and any(
        g.vertices[po].name == v.name for po in g.po_consumers(source))
    design.redirect(source, vid, readers)
    if takes_port_name:
        name = v.name
        g.rename(source, g.fresh_name("c"))
        g.rename(vid, name)

    cpi = Cpi(eid, inputs, int_to_bits(leg, select_width(CPI_WIDTH)), vid)
    design.cpis.append(cpi)
    return cpi


def place_cpis(self) -> None:
    """Picks r = ceil(cpi_fraction * p) of the p candidate wires and intercepts each."""
    design, p = self.design, self.params
    candidates = self.identify_candidate_wires()
    design.cpi_candidates = len(candidates)
    r = math.ceil(p.cpi_fraction * len(candidates))
    chosen = self.rng.sample(candidates, r) if p.randomize_interconnect else candidates[:r]
    for source in chosen:
        self.redact_interconnect_logic(source)
    logger.info("cpis placed=%d candidates=%d", len(chosen), len(candidates))
