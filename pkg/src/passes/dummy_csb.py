"""Dummy CSB placement: registered decoys and converted flip-flops."""
import logging
import math
from typing import Union

from fabric import Clut, Csb, Role
from models import MAX_ELEMENT_WIDTH, Kind
from passes.randomize import table_of

logger = logging.getLogger(__name__)


def _accepts_dummy(self, element: Union[Clut, Csb]) -> bool:
    width = table_of(element).width
    return width < self.params.gamma_min + self.params.d_max and width < MAX_ELEMENT_WIDTH


def convert_clut_to_csb(self, clut: Clut) -> Csb:
    """Adds a register behind the CLUT; the combinational output keeps its loads."""
    design = self.design
    g = design.graph
    g.vertices[clut.vertex].kind = Kind.CSB
    reg = design.add(Kind.DFF, design.pos.after(clut.vertex), [clut.vertex],
                     name=g.fresh_name("q"), element=clut.id)
    design.cluts.remove(clut)
    csb = Csb(clut, reg, Role.DUMMY, comb_output_exposed=True, converted=True)
    design.csbs.append(csb)
    return csb


def place_dummy_csbs(self) -> None:
    """
    Draws n_a CLUT picks and n_b flip-flop picks.

    A CLUT pick succeeds when a later element can take one more input; its new
    register then feeds that element as a dummy. A flip-flop pick turns a raw
    DFF into a pass-through CSB.
    """
    design, rng, p = self.design, self.rng, self.params
    bound_a = math.ceil(p.gamma_a_max * len(design.cluts))
    for _ in range(rng.range(bound_a) if bound_a else 0):
        if not design.cluts:
            break
        clut = rng.choice(sorted(design.cluts, key=lambda e: e.id))
        here = design.pos[clut.vertex]
        acceptors = [e for e in design.table_elements()
                     if e is not clut and design.pos[e.vertex] > here and _accepts_dummy(self, e)]
        if not acceptors:
            continue
        target = rng.choice(acceptors)
        csb = self.convert_clut_to_csb(clut)
        self.add_dummy_input(target, csb.reg_vertex, rng.range(table_of(target).width + 1))
        design.n_a += 1

    bound_b = math.ceil(p.gamma_b_max * len(design.original.ff_ids))
    for _ in range(rng.range(bound_b) if bound_b else 0):
        g = design.graph
        raw = [ff for ff in g.ff_ids if g.vertices[ff].element is None]
        if not raw:
            break
        self.redact_sequential_logic(rng.choice(raw), pass_through=True)
        design.n_b += 1
    logger.info("dummy csbs n_a=%d n_b=%d", design.n_a, design.n_b)
