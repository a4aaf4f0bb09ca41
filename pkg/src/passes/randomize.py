"""Input-space and functional-space expansion of CLUTs and CSBs."""
import logging
from typing import Union

from fabric import (Clut, Csb, InputBinding, Role, apply_permutation, complement_input,
                    extend_with_dummy, invert_output, permute_inputs)
from models import MAX_ELEMENT_WIDTH, Kind

logger = logging.getLogger(__name__)


def table_of(element: Union[Clut, Csb]) -> Clut:
    return element.clut if isinstance(element, Csb) else element


def add_dummy_input(self, element: Union[Clut, Csb], source: int, position: int) -> None:
    """Inserts an ignored input at ``position``; the segment doubles."""
    clut = table_of(element)
    clut.bits = extend_with_dummy(clut.bits, position)
    inputs = list(clut.inputs)
    inputs.insert(position, InputBinding(source, Role.DUMMY))
    clut.added_dummies += 1
    self.design.set_bindings(element, inputs)


def _inversion_absorbable(self, element: Union[Clut, Csb]) -> bool:
    """Every reader is another CLUT/CSB core (or this element's own dummy register)."""
    if isinstance(element, Csb) and element.reg_output_role == Role.FUNCTIONAL:
        return False
    g = self.design.graph
    own = set(g.csb_registers(element.vertex)) if isinstance(element, Csb) else set()
    return all(g.vertices[c].kind in (Kind.CLUT, Kind.CSB)
               for c in g.consumers(element.vertex) if c not in own)


def _absorb_inversion(self, element: Union[Clut, Csb]) -> None:
    design = self.design
    clut = table_of(element)
    clut.bits = invert_output(clut.bits)
    clut.output_inverted_absorbed = True
    for c in design.graph.consumers(element.vertex):
        reader = design.element_at(c)
        if reader is None:
            continue
        target = table_of(reader)
        for j, binding in enumerate(target.inputs):
            if binding.source == element.vertex:
                target.bits = complement_input(target.bits, j)


def randomize_elements(self) -> None:
    """
    For each CLUT, then each CSB, on an even draw: add dummy inputs, permute
    the inputs, and invert the output when the readers can absorb it.
    """
    p = self.params
    if not p.randomize_elements:
        return
    design, rng = self.design, self.rng
    touched = inverted = 0
    for element in [*sorted(design.cluts, key=lambda e: e.id), *sorted(design.csbs, key=lambda e: e.id)]:
        if isinstance(element, Csb) and element.converted and not p.converted_csb_randomizable:
            continue
        if not rng.is_even():
            continue
        touched += 1
        clut = table_of(element)
        room = min(p.d_max - clut.added_dummies, MAX_ELEMENT_WIDTH - clut.width)
        if room > 0:
            for _ in range(1 + rng.range(room)):
                source = design.pick_dummy(design.pos[element.vertex], [element.vertex, *clut.sources], rng)
                self.add_dummy_input(element, source, rng.range(clut.width + 1))
        perm = rng.shuffle(list(range(clut.width)))
        clut.bits = permute_inputs(clut.bits, perm)
        design.set_bindings(element, apply_permutation(clut.inputs, perm))
        if rng.is_even() and _inversion_absorbable(self, element):
            _absorb_inversion(self, element)
            inverted += 1
    logger.info("randomize touched=%d inverted=%d", touched, inverted)
