"""Randomized mapping: critical cones onto CLUTs, flip-flops onto CSBs."""
import logging
from typing import FrozenSet, List, Optional, Set, Tuple

from cones import extract_mffc
from design import Decomposition
from fabric import Clut, Csb, InputBinding, Role, encode_truth_table, extend_with_dummy
from models import Kind

logger = logging.getLogger(__name__)

IDENTITY: Tuple[int, ...] = (0, 1)


def redact_critical_logic(self, critical) -> None:
    """Visits the critical vertices in order; already-absorbed ones are skipped."""
    design = self.design
    for v in critical.vertices:
        if v in design.absorbed or v not in design.graph:
            continue
        r_size = self.draw_cone_size()
        if design.graph.kind(v) == Kind.DFF:
            self.redact_sequential_logic(v, r_size)
        else:
            self.redact_boolean_logic(v, r_size)
    logger.info("mapping cluts=%d csbs=%d absorbed=%d",
                len(design.cluts), len(design.csbs), len(design.absorbed))


def draw_cone_size(self) -> int:
    p = self.params
    if not p.randomize_mapping:
        return p.gamma_max
    return p.gamma_min + self.rng.range(p.gamma_max - p.gamma_min + 1)


def _support(self, cover: Set[int]) -> List[int]:
    g, pos = self.design.graph, self.design.pos
    leaves = {src for m in cover for src in g.vertices[m].fanins if src not in cover}
    return sorted(leaves, key=lambda v: (pos[v], v))


def _grow_cover(self, top: int, pool: FrozenSet[int], r_size: int) -> Tuple[Set[int], List[int]]:
    """
    Greedy cover from ``top`` over the fanout-free pool, latest positions first.

    A member joins when all of its fanouts are already covered and the support
    stays within ``r_size``. ``top`` is always covered.
    """
    g, pos = self.design.graph, self.design.pos
    cover = {top}
    support = _support(self, cover)
    for m in sorted(pool - {top}, key=lambda v: (pos[v], v), reverse=True):
        if any(c not in cover for c in g.fanouts(m)):
            continue
        trial = _support(self, cover | {m})
        if len(trial) <= r_size:
            cover.add(m)
            support = trial
    return cover, support


def _absorb(self, cover: Set[int], element_id: int) -> None:
    design = self.design
    for m in sorted(cover, key=lambda v: (design.pos[v], v), reverse=True):
        design.absorbed[m] = element_id
        design.remove(m)


def pad_to_minimum_width(self, clut: Clut) -> None:
    """Appends dummy inputs until the element reaches gamma_min."""
    design = self.design
    rng = self.rng if self.params.randomize_mapping else None
    while clut.width < self.params.gamma_min:
        source = design.pick_dummy(design.pos[clut.vertex], [clut.vertex, *clut.sources], rng)
        clut.bits = extend_with_dummy(clut.bits, clut.width)
        clut.inputs.append(InputBinding(source, Role.DUMMY))
        design.graph.set_fanins(clut.vertex, clut.sources)


def redact_boolean_logic(self, root: int, r_size: int) -> Clut:
    """Covers part of ``root``'s MFFC with one CLUT that takes over its net."""
    design = self.design
    g = design.graph
    cover, support = _grow_cover(self, root, extract_mffc(g, root), r_size)
    bits = encode_truth_table(g, cover, root, support)

    eid = design.new_element_id()
    core = design.add(Kind.CLUT, design.pos[root], support, name=g.fresh_name("c"), element=eid)
    keep_name = g.vertices[root].name if g.po_consumers(root) else None
    design.redirect(root, core)
    _absorb(self, cover, eid)
    if keep_name:
        g.rename(core, keep_name)

    clut = Clut(eid, design.functional(support), bits, vertex=core)
    self.pad_to_minimum_width(clut)
    clut.base_width = clut.width
    design.cluts.append(clut)
    design.decompositions.append(Decomposition(eid, root, frozenset(cover), len(support), clut.width))
    logger.debug("clut id=%d root=%d members=%d width=%d", eid, root, len(cover), clut.width)
    return clut


def redact_sequential_logic(self, ff: int, r_size: Optional[int] = None, pass_through: bool = False) -> Csb:
    """
    Replaces flip-flop ``ff`` by a CSB whose register keeps the flip-flop's name.

    The CLUT absorbs part of the D-input cone when that cone is fanout-free;
    otherwise (or with ``pass_through``) it is the identity on the D net.
    """
    design = self.design
    g = design.graph
    d = g.vertices[ff].fanins[0]
    pool = extract_mffc(g, ff) - {ff}
    if not pass_through and d in pool:
        cover, support = _grow_cover(self, d, pool, r_size or self.params.gamma_max)
        bits = encode_truth_table(g, cover, d, support)
        position = design.pos[d]
    else:
        cover, support, bits = set(), [d], IDENTITY
        position = design.pos.after(d)

    eid = design.new_element_id()
    core = design.add(Kind.CSB, position, support, name=g.fresh_name("c"), element=eid)
    reg = design.add(Kind.DFF, design.pos.after(core), [core], name=g.fresh_name("q"), element=eid)
    name = g.vertices[ff].name
    design.redirect(ff, reg)
    design.absorbed[ff] = eid
    design.remove(ff)
    _absorb(self, cover, eid)
    g.rename(reg, name)

    support = [reg if s == ff else s for s in support]
    clut = Clut(eid, design.functional(support), bits, vertex=core)
    self.pad_to_minimum_width(clut)
    clut.base_width = clut.width
    csb = Csb(clut, reg, Role.FUNCTIONAL, converted=pass_through)
    design.csbs.append(csb)
    if cover:
        design.decompositions.append(Decomposition(eid, ff, frozenset(cover | {ff}), len(support), clut.width))
    logger.debug("csb id=%d ff=%s members=%d width=%d", eid, name, len(cover), clut.width)
    return csb
