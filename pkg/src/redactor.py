# src/redactor.py
"""
Redaction pipeline: critical-node selection, randomized mapping, dummy CSBs,
element randomization and CPI placement, each stage drawing from its own
substream of one seed.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

from bitstream import Bitstream, generate_bitstream
from critical import CriticalSet, identify_critical_nodes
from design import RedactedDesign
from errors import RedactorInternalError
from netlist import Hypergraph
from params_manager import RedactionParams
from rng import Rng
from validator import NetlistValidator

logger = logging.getLogger(__name__)

# Pipeline stages in run order; each draws from its own substream of the seed.
STAGES = ("critical", "mapping", "dummy_csb", "randomize", "interconnect")


class Redactor:
    """
    Holds the seeded streams and the design under construction; the transform
    passes live in ``passes/`` and are bound here.

    ``self.rng`` is the stream of the stage currently running, so the draws of
    one stage never shift those of another.
    """

    def __init__(self, params: RedactionParams, seed: int):
        self.params = params
        self.seed = seed
        root = Rng(seed)
        self.streams: Dict[str, Rng] = {stage: root.split(stage) for stage in STAGES}
        self.rng = self.streams[STAGES[0]]
        self.design: Optional[RedactedDesign] = None
        self.critical: Optional[CriticalSet] = None

    def enter_stage(self, stage: str) -> Rng:
        self.rng = self.streams[stage]
        return self.rng

    def redact(self, g: Hypergraph) -> RedactedDesign:
        validator = NetlistValidator()
        order = validator.check(g)
        self.design = RedactedDesign(g, order)
        rng = self.enter_stage("critical")
        if len(g):
            self.critical = identify_critical_nodes(g, order, rng, self.params)
        else:
            self.critical = CriticalSet()
        self.enter_stage("mapping")
        self.redact_critical_logic(self.critical)
        self.enter_stage("dummy_csb")
        self.place_dummy_csbs()
        self.enter_stage("randomize")
        self.randomize_elements()
        self.enter_stage("interconnect")
        self.place_cpis()

        design = self.design
        validator.check(design.graph)
        cut_points = design.cut_point_count()
        if cut_points != design.n_o + design.n_a:
            raise RedactorInternalError(
                f"cut-point count {cut_points} != n_o + n_a = {design.n_o + design.n_a}")
        logger.info("redacted seed=%d cluts=%d csbs=%d cpis=%d n_r=%d",
                    self.seed, len(design.cluts), len(design.csbs), len(design.cpis), design.n_r)
        return design

    # --- mapping ---
    def redact_critical_logic(self, critical: CriticalSet):
        from passes.mapping import redact_critical_logic as _redact
        return _redact(self, critical)

    def draw_cone_size(self) -> int:
        from passes.mapping import draw_cone_size as _draw
        return _draw(self)

    def redact_boolean_logic(self, root: int, r_size: int):
        from passes.mapping import redact_boolean_logic as _redact_boolean
        return _redact_boolean(self, root, r_size)

    def redact_sequential_logic(self, ff: int, r_size: Optional[int] = None, pass_through: bool = False):
        from passes.mapping import redact_sequential_logic as _redact_sequential
        return _redact_sequential(self, ff, r_size, pass_through)

    def pad_to_minimum_width(self, clut):
        from passes.mapping import pad_to_minimum_width as _pad
        return _pad(self, clut)

    # --- dummy CSBs ---
    def place_dummy_csbs(self):
        from passes.dummy_csb import place_dummy_csbs as _place
        return _place(self)

    def convert_clut_to_csb(self, clut):
        from passes.dummy_csb import convert_clut_to_csb as _convert
        return _convert(self, clut)

    # --- element randomization ---
    def randomize_elements(self):
        from passes.randomize import randomize_elements as _randomize
        return _randomize(self)

    def add_dummy_input(self, element, source: int, position: int):
        from passes.randomize import add_dummy_input as _add
        return _add(self, element, source, position)

    # --- interconnect ---
    def place_cpis(self):
        from passes.interconnect import place_cpis as _place
        return _place(self)

    def identify_candidate_wires(self) -> List[int]:
        from passes.interconnect import identify_candidate_wires as _identify
        return _identify(self)

    def redact_interconnect_logic(self, source: int):
        from passes.interconnect import redact_interconnect_logic as _redact_interconnect
        return _redact_interconnect(self, source)


@dataclass
class RedactionResult:
    netlist: Hypergraph
    bitstream: Bitstream
    design: RedactedDesign


def redact_netlist(g: Hypergraph, seed: int, params: RedactionParams) -> RedactionResult:
    """
    Full pipeline for one variant. Deterministic in (g, seed, params).

    Returns:
        The redacted netlist in canonical layout, its bitstream and the design record.
    """
    design = Redactor(params, seed).redact(g)
    bitstream = generate_bitstream(design)
    netlist, _ = design.finalize()
    return RedactionResult(netlist, bitstream, design)


def audit_input_coverage(design: RedactedDesign) -> List[str]:
    """
    Problems with the cone covers: an element narrower than the support it
    covers, or an absorbed vertex not owned by its recorded element.
    """
    problems = []
    for d in design.decompositions:
        if d.width < d.support:
            problems.append(f"element #{d.element_id}: width {d.width} < support {d.support}")
        for m in d.members:
            if design.absorbed.get(m) != d.element_id:
                problems.append(f"vertex {m} absorbed by #{design.absorbed.get(m)}, "
                                f"recorded under #{d.element_id}")
    known = {e.id for e in design.elements()}
    for vid, eid in design.absorbed.items():
        if eid not in known:
            problems.append(f"vertex {vid} absorbed by unknown element #{eid}")
    return problems
