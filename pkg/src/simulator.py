# src/simulator.py
"""
Levelized, bit-parallel logic simulation.

Every signal is a Python integer carrying one bit per lane; flip-flops start
at zero and update on each ``step``. Fabric cells read their configuration
from ``config`` (element id -> segment bits), so unprogrammed netlists can be
simulated under any candidate bitstream.
"""
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from cones import topological_sort
from errors import FabricError
from logic import gate_word, select_index, table_word
from models import LIBRARY_GATES, Kind
from netlist import Hypergraph

logger = logging.getLogger(__name__)

Config = Mapping[int, Sequence[int]]


class Simulator:
    def __init__(self, g: Hypergraph, config: Optional[Config] = None):
        self.g = g
        self.config = dict(config or {})
        self.order = [v for v in topological_sort(g)
                      if g.vertices[v].kind not in (Kind.PI, Kind.DFF, Kind.PO)]
        self.pi_ids = list(g.pi_ids)
        self.po_ids = list(g.po_ids)
        self.ff_ids = g.ff_ids
        self._check_config()

    def _check_config(self) -> None:
        for vid in self.order:
            v = self.g.vertices[vid]
            if v.kind in (Kind.CLUT, Kind.CSB, Kind.CPI, Kind.CFG) and v.element not in self.config:
                raise FabricError(f"no configuration for element #{v.element} ({v.name!r})")

    def initial_state(self) -> Dict[int, int]:
        return {ff: 0 for ff in self.ff_ids}

    def evaluate(self, pi_words: Sequence[int], state: Mapping[int, int], mask: int) -> Dict[int, int]:
        """
        Settles the combinational logic for one clock phase.

        Args:
            pi_words: one word per PI, in PI order.
            state: current flip-flop output words by DFF id.
            mask: live lanes.

        Returns:
            Word of every vertex, POs included.
        """
        g = self.g
        values: Dict[int, int] = dict(zip(self.pi_ids, pi_words))
        values.update(state)
        for vid in self.order:
            v = g.vertices[vid]
            kind = v.kind
            ins = [values[src] for src in v.fanins]
            if kind in LIBRARY_GATES:
                values[vid] = gate_word(kind, ins, mask)
            elif kind == Kind.TABLE:
                values[vid] = table_word(v.bits, ins, mask)
            elif kind in (Kind.CLUT, Kind.CSB):
                bits = self.config[v.element]
                if len(bits) != 1 << len(ins):
                    raise FabricError(f"element #{v.element}: {len(bits)} bits for width {len(ins)}")
                values[vid] = table_word(bits, ins, mask)
            elif kind == Kind.CPI:
                index = select_index(self.config[v.element])
                if index >= len(ins):
                    raise FabricError(f"CPI #{v.element} selects input {index} of {len(ins)}")
                values[vid] = ins[index]
            elif kind == Kind.CFG:
                values[vid] = mask if self.config[v.element][v.index] else 0
            else:
                raise FabricError(f"cannot simulate {kind} vertex {v.name!r}")
        for po in self.po_ids:
            values[po] = values[g.vertices[po].fanins[0]]
        return values

    def step(self, pi_words: Sequence[int], state: Mapping[int, int],
             mask: int) -> Tuple[List[int], Dict[int, int], Dict[int, int]]:
        """One clock cycle: (PO words, next state, all values)."""
        values = self.evaluate(pi_words, state, mask)
        next_state = {ff: values[self.g.vertices[ff].fanins[0]] for ff in self.ff_ids}
        return [values[po] for po in self.po_ids], next_state, values


def simulate_comb(g: Hypergraph, pi_vector: Sequence[int],
                  config: Optional[Config] = None) -> Tuple[int, ...]:
    """PO values for one PI vector (PI order), flip-flops at zero."""
    sim = Simulator(g, config)
    if len(pi_vector) != len(sim.pi_ids):
        raise ValueError(f"expected {len(sim.pi_ids)} input values, got {len(pi_vector)}")
    outputs, _, _ = sim.step([b & 1 for b in pi_vector], sim.initial_state(), 1)
    return tuple(outputs)


def simulate_seq(g: Hypergraph, stimuli: Sequence[Sequence[int]], cycles: Optional[int] = None,
                 config: Optional[Config] = None) -> List[Tuple[int, ...]]:
    """
    PO trace from the all-zero state.

    Args:
        stimuli: one PI vector per cycle.
        cycles: defaults to len(stimuli); must not exceed it.
    """
    cycles = len(stimuli) if cycles is None else cycles
    if cycles > len(stimuli):
        raise ValueError(f"{cycles} cycles requested but only {len(stimuli)} stimuli given")
    sim = Simulator(g, config)
    state = sim.initial_state()
    trace = []
    for t in range(cycles):
        outputs, state, _ = sim.step([b & 1 for b in stimuli[t]], state, 1)
        trace.append(tuple(outputs))
    return trace
