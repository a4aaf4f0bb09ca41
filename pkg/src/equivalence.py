# src/equivalence.py
"""Simulation-based equivalence checking: exhaustive, random miter, co-simulation."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from errors import InterfaceMismatchError
from netlist import Hypergraph
from rng import Rng
from simulator import Config, Simulator

logger = logging.getLogger(__name__)

CHUNK_BITS = 16
EXHAUSTIVE_MAX_INPUTS = 20
AUTO_EXHAUSTIVE_INPUTS = 12
DEFAULT_VECTORS = 10000
DEFAULT_CYCLES = 10000
DEFAULT_LANES = 32


@dataclass
class Verdict:
    equivalent: bool
    method: str
    vectors: int = 0
    counterexample: Optional[Dict[str, int]] = None
    cycle: Optional[int] = None
    mismatched_outputs: List[str] = field(default_factory=list)

    def describe(self) -> str:
        if self.equivalent:
            return f"equivalent ({self.method}, {self.vectors} vectors)"
        where = f" at cycle {self.cycle}" if self.cycle is not None else ""
        assignment = " ".join(f"{k}={v}" for k, v in sorted((self.counterexample or {}).items()))
        return (f"mismatch ({self.method}){where} on {', '.join(self.mismatched_outputs)}: "
                f"{assignment}")


class _Miter:
    """Two simulators driven by name-matched inputs and compared on name-matched outputs."""

    def __init__(self, a: Hypergraph, b: Hypergraph, config_a: Optional[Config], config_b: Optional[Config]):
        if sorted(a.pi_names()) != sorted(b.pi_names()):
            raise InterfaceMismatchError("primary input names differ")
        if sorted(a.po_names()) != sorted(b.po_names()):
            raise InterfaceMismatchError("primary output names differ")
        self.sim_a = Simulator(a, config_a)
        self.sim_b = Simulator(b, config_b)
        self.inputs = a.pi_names()
        self._b_order = [self.inputs.index(n) for n in b.pi_names()]
        self.outputs = a.po_names()
        self._b_outputs = {n: i for i, n in enumerate(b.po_names())}

    def compare(self, words: List[int], state_a, state_b, mask: int):
        """Returns (per-output difference words, next state a, next state b)."""
        out_a, next_a, _ = self.sim_a.step(words, state_a, mask)
        out_b, next_b, _ = self.sim_b.step([words[i] for i in self._b_order], state_b, mask)
        diffs = {}
        for i, name in enumerate(self.outputs):
            d = (out_a[i] ^ out_b[self._b_outputs[name]]) & mask
            if d:
                diffs[name] = d
        return diffs, next_a, next_b

    def lane_assignment(self, words: List[int], lane: int) -> Dict[str, int]:
        return {name: (words[i] >> lane) & 1 for i, name in enumerate(self.inputs)}


def _mismatch(miter: _Miter, diffs: Dict[str, int], words: List[int], method: str,
              offset: int, cycle: Optional[int] = None) -> Verdict:
    """Verdict for the lowest failing lane of a comparison."""
    combined = 0
    for d in diffs.values():
        combined |= d
    lane = (combined & -combined).bit_length() - 1
    return Verdict(False, method, offset + lane + 1, miter.lane_assignment(words, lane), cycle,
                   [name for name, d in diffs.items() if (d >> lane) & 1])


def exhaustive_equiv(a: Hypergraph, b: Hypergraph, config_a: Optional[Config] = None,
                     config_b: Optional[Config] = None,
                     max_inputs: int = EXHAUSTIVE_MAX_INPUTS) -> Verdict:
    """Enumerates all 2^|PI| vectors (flip-flops held at zero) in chunks of 2^16 lanes."""
    miter = _Miter(a, b, config_a, config_b)
    n = len(miter.inputs)
    if n > max_inputs:
        raise InterfaceMismatchError(f"{n} inputs exceed the exhaustive limit of {max_inputs}")
    lanes_bits = min(n, CHUNK_BITS)
    lanes = 1 << lanes_bits
    mask = (1 << lanes) - 1
    patterns = [_lane_pattern(j, lanes_bits) for j in range(lanes_bits)]
    for chunk in range(1 << (n - lanes_bits)):
        words = patterns + [mask if (chunk >> (j - lanes_bits)) & 1 else 0 for j in range(lanes_bits, n)]
        diffs, _, _ = miter.compare(words, miter.sim_a.initial_state(), miter.sim_b.initial_state(), mask)
        if diffs:
            return _mismatch(miter, diffs, words, "exhaustive", chunk * lanes)
    return Verdict(True, "exhaustive", 1 << n)


def _lane_pattern(position: int, lanes_bits: int) -> int:
    word = 0
    for k in range(1 << lanes_bits):
        if (k >> position) & 1:
            word |= 1 << k
    return word


def random_miter_equiv(a: Hypergraph, b: Hypergraph, n_vectors: int = DEFAULT_VECTORS, seed: int = 0,
                       config_a: Optional[Config] = None, config_b: Optional[Config] = None) -> Verdict:
    """Uniform random vectors, each input drawn from its own named substream."""
    miter = _Miter(a, b, config_a, config_b)
    streams = [Rng(seed).split(f"pi:{name}") for name in miter.inputs]
    done = 0
    while done < n_vectors:
        lanes = min(1 << CHUNK_BITS, n_vectors - done)
        mask = (1 << lanes) - 1
        words = [s.word(lanes) for s in streams]
        diffs, _, _ = miter.compare(words, miter.sim_a.initial_state(), miter.sim_b.initial_state(), mask)
        if diffs:
            return _mismatch(miter, diffs, words, "random", done)
        done += lanes
    return Verdict(True, "random", n_vectors)


def seq_cosim_equiv(a: Hypergraph, b: Hypergraph, cycles: int = DEFAULT_CYCLES, seed: int = 0,
                    lanes: int = DEFAULT_LANES, config_a: Optional[Config] = None,
                    config_b: Optional[Config] = None) -> Verdict:
    """
    Clocks both designs from the zero state with ``lanes`` independent random
    stimulus streams and compares every PO on every cycle.
    """
    miter = _Miter(a, b, config_a, config_b)
    streams = [Rng(seed).split(f"pi:{name}") for name in miter.inputs]
    mask = (1 << lanes) - 1
    state_a, state_b = miter.sim_a.initial_state(), miter.sim_b.initial_state()
    for cycle in range(cycles):
        words = [s.word(lanes) for s in streams]
        diffs, next_a, next_b = miter.compare(words, state_a, state_b, mask)
        if diffs:
            return _mismatch(miter, diffs, words, "cosim", cycle * lanes, cycle)
        state_a, state_b = next_a, next_b
    return Verdict(True, "cosim", cycles * lanes)


def verify_design(original: Hypergraph, resolved: Hypergraph, exhaustive: Optional[bool] = None,
                  vectors: Optional[int] = None, cycles: Optional[int] = None, seed: int = 0,
                  config: Optional[Config] = None) -> Verdict:
    """
    Picks a method: co-simulation when either side holds flip-flops (or cycles is
    given), exhaustive for small combinational designs, else a random miter.
    """
    sequential = bool(original.ff_ids or resolved.ff_ids)
    if cycles is not None or (sequential and not exhaustive and vectors is None):
        verdict = seq_cosim_equiv(original, resolved, cycles or DEFAULT_CYCLES, seed, config_b=config)
    elif exhaustive or (exhaustive is None and vectors is None
                        and len(original.pi_ids) <= AUTO_EXHAUSTIVE_INPUTS):
        verdict = exhaustive_equiv(original, resolved, config_b=config)
    else:
        verdict = random_miter_equiv(original, resolved, vectors or DEFAULT_VECTORS, seed, config_b=config)
    logger.info("verify method=%s equivalent=%s vectors=%d", verdict.method, verdict.equivalent, verdict.vectors)
    return verdict
