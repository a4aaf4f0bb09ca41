# src/critical.py
"""Critical-node selection: removal cost from cone sizes and signal entropy."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from cones import cone_sizes, topological_sort
from errors import DomainError
from models import GATE_KINDS, Kind
from netlist import Hypergraph
from params_manager import RedactionParams
from rng import Rng
from simulator import Simulator

logger = logging.getLogger(__name__)

# Entropy sampling uses its own fixed stream so rcf scores do not depend on the seed.
ENTROPY_SEED = 0x5EED
SETTLE_CYCLES = 4
RCF_DIGITS = 9


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def signal_entropies(g: Hypergraph, samples: int, rng: Rng) -> Dict[int, float]:
    """
    Shannon entropy of every vertex output over ``samples`` random PI vectors.

    Flip-flops start at zero; sequential designs are clocked a few cycles with
    fresh random inputs before the snapshot is taken.
    """
    sim = Simulator(g)
    mask = (1 << samples) - 1
    streams = [rng.split(f"pi:{name}") for name in g.pi_names()]
    state = sim.initial_state()
    values: Dict[int, int] = {}
    for _ in range(SETTLE_CYCLES if g.ff_ids else 1):
        _, next_state, values = sim.step([s.word(samples) for s in streams], state, mask)
        state = next_state
    return {vid: binary_entropy(word.bit_count() / samples) for vid, word in values.items()}


def signal_entropy(g: Hypergraph, v: int, samples: int, rng: Rng) -> float:
    if g.kind(v) not in GATE_KINDS and g.kind(v) != Kind.DFF:
        raise DomainError(f"{g.vertex(v).name!r} is not a gate or flip-flop output")
    return signal_entropies(g, samples, rng)[v]


@dataclass
class CriticalSet:
    vertices: List[int] = field(default_factory=list)
    scores: Dict[int, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.vertices)


def removal_costs(g: Hypergraph, params: RedactionParams,
                  order: Optional[List[int]] = None) -> Dict[int, float]:
    """rcf of every gate and flip-flop, rounded so ties compare exactly."""
    order = order if order is not None else topological_sort(g)
    candidates = [v for v in g if g.vertices[v].kind in GATE_KINDS or g.vertices[v].kind == Kind.DFF]
    if not candidates:
        return {}
    fi, fo = cone_sizes(g, order)
    entropy = signal_entropies(g, params.entropy_samples, Rng(ENTROPY_SEED))
    max_fi = max(fi[v] for v in candidates)
    max_fo = max(fo[v] for v in candidates)
    scores = {}
    for v in candidates:
        score = params.w_h * entropy[v]
        if max_fi:
            score += params.w_fi * fi[v] / max_fi
        if max_fo:
            score += params.w_fo * fo[v] / max_fo
        scores[v] = round(score, RCF_DIGITS)
    return scores


def identify_critical_nodes(g: Hypergraph, order: List[int], rng: Rng,
                            params: RedactionParams) -> CriticalSet:
    """
    Top ``coverage`` share of gates and flip-flops by descending rcf (ties by id),
    Fisher-Yates shuffled unless mapping randomization is off.
    """
    if not len(g):
        raise DomainError("cannot select critical nodes of an empty graph")
    scores = removal_costs(g, params, order)
    ranked = sorted(scores, key=lambda v: (-scores[v], v))
    selected = ranked[:math.ceil(params.coverage * len(ranked))]
    if params.randomize_mapping:
        rng.shuffle(selected)
    logger.info("critical nodes selected=%d candidates=%d", len(selected), len(ranked))
    return CriticalSet(selected, {v: scores[v] for v in selected})
