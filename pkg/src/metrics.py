# src/metrics.py
"""
Indistinguishability metrics: function counts, programmed-function
distributions, cut-point structure scores, variant similarity and the
complexity estimates of the randomized transforms.
"""
import csv
import hashlib
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from bitstream import Bitstream, random_fill_bitstream
from cones import fan_in_cone, fan_out_cone, identify_cut_points
from errors import DomainError, ParamsError
from expansion import expand_design
from fabric import ElementKind, canonical_key
from models import CutKind, CutPoint, Kind, is_source
from netlist import Hypergraph
from rng import Rng
from simulator import Simulator

logger = logging.getLogger(__name__)

SIMILARITY_VERSION = "similarity-proxy/1"
STRUCTURAL_TOLERANCE = 0.05
MAX_FUNCTION_INPUTS = 16

CutKey = Tuple[str, str]


# -------------------------------------------------------------------
# Function counts
# -------------------------------------------------------------------

def count_all_input_functions(n: int) -> int:
    """F_0 = 0, F_1 = 2, F_n = 2^(2^n) - (F_(n-1) + 2)."""
    if not 0 <= n <= MAX_FUNCTION_INPUTS:
        raise DomainError(f"n must lie in [0, {MAX_FUNCTION_INPUTS}]")
    if n == 0:
        return 0
    f = 2
    for k in range(2, n + 1):
        f = 2 ** (2 ** k) - (f + 2)
    return f


def count_functions_depending_on_all(n: int) -> int:
    """Exact number of n-input functions that depend on every input (inclusion-exclusion)."""
    if not 0 <= n <= MAX_FUNCTION_INPUTS:
        raise DomainError(f"n must lie in [0, {MAX_FUNCTION_INPUTS}]")
    return sum((-1) ** (n - k) * math.comb(n, k) * 2 ** (2 ** k) for k in range(n + 1))


# -------------------------------------------------------------------
# Programmed-function distribution
# -------------------------------------------------------------------

@dataclass
class FunctionDistribution:
    histograms: Dict[int, Counter] = field(default_factory=dict)

    def unique_counts(self) -> Dict[int, int]:
        return {w: len(h) for w, h in sorted(self.histograms.items())}

    def totals(self) -> Dict[int, int]:
        return {w: sum(h.values()) for w, h in sorted(self.histograms.items())}

    def cumulative(self, width: int) -> List[float]:
        """Cumulative share of elements covered by the k most frequent functions."""
        counts = np.array(sorted(self.histograms.get(width, Counter()).values(), reverse=True), dtype=float)
        if counts.size == 0:
            return []
        return [float(x) for x in np.cumsum(counts) / counts.sum()]


def clut_function_distribution(bitstreams: Iterable[Bitstream]) -> FunctionDistribution:
    """Per physical width, how often each dependent-input function is programmed."""
    dist = FunctionDistribution()
    for b in bitstreams:
        for s in b.segments:
            if s.element_kind == ElementKind.CPI:
                continue
            dist.histograms.setdefault(s.width, Counter())[canonical_key(s.bits)] += 1
    return dist


# -------------------------------------------------------------------
# Structural score
# -------------------------------------------------------------------

@dataclass(frozen=True)
class TdiWeights:
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0
    w4: float = 1.0

    def __post_init__(self):
        values = (self.w1, self.w2, self.w3, self.w4)
        if min(values) < 0 or not any(values):
            raise ParamsError("TDI weights must be non-negative and not all zero")


@dataclass(frozen=True)
class CutPointFeatures:
    fi_size: int
    fo_size: int
    fi_gates: int
    fi_drivers: int

    def score(self, weights: TdiWeights = TdiWeights()) -> float:
        return (weights.w1 * self.fi_size + weights.w2 * self.fo_size
                + weights.w3 * self.fi_gates + weights.w4 * self.fi_drivers)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.fi_size, self.fo_size, self.fi_gates, self.fi_drivers)


def cut_point_features(g: Hypergraph, cp: CutPoint) -> CutPointFeatures:
    cone = fan_in_cone(g, cp)
    gates = sum(1 for m in cone.members if not is_source(g.vertices[m].kind))
    fo = len(fan_out_cone(g, cp.vertex_id)) if cp.kind == CutKind.PSEUDO_PO else 0
    return CutPointFeatures(cone.size, fo, gates, len(cone.drivers))


def tdi_s(g: Hypergraph, cp: CutPoint, weights: TdiWeights = TdiWeights()) -> float:
    """w1*FI_size + w2*FO_size + w3*FI_gates + w4*FI_drivers for one cut-point."""
    return cut_point_features(g, cp).score(weights)


def all_features(g: Hypergraph) -> Dict[CutKey, CutPointFeatures]:
    return {cp.key: cut_point_features(g, cp) for cp in identify_cut_points(g)}


def _gate_level(g: Hypergraph) -> Hypergraph:
    return expand_design(g) if g.has_fabric else g


@dataclass
class TdiReport:
    samples: List[CutKey]
    original: List[float]
    variants: Dict[str, List[float]]
    matches: Dict[str, int]
    tolerance: float = 0.0

    def variance(self) -> List[float]:
        """Cross-variant variance of each sampled cut-point."""
        if not self.variants:
            return []
        table = np.array(list(self.variants.values()), dtype=float)
        return [float(v) for v in table.var(axis=0)]

    def to_dict(self) -> dict:
        return {
            "samples": [f"{kind}:{name}" for kind, name in self.samples],
            "original": self.original,
            "variants": self.variants,
            "matches": self.matches,
            "variance": self.variance(),
            "tolerance": self.tolerance,
        }


def _equidistant_samples(scores: Dict[CutKey, float], n_samples: int) -> List[CutKey]:
    """Cut-points nearest to n equidistant targets between the minimum and maximum score."""
    keys = sorted(scores, key=lambda k: (scores[k], k))
    n = min(n_samples, len(keys))
    if n == 0:
        return []
    lo, hi = scores[keys[0]], scores[keys[-1]]
    targets = [lo] if n == 1 else [lo + i * (hi - lo) / (n - 1) for i in range(n)]
    chosen: List[CutKey] = []
    for t in targets:
        free = [k for k in keys if k not in chosen]
        chosen.append(min(free, key=lambda k: (abs(scores[k] - t), scores[k], k)))
    return chosen


def _matches(a: float, b: float, tolerance: float) -> bool:
    if tolerance == 0.0:
        return a == b
    return abs(a - b) <= tolerance * max(abs(a), abs(b))


def tdi_s_reports(original: Hypergraph, variants: Dict[str, Hypergraph], n_samples: int = 10,
                  weights: TdiWeights = TdiWeights(), tolerance: float = 0.0) -> TdiReport:
    """
    Scores the same sampled cut-points on the original and on every variant
    (fabric expanded to gates), plus pairwise match counts between variants.
    """
    if not variants:
        raise DomainError("need at least one variant")
    if n_samples < 1:
        raise DomainError("n_samples must be at least 1")
    base = {k: f.score(weights) for k, f in all_features(original).items()}
    scored = {label: {k: f.score(weights) for k, f in all_features(_gate_level(g)).items()}
              for label, g in variants.items()}
    common = {k: s for k, s in base.items() if all(k in v for v in scored.values())}
    if len(common) < n_samples:
        logger.warning("tdi samples clamped requested=%d available=%d", n_samples, len(common))
    samples = _equidistant_samples(common, n_samples)
    labels = list(variants)
    matches = {}
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            matches[f"{a}|{b}"] = sum(1 for k in samples if _matches(scored[a][k], scored[b][k], tolerance))
    return TdiReport(samples, [base[k] for k in samples],
                     {label: [scored[label][k] for k in samples] for label in labels}, matches, tolerance)


# -------------------------------------------------------------------
# Similarity proxy
# -------------------------------------------------------------------

def _signatures(g: Hypergraph, n_vectors: int, seed: int) -> List[str]:
    """Hash of each cut-point's simulated word under a shared random fabric fill."""
    fill = random_fill_bitstream(g, Rng(seed).split("fill"))
    sim = Simulator(g, fill.config())
    words = [Rng(seed).split(f"pi:{name}").word(n_vectors) for name in g.pi_names()]
    values = sim.evaluate(words, sim.initial_state(), (1 << n_vectors) - 1)
    size = (n_vectors + 7) // 8
    return [hashlib.sha256(values[cp.driver_id].to_bytes(size, "little")).hexdigest()
            for cp in identify_cut_points(g)]


def _structural_match(a: Tuple[int, ...], b: Tuple[int, ...], tolerance: float) -> bool:
    return all(abs(x - y) <= tolerance * max(x, y) for x, y in zip(a, b))


def _directional(sig_a: List[str], sig_b: List[str], feat_a: List[tuple], feat_b: List[tuple],
                 tolerance: float) -> float:
    if not sig_a:
        return 0.0
    known = set(sig_b)
    functional = sum(1 for s in sig_a if s in known) / len(sig_a)
    structural = sum(1 for fa in feat_a if any(_structural_match(fa, fb, tolerance) for fb in feat_b)) / len(feat_a)
    return 0.5 * functional + 0.5 * structural


def similarity_matrix(variants: Sequence[Hypergraph], n_vectors: int = 256, seed: int = 0,
                      tolerance: float = STRUCTURAL_TOLERANCE) -> np.ndarray:
    """
    Pairwise similarity in [0, 1]: half functional (shared cut-point simulation
    signatures), half structural (cut-point feature tuples within ``tolerance``),
    averaged over both directions. The diagonal is 1.
    """
    if n_vectors <= 0:
        raise DomainError("n_vectors must be positive")
    sigs = [_signatures(g, n_vectors, seed) for g in variants]
    feats = [[f.as_tuple() for f in all_features(_gate_level(g)).values()] for g in variants]
    k = len(variants)
    matrix = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            forward = _directional(sigs[i], sigs[j], feats[i], feats[j], tolerance)
            backward = _directional(sigs[j], sigs[i], feats[j], feats[i], tolerance)
            matrix[i, j] = matrix[j, i] = (forward + backward) / 2
    logger.info("similarity variants=%d vectors=%d mean_offdiag=%.4f", k, n_vectors,
                float((matrix.sum() - k) / (k * k - k)) if k > 1 else 1.0)
    return matrix


# -------------------------------------------------------------------
# Complexity and overhead
# -------------------------------------------------------------------

@dataclass
class ComplexityReport:
    dummy_factors: Dict[int, int]
    permutation_variants: Dict[int, int]
    log2_cut_point_choices: float
    cpi_configurations: int
    log2_cpi_configurations: float
    cone_size_uncertainty: str = "unmodeled"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["dummy_factors"] = {str(k): v for k, v in self.dummy_factors.items()}
        out["permutation_variants"] = {str(k): v for k, v in self.permutation_variants.items()}
        out["cpi_configurations"] = str(self.cpi_configurations)
        return out


def complexity_estimates(design) -> ComplexityReport:
    """
    Per element 2^d (d = inputs added after mapping) and 2*s! (s = width);
    globally log2 C(n_r, n_o) and C(p, r) for the CPI choice.
    """
    dummy, perms = {}, {}
    for e in design.table_elements():
        clut = getattr(e, "clut", e)
        dummy[e.id] = 2 ** (clut.width - clut.base_width)
        perms[e.id] = 2 * math.factorial(clut.width)
    choices = math.comb(design.n_r, design.n_o)
    cpi = math.comb(design.cpi_candidates, len(design.cpis))
    return ComplexityReport(dummy, perms, math.log2(choices) if choices else 0.0,
                            cpi, math.log2(cpi) if cpi else 0.0)


def cell_count(g: Hypergraph) -> int:
    return sum(1 for v in g.vertices.values() if v.kind not in (Kind.PI, Kind.PO))


def gate_overhead(original: Hypergraph, expanded: Hypergraph) -> float:
    """Cells of the gate-level redacted design per original cell."""
    base = cell_count(original)
    if base == 0:
        raise DomainError("original design has no cells")
    return cell_count(expanded) / base


# -------------------------------------------------------------------
# Report
# -------------------------------------------------------------------

@dataclass
class MetricsReport:
    version: str = SIMILARITY_VERSION
    function_counts: Dict[str, Dict[str, int]] = field(default_factory=dict)
    function_space: Dict[str, Dict[str, int]] = field(default_factory=dict)
    bitstream_bits: Dict[str, int] = field(default_factory=dict)
    tdi: Optional[TdiReport] = None
    similarity_labels: List[str] = field(default_factory=list)
    similarity: List[List[float]] = field(default_factory=list)
    complexity: Dict[str, dict] = field(default_factory=dict)
    overhead: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "function_counts": self.function_counts,
            "function_space": self.function_space,
            "bitstream_bits": self.bitstream_bits,
            "tdi": self.tdi.to_dict() if self.tdi else None,
            "similarity": {"labels": self.similarity_labels, "matrix": self.similarity},
            "complexity": self.complexity,
            "overhead": self.overhead,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def rows(self) -> List[Dict[str, object]]:
        """Long-form rows: section, row, column, value."""
        out = []
        for label, counts in sorted(self.function_counts.items()):
            for width, n in sorted(counts.items()):
                out.append({"section": "unique_functions", "row": label, "column": width, "value": n})
        for label, bits in sorted(self.bitstream_bits.items()):
            out.append({"section": "bitstream_bits", "row": label, "column": "", "value": bits})
        if self.tdi:
            for i, (kind, name) in enumerate(self.tdi.samples):
                row = f"{kind}:{name}"
                out.append({"section": "tdi_s", "row": row, "column": "original", "value": self.tdi.original[i]})
                for label, scores in self.tdi.variants.items():
                    out.append({"section": "tdi_s", "row": row, "column": label, "value": scores[i]})
            for pair, n in self.tdi.matches.items():
                out.append({"section": "tdi_s_matches", "row": pair, "column": "", "value": n})
        for i, a in enumerate(self.similarity_labels):
            for j, b in enumerate(self.similarity_labels):
                out.append({"section": "similarity", "row": a, "column": b,
                            "value": round(self.similarity[i][j], 6)})
        for label, value in sorted(self.overhead.items()):
            out.append({"section": "gate_overhead", "row": label, "column": "", "value": round(value, 6)})
        return out

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.DictWriter(stream, fieldnames=["section", "row", "column", "value"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows())
