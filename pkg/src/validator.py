# src/validator.py
from typing import List

from cones import topological_sort
from errors import NetlistError, UnsupportedArityError
from models import ARITY, FABRIC_KINDS, Kind
from netlist import Hypergraph


class NetlistValidator:
    """
    Class for validating the structural invariants of a hypergraph.
    """

    def __init__(self):
        self.last_error = ""

    def validate_structure(self, g: Hypergraph) -> bool:
        """
        Checks if the hypergraph is well formed.

        Args:
            g: graph produced by the netlist readers or by a pipeline stage.

        Returns:
            True if the graph is valid, False otherwise (see get_last_error).
        """
        try:
            self.check(g)
        except NetlistError as e:
            self.last_error = str(e)
            return False
        self.last_error = ""
        return True

    def check(self, g: Hypergraph) -> List[int]:
        """
        Raising companion of validate_structure.

        Returns:
            The topological order, which acyclicity checking computes anyway.
        """
        for vid in g:
            v = g.vertices[vid]
            low, high = ARITY[v.kind]
            if not low <= len(v.fanins) <= high:
                raise UnsupportedArityError(f"{v.kind} {v.name!r} has {len(v.fanins)} fanins, "
                                            f"expected {low}..{high}")
            if v.kind == Kind.TABLE and (v.bits is None or len(v.bits) != 1 << len(v.fanins)):
                raise NetlistError(f"table {v.name!r} needs {1 << len(v.fanins)} bits")
            if (v.kind in FABRIC_KINDS or v.kind == Kind.CFG) and v.element is None:
                raise NetlistError(f"{v.kind} {v.name!r} is not linked to a fabric element")
            if v.kind == Kind.CFG and v.index is None:
                raise NetlistError(f"config register {v.name!r} has no bit index")
            if v.kind == Kind.CSB and len(g.csb_registers(vid)) != 1:
                raise NetlistError(f"CSB {v.name!r} must drive exactly one register")
            if v.kind == Kind.DFF and v.element is not None:
                core = g.vertices[v.fanins[0]]
                if core.kind != Kind.CSB or core.element != v.element:
                    raise NetlistError(f"register {v.name!r} is not attached to CSB #{v.element}")
            if v.kind == Kind.PO and g.fanouts(vid):
                raise NetlistError(f"output port {v.name!r} cannot drive logic")

        for vid in g:
            for src in g.vertices[vid].fanins:
                if g.fanouts(src).count(vid) != g.vertices[vid].fanins.count(src):
                    raise NetlistError(f"fanout index out of sync at {g.vertices[src].name!r}")

        return topological_sort(g)

    def get_last_error(self) -> str:
        """Returns the last validation error message."""
        return getattr(self, 'last_error', "")
