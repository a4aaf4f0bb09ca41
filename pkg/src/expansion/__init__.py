"""
Gate-level expansion of fabric elements into MUX trees fed by config registers.
"""
from expansion.expander_factory import ElementExpander, ExpanderFactory, expand_design, expand_to_gates

__all__ = ["ElementExpander", "ExpanderFactory", "expand_design", "expand_to_gates"]
