"""
Exact contact Kirby calculus: Legendrian fronts, contact (+-1)-surgery
diagrams, the standard moves at matrix and diagram level, the d3 and delta
invariants, and twist-word certificates.
"""

from kirby.descriptors import MoveDescriptor, MoveTag, Window, parse_descriptor, parse_window
from kirby.errors import KirbyError
from kirby.front import FrontDiagram, parse_front
from kirby.invariants import d3_surg, delta
from kirby.surgery import LinkingData, SurgeryDiagram, linking_data, parse_surgery

__all__ = [
    "FrontDiagram",
    "KirbyError",
    "LinkingData",
    "MoveDescriptor",
    "MoveTag",
    "SurgeryDiagram",
    "Window",
    "d3_surg",
    "delta",
    "linking_data",
    "parse_descriptor",
    "parse_front",
    "parse_surgery",
    "parse_window",
]
