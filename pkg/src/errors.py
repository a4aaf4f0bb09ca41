# src/errors.py
"""Exception hierarchy shared by every stage of the redaction tool.

Each exception carries the pipeline ``stage`` it belongs to; the CLI prints
``error: <stage>: <ExceptionClass>: <message>`` and maps the class to an exit code.
"""
from typing import List, Optional


class RedactorError(Exception):
    stage = "internal"


class NetlistError(RedactorError):
    stage = "netlist"


class NetlistSyntaxError(NetlistError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})" if line else message)


class UnsupportedArityError(NetlistError):
    pass


class UndrivenNetError(NetlistError):
    pass


class MultiplyDrivenNetError(NetlistError):
    pass


class CombinationalCycleError(NetlistError):
    def __init__(self, cycle: List[int], names: Optional[List[str]] = None):
        self.cycle = list(cycle)
        shown = names if names else [str(v) for v in cycle]
        super().__init__("combinational cycle: " + " -> ".join(shown))


class DomainError(RedactorError):
    stage = "query"


class FabricError(RedactorError):
    stage = "fabric"


class ParamsError(RedactorError):
    stage = "params"


class BitstreamError(RedactorError):
    stage = "bitstream"


class BitstreamFormatError(BitstreamError):
    pass


class SegmentMismatchError(BitstreamError):
    pass


class InterfaceMismatchError(RedactorError):
    stage = "verify"


class RedactorInternalError(RedactorError):
    """A pipeline self-check failed; the input was fine but the tool is wrong."""
    stage = "internal"
