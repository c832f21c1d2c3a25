"""Exceptions raised by edgeoffload.

None of these derive from ``ValueError``: pydantic validators raise them directly and
pydantic only wraps ``ValueError``/``AssertionError``, so callers see the domain class.
"""


class OffloadError(Exception):
    """Base class for every error raised by the package."""


class InvalidGraphError(OffloadError):
    pass


class IndexOutOfRange(InvalidGraphError):
    pass


class NegativeCost(InvalidGraphError):
    pass


class BothComputationCostsInfinite(InvalidGraphError):
    pass


class PinConflict(InvalidGraphError):
    pass


class PinViolation(OffloadError):
    pass


class NotInGroundSet(OffloadError):
    pass


class AlreadyInSet(OffloadError):
    pass


class GroundSetTooLarge(OffloadError):
    pass


class NotApplicable(OffloadError):
    pass


class FlowMismatch(OffloadError):
    pass


class EmptyGraph(OffloadError):
    pass


class SizeGuard(OffloadError):
    pass


class InvalidCutInstance(OffloadError):
    pass


class InvalidConfig(OffloadError):
    pass


class TooManyEdges(InvalidConfig):
    pass


class InstanceIOError(OffloadError):
    pass


class ParseError(InstanceIOError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SchemaError(InstanceIOError):
    def __init__(self, pointer: str, message: str = ""):
        super().__init__(f"{pointer}: {message}" if message else pointer)
        self.pointer = pointer


class EmptyGroundSet(OffloadError):
    pass
