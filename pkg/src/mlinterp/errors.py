"""Exception hierarchy shared by every module."""


class WorkbenchError(ValueError):
    """Base class; the CLI maps every subclass to exit status 2."""


class EmptySpace(WorkbenchError):
    pass


class NonpositiveWeight(WorkbenchError):
    pass


class SpaceMismatch(WorkbenchError):
    pass


class InvalidSubset(WorkbenchError):
    pass


class ExponentOutOfRange(WorkbenchError):
    pass


class SlotOutOfRange(WorkbenchError):
    pass


class KernelShapeError(WorkbenchError):
    pass


class SumNotOne(WorkbenchError):
    pass


class EntryAboveOne(WorkbenchError):
    pass


class TwoNonpositive(WorkbenchError):
    pass


class LengthMismatch(WorkbenchError):
    pass


class DegenerateHull(WorkbenchError):
    pass


class EmptySet(WorkbenchError):
    pass


class SpaceTooLarge(WorkbenchError):
    pass


class NotGoodTuple(WorkbenchError):
    pass


class CombinationMismatch(WorkbenchError):
    pass


class EpsilonTooLarge(WorkbenchError):
    pass


class GridTooSmall(WorkbenchError):
    pass


class ConfigInvalid(WorkbenchError):
    pass


class GeometryMissing(WorkbenchError):
    pass
