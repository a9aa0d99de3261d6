"""Exception hierarchy shared by all ringedcore modules."""


class RingedCoreError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(RingedCoreError):
    pass


class UnknownPoint(RingedCoreError):
    pass


class SearchCapExceeded(RingedCoreError):
    """An enumeration would exceed its explicit cap; fail loudly, never hang."""


class AxiomError(RingedCoreError):
    """A ring/module table failed its exhaustive axiom check on construction."""


class NotAHom(RingedCoreError):
    pass


class NonCommutingDiagram(RingedCoreError):
    pass


class NotOpen(RingedCoreError):
    pass


class PreconditionViolated(RingedCoreError):
    pass


class MismatchedSpaces(RingedCoreError):
    pass


class NotT0(RingedCoreError):
    pass


class NotABeatPoint(RingedCoreError):
    pass


class NotOpenCoverMember(RingedCoreError):
    pass


class NotThinner(RingedCoreError):
    pass


class ParseError(RingedCoreError):
    pass


class UnknownSheaf(RingedCoreError):
    pass
