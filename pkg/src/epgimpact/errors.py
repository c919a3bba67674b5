"""Exception hierarchy shared by every module of the package."""


class EpgError(Exception):
    """Base class for all errors raised by epgimpact."""


# graph construction

class NegativeWeight(EpgError, ValueError):
    pass


class SealedGraph(EpgError):
    pass


class ForwardEdgeViolation(EpgError, ValueError):
    pass


class UnknownNode(EpgError, IndexError):
    pass


# task/channel builder

class ChannelRewrite(EpgError):
    pass


class UnknownChannel(EpgError, KeyError):
    pass


class SealedEpoch(EpgError):
    pass


# macroblock model

class OutOfGrid(EpgError, ValueError):
    pass


class InvalidPartition(EpgError, ValueError):
    pass


class RefCrossesIdr(EpgError):
    pass


class NonScanlineOrder(EpgError):
    pass


class GridMismatch(EpgError):
    pass


# trace files

class TraceError(EpgError):
    """Trace validation failure; ``lineno`` is 1-based, or None for in-memory records."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class TraceSyntaxError(TraceError):
    pass


class SchemaViolation(TraceError):
    pass


class OrderViolation(TraceError):
    pass


class InvalidParams(EpgError, ValueError):
    pass


# fault simulation

class InvalidProbability(EpgError, ValueError):
    pass


class ReportError(EpgError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
