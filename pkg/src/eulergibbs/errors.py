"""Exception hierarchy."""


class EulerGibbsError(Exception):
    pass


class GraphError(EulerGibbsError, ValueError):
    pass


class DuplicateEdgeId(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class OracleInconsistency(GraphError):
    pass


class ExhaustionUnavailable(GraphError):
    pass


class GraphFormatError(GraphError):
    """Malformed graph / counts / sequence file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class NotEulerianInput(GraphError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class RootUnreachable(GraphError):
    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class CapExceeded(EulerGibbsError):
    pass


class StackExhausted(EulerGibbsError):
    """The followed path ran out of stack before the requested length."""

    def __init__(self, message, sample=None, tainted=False):
        super().__init__(message)
        self.sample = sample
        self.tainted = tainted


class EmptySequence(EulerGibbsError, ValueError):
    pass


class NoEulerianEndpoint(GraphError):
    pass


class DisconnectedCounts(GraphError):
    pass


class InsufficientSamples(EulerGibbsError):
    pass
