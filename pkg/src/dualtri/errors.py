"""Exception hierarchy shared by all modules."""


class DualtriError(Exception):
    """Base class for every error raised by the package."""


class MalformedInput(DualtriError):
    pass


class NonManifold(DualtriError):
    pass


class UnknownVertex(DualtriError, KeyError):
    pass


class ValidationError(DualtriError):
    """A structure violates one of its invariants.

    Parameters
    ----------
    message : str
        Human readable description.
    invariant : str, optional
        Short name of the violated invariant.
    simplex : tuple, optional
        ``(dimension, id)`` of the offending simplex, when there is one.
    """

    def __init__(self, message, invariant=None, simplex=None):
        super().__init__(message)
        self.invariant = invariant
        self.simplex = simplex


class MissingLength(ValidationError):
    pass


class MissingLocalLength(ValidationError):
    pass


class InvalidStructure(ValidationError):
    pass


class LoopObstruction(DualtriError):
    """Local lengths whose weight differences do not close up around a loop.

    Attributes
    ----------
    residual : float
        Absolute closure residual of the worst cycle.
    edge : int
        Non-tree edge closing the worst cycle.
    cycle : list of int
        Vertex ids along the cycle, first vertex repeated at the end.
    residuals : dict
        Residual for every non-tree edge.
    """

    def __init__(self, residual, edge, cycle, residuals):
        super().__init__(
            "loop property fails: residual %.17g on cycle %s through edge %d"
            % (residual, cycle, edge)
        )
        self.residual = residual
        self.edge = edge
        self.cycle = cycle
        self.residuals = residuals


class Degenerate(DualtriError):
    pass


class DegenerateHinge(Degenerate):
    pass


class DegenerateAngle(Degenerate):
    pass


class DegenerateFlip(Degenerate):
    pass


class NotFlippable(DualtriError):
    pass


class RequiresZeroWeights(DualtriError):
    pass


class SolverError(DualtriError):
    pass


class IncompatibleRHS(SolverError):
    pass


class SingularBeyondConstants(SolverError):
    pass


class NonpositiveDualVolume(SolverError):
    pass


class UnstableStep(SolverError):
    pass


class ParseError(DualtriError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = "line %d" % line
            if column is not None:
                where += ", column %d" % column
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class UnknownFixture(DualtriError, KeyError):
    pass
