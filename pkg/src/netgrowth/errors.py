"""Exception hierarchy shared across the toolkit."""


class NetgrowthError(Exception):
    """Base class for all toolkit errors."""


# graph mutation errors ------------------------------------------------------

class GraphError(NetgrowthError):
    """Graph mutation error; carries a 1-based line number in trace context."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class UnknownNodeError(GraphError):
    pass


# trace parsing / classification errors --------------------------------------

class TraceError(NetgrowthError):
    """Trace-level error, optionally tagged with a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TraceSyntaxError(TraceError):
    pass


class DisconnectedNewNodeError(TraceError):
    """An edge introduces two unseen endpoints at once."""


class BothEndpointsNewError(DisconnectedNewNodeError):
    pass


# model errors ---------------------------------------------------------------

class ModelError(NetgrowthError):
    pass


class ModelSpecError(ModelError):
    pass


class InvalidModelError(ModelError):
    pass


class DuplicateComponentError(ModelError):
    pass


class EmptyChoiceSetError(ModelError):
    pass


# likelihood errors ----------------------------------------------------------

class LikelihoodError(NetgrowthError):
    pass


class ChosenNotInChoiceSetError(LikelihoodError):
    pass


class MismatchedTracesError(LikelihoodError):
    pass


class ZeroProbabilityError(LikelihoodError):
    """Raised where a per-choice ratio is requested but a choice had p = 0."""


# fitting errors -------------------------------------------------------------

class FitError(NetgrowthError):
    pass


class RankDeficientError(FitError):
    pass


class InsufficientRowsError(FitError):
    pass


class AllNonPositiveError(FitError):
    pass


# generator errors -----------------------------------------------------------

class GeneratorError(NetgrowthError):
    pass


class ExhaustedChoiceSetError(GeneratorError):
    pass


class DegenerateDistributionError(GeneratorError):
    pass
