"""Exceptions shared across the analysis layers."""


class CfcmError(Exception):
    """Base class for all library errors."""


class GraphError(CfcmError):
    """Malformed graph construction or query (unknown vertex, bad split set)."""


class ModelStructureError(CfcmError):
    """A model violates its structural invariants badly enough to stop evaluation."""


class InconsistentModel(CfcmError):
    """The model admits no solution on average: its distribution is undefined."""


class ZeroProbabilityCondition(CfcmError):
    """Conditioning event has probability zero."""
