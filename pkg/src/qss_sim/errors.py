"""Exception hierarchy shared by every layer of the simulator."""

from __future__ import annotations


class QSSError(Exception):
    """Base class for all simulator errors."""


class DuplicateLabel(QSSError, ValueError):
    pass


class UnknownLabel(QSSError, KeyError):
    pass


class SameLabel(QSSError, ValueError):
    pass


class LabelMismatch(QSSError, ValueError):
    pass


class ZeroProbabilityBranch(QSSError, ValueError):
    pass


class NoDefiniteBasis(QSSError, ValueError):
    """A single-qubit state is not an eigenstate of Z or X.

    Raised when Alice's deduced expectation has no basis to check in. Honest
    executions never reach this; hitting it means protocol logic is broken.
    """


class InvalidDistribution(QSSError, ValueError):
    pass


class PositionOutOfRange(QSSError, IndexError):
    pass


class EmptySample(QSSError, ValueError):
    pass


class ConfigError(QSSError, ValueError):
    """Invalid configuration. ``problems`` maps field name to diagnostic."""

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        detail = "; ".join(f"{k}: {v}" for k, v in self.problems.items())
        super().__init__(f"invalid configuration: {detail}")


class UnknownParameter(QSSError, ValueError):
    pass


class ProtocolAbort(QSSError):
    """The honest parties detected a problem and stopped.

    ``reason`` is an :class:`~qss_sim.protocol.AbortReason`; ``detail`` is a
    short free-form description (which round, how many errors, ...).
    """

    def __init__(self, reason, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)
