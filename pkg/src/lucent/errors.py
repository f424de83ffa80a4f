"""Exception types shared across the toolkit."""

from __future__ import annotations


class LucentError(Exception):
    """Base class for all toolkit errors."""


class InvalidNetError(LucentError):
    """A net failed structural validation. Carries the full issue list."""

    def __init__(self, issues):
        self.issues = tuple(issues)
        super().__init__("; ".join(self.issues))


class UnknownNodeError(LucentError, KeyError):
    """A node name or id does not belong to the net at hand."""


class NotEnabledError(LucentError):
    """A transition was fired without being enabled.

    ``unmarked`` lists the empty pre-places, ``step`` the position inside a
    firing sequence (None for a single firing).
    """

    def __init__(self, transition, unmarked, step=None):
        self.transition = transition
        self.unmarked = tuple(unmarked)
        self.step = step
        where = "" if step is None else f" at step {step}"
        names = ", ".join(str(p) for p in self.unmarked)
        super().__init__(f"transition {transition} not enabled{where} (unmarked pre-places: {names})")


class CapExceededError(LucentError):
    """An enumeration hit its configured cap; results would be truncated."""


class IndeterminateError(LucentError):
    """A behavioural query cannot be answered from an incomplete state space."""


class NotTNetError(LucentError):
    """An operation restricted to T-nets was called on something else."""


class NoWitnessError(LucentError):
    """No token-free feeding path exists; signals a liveness violation."""


class NotCpSubnetError(LucentError):
    """A node set is not a CP-subnet. ``reason`` names the first violated clause."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


class ExhaustionError(LucentError):
    """The exhaustion algorithm could not make progress on a non-T-net."""


class NoShutdownError(LucentError):
    """No shutdown sequence was found for a CP-subnet; the input is not well-formed."""


class PropagationError(LucentError):
    """A propagation step failed its built-in perpetuality verification."""


class PreconditionError(LucentError):
    """A verification routine was called on a system outside its premises."""


class VerificationBugError(LucentError):
    """Two independent decision routes disagreed; aborts with diagnostics."""


class DslError(LucentError):
    """A net source file could not be parsed. Carries a 1-based line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")
