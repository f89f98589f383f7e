"""Typed errors shared across the package.

Every domain failure raises a subclass of :class:`SourceqError` so callers
(and the CLI) can distinguish domain failures from programming errors.
"""

from __future__ import annotations


class SourceqError(Exception):
    """Base class for all domain errors raised by this package."""


class UnknownScale(SourceqError):
    """A scale or source type id is not registered."""


class UnknownEntity(SourceqError):
    """An entity id does not resolve inside the equilibrium."""


class PerspectiveNotParty(SourceqError):
    """The perspective unit fills neither principal slot of a title."""


class UntitledSource(SourceqError):
    """The operation needs a TitleRecord and the source has none."""


class NoSourcesOfType(SourceqError):
    """A degree was requested for a unit with no sources of the type.

    Deliberately an error rather than a silent 0 or 1: the two situations
    "everything is external" and "there is nothing to measure" must not be
    conflated.
    """


class MissingBenchmark(SourceqError):
    """No benchmark entry exists for the (source type, segment) pair."""


class NoServices(SourceqError):
    """Service provision degrees requested for a unit with no service volume."""


class ScopeMismatch(SourceqError):
    """A transformation scope does not fit the equilibrium it is applied to."""


class StepPreconditionFailed(SourceqError):
    """A progression or plan step cannot be applied to the current state."""

    def __init__(self, reason: str, index: int | None = None):
        super().__init__(reason)
        self.reason = reason
        #: 1-based position of the failing step inside its progression, when known.
        self.index = index


class ProgressionHalted(SourceqError):
    """apply_progression stopped early; carries the partial trace."""

    def __init__(self, index: int, reason: str, equilibrium, trace):
        super().__init__(f"step {index} failed: {reason}")
        self.index = index
        self.reason = reason
        #: Last consistent snapshot, from just before the failing step.
        self.equilibrium = equilibrium
        self.trace = trace


class NotInvertible(SourceqError):
    """reverse() was asked to invert a step kind with no defined inverse."""


class InvalidStatus(SourceqError):
    """A plan execution state was driven from a terminal status."""


class TooLarge(SourceqError):
    """The interleaving oracle refused an input beyond its step budget."""


class InsufficientData(SourceqError):
    """Not enough observations for a statistical estimate."""


class PolicyExhausted(SourceqError):
    """The evolution policy found no legal transformation to perform."""
