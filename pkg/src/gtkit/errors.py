"""Shared exception types."""


class GtkitError(Exception):
    """Base class for errors raised by this package."""


class UnknownGeneratorError(GtkitError, ValueError):
    """A word used a generator outside the declared alphabet or hom domain."""


class NotMemberError(GtkitError, ValueError):
    """An element was expected to lie in a subgroup but does not."""


class NotTamedError(GtkitError, ValueError):
    """An operation requiring a tamed conjugate tuple received an untamed one."""


class PreconditionError(GtkitError, ValueError):
    """An operation's stated precondition was violated by the caller."""


class InternalInvariantError(GtkitError, RuntimeError):
    """A mathematically guaranteed invariant failed; indicates a bug."""
