"""Exception hierarchy.

Every error that points at a concrete counterexample carries it in
``witness`` so callers (and the CLI) can report it verbatim.
"""

from __future__ import annotations


class OrderError(ValueError):
    """Base class for all library errors."""

    def __init__(self, message: str = "", witness: tuple = ()):
        self.witness = tuple(witness)
        if witness and message:
            message = f"{message}: {', '.join(map(_fmt, witness))}"
        super().__init__(message or type(self).__name__)


def _fmt(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(map(str, x)) + ")"
    return str(x)


class UnknownElement(OrderError):
    pass


class PreconditionError(OrderError):
    pass


# -- certification -----------------------------------------------------------

class CertificationError(OrderError):
    pass


class NotTotal(CertificationError):
    pass


class NotCommutative(CertificationError):
    pass


class NotAssociative(CertificationError):
    pass


class NotIdempotent(CertificationError):
    pass


class NoMinimum(CertificationError):
    pass


class NoMaximum(CertificationError):
    pass


class NotPartialOrder(CertificationError):
    pass


class NoMeet(CertificationError):
    pass


class NotAbsorptive(CertificationError):
    pass


class NotDistributive(CertificationError):
    pass


class NotMeetClosed(CertificationError):
    pass


class NotJoinClosed(CertificationError):
    pass


class NotConvex(OrderError):
    pass


class MalformedTree(CertificationError):
    pass


# -- duality / sigma-discrete --------------------------------------------------

class NotSeparable(PreconditionError):
    pass


class NotBelow(PreconditionError):
    pass


class InfinityNotAllowed(PreconditionError):
    pass


class NotSubsemilattice(OrderError):
    pass


class SizeOverflow(OrderError):
    pass


class RoundTripFailure(OrderError):
    """Raised only when an implementation invariant is broken."""


class NonTermination(OrderError):
    """Raised only when an implementation invariant is broken."""


class DiscretenessViolation(OrderError):
    """Raised only when an implementation invariant is broken."""


# -- product leaps -------------------------------------------------------------

class NotDisjoint(PreconditionError):
    pass


class NoGatePoint(OrderError):
    pass


class NonConvergence(OrderError):
    pass


class FamilyViolation(OrderError):
    pass


class DegenerateFilterPair(PreconditionError):
    pass


class JumpChainInfeasible(OrderError):
    pass


class NoLeapFound(OrderError):
    pass


class CoverViolation(OrderError):
    pass


class LawViolation(OrderError):
    pass


class BoundViolation(OrderError):
    pass


class EmptySet(PreconditionError):
    pass


# -- io ----------------------------------------------------------------------------

class ParseError(OrderError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
