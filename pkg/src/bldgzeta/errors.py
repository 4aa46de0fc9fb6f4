"""Exception hierarchy.

Every error raised on a validation path derives from :class:`BldgZetaError`
and carries a stable machine-readable ``code`` (the class name) plus a dict of
details, which the CLI serializes verbatim.
"""


class BldgZetaError(Exception):
    """Base class for all library errors."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def code(self):
        return type(self).__name__

    def to_dict(self):
        return {"error": self.code, "message": self.message, "details": self.details}


class InvariantViolation(BldgZetaError):
    """An internal consistency check failed. This is a bug, not bad input."""


class MalformedDocument(BldgZetaError, ValueError):
    pass


class UsageError(BldgZetaError, ValueError):
    pass


# coxeter
class NonInvolutiveGenerator(BldgZetaError, ValueError):
    pass


class BraidRelationViolated(BldgZetaError, ValueError):
    pass


class UnsupportedCoxeterLabel(BldgZetaError, ValueError):
    pass


class UnsupportedCoxeterType(BldgZetaError, ValueError):
    pass


class NotInGroup(BldgZetaError, ValueError):
    pass


class InfiniteParabolic(BldgZetaError, ValueError):
    pass


class SingularParabolicSum(BldgZetaError, ArithmeticError):
    pass


class InvalidRepresentation(BldgZetaError, ValueError):
    pass


# cones
class DegenerateCone(BldgZetaError, ValueError):
    pass


class NotInCone(BldgZetaError, ValueError):
    pass


class NotInLattice(BldgZetaError, ValueError):
    pass


# chamber complexes
class NotBipartiteWithTypes(BldgZetaError, ValueError):
    pass


class IrregularGraph(BldgZetaError, ValueError):
    pass


class InvalidPosition(BldgZetaError, ValueError):
    pass


# polynomials
class DivisionByZeroPoly(BldgZetaError, ZeroDivisionError):
    pass


class NotExpandable(BldgZetaError, ValueError):
    pass


# cusps
class MalformedRay(BldgZetaError, ValueError):
    pass


class TypeMismatchAtAttachment(BldgZetaError, ValueError):
    pass


class TruncationTooShallow(BldgZetaError, ValueError):
    pass


class SingularFit(BldgZetaError, ArithmeticError):
    pass
