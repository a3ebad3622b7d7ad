"""Exception hierarchy shared by all modules."""


class CurvDesignError(Exception):
    """Base class for every error raised by this package."""


class NonManifold(CurvDesignError):
    pass


class DegenerateFace(CurvDesignError):
    pass


class ParseError(CurvDesignError):
    pass


class DegenerateEdge(CurvDesignError):
    pass


class TriangleInequalityViolation(CurvDesignError):
    """Raised when edge lengths fail the triangle inequality on some face.

    The offending face indices are kept in ``faces``.
    """

    def __init__(self, message, faces=()):
        super().__init__(message)
        self.faces = tuple(int(f) for f in faces)


class InvalidMetric(TriangleInequalityViolation):
    pass


class NegativeEta(CurvDesignError):
    pass


class NoIntersection(CurvDesignError):
    pass


class DomainError(CurvDesignError):
    pass


class MissingTargets(CurvDesignError):
    pass


class ConfigError(CurvDesignError):
    pass
