"""Exception hierarchy shared by every module."""


class HyperdeckError(Exception):
    """Base class for all library errors."""


class ValidationError(HyperdeckError, ValueError):
    """Input data violates a structural invariant."""


class VertexOutOfRange(ValidationError):
    pass


class DegenerateEdge(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class MalformedIncidence(ValidationError):
    pass


class ColorCoverageError(ValidationError):
    pass


class CapExceeded(HyperdeckError):
    pass


class InvalidColoring(ValidationError):
    pass


class NotABijection(ValidationError):
    pass


class StructureValueError(ValidationError):
    pass


class NotFeynman(ValidationError):
    pass


class FixedPointInInvolution(ValidationError):
    pass


class GenusCapExceeded(ValidationError):
    pass


class SpecMismatch(ValidationError):
    pass


class EmptyHypergraph(ValidationError):
    pass


class SlotUnknown(ValidationError):
    pass


class ArityTooLargeForDeck(ValidationError):
    pass


class InconsistentDeck(ValidationError):
    pass


class IncoherentRule(ValidationError):
    pass


class MissingLabeling(ValidationError):
    pass
