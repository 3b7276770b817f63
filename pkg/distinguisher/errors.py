"""
Exception hierarchy shared by the services and the CLI.
"""


class DistinguisherError(ValueError):
    """Base class for every input or parameter error raised by the package."""


class ShapeError(DistinguisherError):
    """Monoid values of different tags or payload shapes were mixed."""


class ConstructionError(DistinguisherError):
    """A sampler spec violates one of its invariants."""


class UniverseError(DistinguisherError):
    """A key lies outside the universe, or two universes do not match."""


class ParameterSpaceError(DistinguisherError):
    """Parameters out of range, or a seed space too large to enumerate."""


class InputFormatError(DistinguisherError):
    """A stream, matrix, graph or corpus file could not be parsed."""
