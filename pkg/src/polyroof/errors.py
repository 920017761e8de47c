"""Exception types shared across the package."""


class PolyroofError(Exception):
    """Base class; the CLI maps each subclass to its own exit code."""


class RankError(PolyroofError):
    pass


class RangeError(PolyroofError):
    """A density matrix has support outside the two-dimensional range."""


class StructureError(PolyroofError):
    """The root structure does not match what the requested formula needs."""


class DegenerateError(PolyroofError):
    pass


class RayError(PolyroofError):
    pass
