"""Exception types shared across the package."""


class SpectralIFSError(Exception):
    """Base class for all package errors."""


class InvalidTripleError(SpectralIFSError, ValueError):
    """Malformed (R, B, L) input: shapes, missing zero digit, size mismatch."""


class IndeterminateError(SpectralIFSError):
    """An eigenvalue sits too close to the unit circle to decide expansiveness."""


class NotExpansiveError(SpectralIFSError):
    pass


class NotRegularError(SpectralIFSError):
    """The R-orbit of B does not span R^d."""


class CapExceededError(SpectralIFSError):
    """An enumeration would exceed its configured size cap."""


class NotInLambdaError(SpectralIFSError):
    pass


class NotInDualLatticeError(SpectralIFSError):
    pass


class NotMinimalError(SpectralIFSError, ValueError):
    pass


class BasisNotClosedError(SpectralIFSError):
    pass


class BoxNotInvariantError(SpectralIFSError):
    pass


class OutOfRangeError(SpectralIFSError, ValueError):
    pass


class BadDyadicError(SpectralIFSError, ValueError):
    pass


class UnsupportedPError(SpectralIFSError, ValueError):
    pass
