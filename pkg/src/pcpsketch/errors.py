"""Exception and warning types shared across the package."""


class Error(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrixError(Error, ValueError):
    """Input is not a finite 2-D real matrix."""


class InvalidRankError(Error, ValueError):
    """Rank argument outside its admissible range."""


class DimensionError(Error, ValueError):
    """Operand shapes are incompatible."""


class ZeroMatrixError(Error, ValueError):
    """Operation undefined on the zero matrix."""


class InvalidInputError(Error, ValueError):
    """Scalar or structured argument outside its admissible range."""


class InvalidOverestimateError(Error, ValueError):
    """Supplied score overestimates fall below the true scores."""


class UnsupportedFamilyError(Error, ValueError):
    """Requested distribution family is not implemented."""


class TooLargeError(Error, ValueError):
    """Instance exceeds the size cap of an exhaustive routine."""


class ConfigError(Error, ValueError):
    """Malformed run configuration."""


class WidthNotReducingWarning(UserWarning):
    """Sketch width is at least the input width; sketch is built anyway."""
