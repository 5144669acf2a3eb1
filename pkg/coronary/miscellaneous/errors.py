"""Exceptions raised by the coronary analysis stages."""


class CoronaryError(RuntimeError):
    pass


class DegenerateGeometryError(CoronaryError, ValueError):
    pass


class InsufficientSupportError(CoronaryError):
    pass


class ClassificationError(CoronaryError):
    pass


class EmptyRoiError(CoronaryError):
    pass


class GridMismatchError(CoronaryError, ValueError):
    pass


class FormatError(CoronaryError, ValueError):
    """Malformed input file; offset is the byte position of the fault when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = '{} (byte offset {})'.format(message, offset)
        super().__init__(message)
        self.offset = offset


class VolumeFormatError(FormatError):
    pass


class CenterlineFormatError(FormatError):
    pass


class DegenerateSampleError(CoronaryError, ValueError):
    pass


class DivergenceError(CoronaryError):
    pass


class MissingFeatureError(CoronaryError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ''


class SplitError(CoronaryError, ValueError):
    pass


class PhantomSpecError(CoronaryError, ValueError):
    pass


class MissingInputError(CoronaryError, FileNotFoundError):
    pass
