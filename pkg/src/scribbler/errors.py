class ScribbleError(Exception):
    """Base class for errors raised by scribbler."""


class ParameterError(ScribbleError, ValueError):
    """An argument is outside its valid range or shapes do not agree."""


class ImageFormatError(ScribbleError):
    """The input file is not a PNG or JPEG image."""
