"""Scribble art from images via progressive metaheuristic point selection."""

from .errors import ImageFormatError, ParameterError, ScribbleError

__version__ = "0.1.0"

__all__ = ["ImageFormatError", "ParameterError", "ScribbleError", "__version__"]
