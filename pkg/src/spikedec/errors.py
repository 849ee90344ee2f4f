"""Exception types shared across the toolkit."""


class SpikedecError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SpikedecError):
    """A binary file is malformed (bad magic, truncated body, wrong version)."""


class ValidationError(SpikedecError):
    """A value violates a declared domain invariant."""


class ShapeError(SpikedecError):
    """Array/tensor shapes or dimensionalities are incompatible."""


class MathError(SpikedecError):
    """A numeric operation is undefined for the given input (zero norm, non-finite drive)."""


class TrainingError(SpikedecError):
    """Training diverged or could not proceed."""


class ConfigError(SpikedecError):
    """An experiment configuration is inconsistent or incomplete."""
