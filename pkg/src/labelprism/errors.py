"""Exception and warning types shared across the package."""


class LabelPrismError(Exception):
    """Base class for all errors raised by this package."""


class GraphInputError(LabelPrismError):
    """Invalid graph, document, or file content (CLI exit code 1)."""


class NumericalError(LabelPrismError):
    """Hard numerical failure inside a solver (CLI exit code 3)."""


class NumericalWarning(RuntimeWarning):
    """Non-fatal numerical issue, e.g. an iterative solve hitting its cap."""
