"""Exception types shared across the library.

The extraction CLI maps these onto exit codes, so the hierarchy mirrors
the three failure families a run can hit: bad input material, a failing
separator stage, and signals too degenerate to align or scale.
"""


class LivevoxError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(LivevoxError):
    """Unreadable, malformed, or unsupported input data (CLI exit 2)."""


class SeparatorError(LivevoxError):
    """The separation stage failed or produced unusable output (CLI exit 3)."""


class DegenerateSignalError(LivevoxError):
    """Signal content too degenerate to process, e.g. all-silent stems,
    no usable analysis frames, or a shift that would empty a signal
    (CLI exit 4)."""
