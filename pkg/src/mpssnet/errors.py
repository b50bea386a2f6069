"""Exception hierarchy shared by the solver, the model builders and the CLI."""


class MpssError(Exception):
    """Base class for every error raised by mpssnet."""


class IterationLimitError(MpssError):
    """The simplex iteration cap was reached before a verdict."""


class ShapeMismatchError(MpssError, ValueError):
    pass


class InvalidProgramError(MpssError, ValueError):
    pass


class DegenerateDmuError(MpssError, ValueError):
    """The evaluated DMU has an all-zero output row in some subsystem."""


class AlphaOutOfRangeError(MpssError, ValueError):
    pass


class EpsilonNotUnitFractionError(MpssError, ValueError):
    pass


class UnclassifiableError(MpssError):
    """Classification was requested for a result without optimal solves."""


class DatasetError(MpssError, ValueError):
    """Dataset validation failed.

    ``violations`` holds one :class:`mpssnet.io.Violation` per offending
    cell or column, so callers can report all of them at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [str(v) for v in self.violations]
        super().__init__("; ".join(lines) if lines else "invalid dataset")

    @property
    def codes(self):
        return sorted({v.code for v in self.violations})
