"""Exception hierarchy shared by all charexp modules.

The CLI maps these onto exit codes: usage/parameter problems exit 1,
numerical failures exit 2, oracle disagreement exits 3.
"""


class CharexpError(Exception):
    """Base class for all charexp errors."""


class InvalidParametersError(CharexpError):
    """Equation parameters violate a standing assumption (B6 > 0, L >= 0, finite)."""


class LambdaDegenerateError(CharexpError):
    """The computational parameter lambda puts an exponent on (or too close to)
    a degenerate value; the caller should re-choose lambda."""


class IncompleteTableError(CharexpError):
    """A coefficient-table lookup fell outside the computed caps.

    Raised instead of silently truncating a sum.
    """


class IllConditionedSolveError(CharexpError):
    """The diagonal bracket of the connection-coefficient solve is too close to zero."""


class PrecisionExhaustedError(CharexpError):
    """A gamma-factor evaluation cannot be represented at the working precision."""


class InconsistencyError(CharexpError):
    """An internal cross-check failed beyond tolerance (signals upstream inaccuracy)."""


class AccuracyNotReachedError(CharexpError):
    """An adaptive computation hit its hard cap before meeting the accuracy target.

    The best available result is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
