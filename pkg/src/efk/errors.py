"""Exception hierarchy shared by all toolkit modules.

Every exception carries a stable ``exit_code`` so the command line layer
can map failures onto its documented status codes: 1 = input problem,
2 = non-convergence, 3 = degenerate spectrum, 4 = insufficient data.
"""


class EfkError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class MalformedRecord(EfkError):
    """A CSV row could not be parsed; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyInput(EfkError):
    """No usable data after parsing/filtering."""


class DuplicateSample(EfkError):
    """More than one GDP-per-capita value for the same (country, year)."""


class NonPositiveGdp(EfkError):
    """GDP per capita must be strictly positive (log scale downstream)."""


class EmptyMatrix(EfkError):
    """Binarization or noise left no surviving entries."""


class LengthMismatch(EfkError):
    """A score or label sequence does not align with the matrix axes."""


class UnknownEntity(EfkError):
    """A referenced country or product code is not present."""


class NotCurrentlyExported(EfkError):
    """A kept product is not currently exported by the country."""


class EntityMismatch(EfkError):
    """Two rankings do not cover the same entity set."""


class InvalidParameter(EfkError):
    """A parameter is outside the range its operation declares."""


class ZeroDenominator(EfkError):
    """A product with no exporters reached the fitness map."""


class NonConvergence(EfkError):
    """Fixed-point iteration hit max_iter without meeting either stop rule.

    The partially converged result is attached as ``result`` for
    inspection.
    """

    exit_code = 2

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class DegenerateSpectrum(EfkError):
    """The requested eigenvector is not uniquely defined."""

    exit_code = 3


class InsufficientAnalogues(EfkError):
    """Fewer neighbours than ``min_analogues``; ``found`` says how many."""

    exit_code = 4

    def __init__(self, message: str, found: int = 0):
        super().__init__(message)
        self.found = found
