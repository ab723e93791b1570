"""Exception types shared across the package.

``ModelError`` subclasses are numeric/model failures (CLI exit 3);
``ParseError`` is a scenario-file diagnostic (CLI exit 2).
"""


class ModelError(Exception):
    """Base class for numeric and model-assumption failures."""


class SingularMatrix(ModelError):
    pass


class EmptyNetwork(ModelError):
    pass


class DegenerateDivider(ModelError):
    pass


class DegenerateDenominator(ModelError):
    pass


class AsymmetricTerminals(ModelError):
    pass


class ZeroBaseline(ModelError):
    pass


class GeometryViolation(ModelError):
    pass


class IndexOutOfRange(ModelError, IndexError):
    pass


class ArityMismatch(ValueError):
    pass


PARSE_ERROR_KINDS = (
    "UnknownSection",
    "UnknownKey",
    "DuplicateKey",
    "MissingKey",
    "BadNumber",
    "MissingSection",
    "NegativeValue",
)


class ParseError(Exception):
    def __init__(self, line: int, column: int, kind: str, message: str):
        if kind not in PARSE_ERROR_KINDS:
            raise ValueError(f"unknown parse error kind {kind!r}")
        self.line = line
        self.column = column
        self.kind = kind
        self.message = message
        super().__init__(f"{line}:{column}: {kind}: {message}")
