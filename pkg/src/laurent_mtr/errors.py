"""Exception hierarchy shared by every module of the package."""


class LaurentMTRError(Exception):
    """Base class for all package errors."""


# dataset
class EmptyFile(LaurentMTRError):
    pass


class MissingColumn(LaurentMTRError):
    def __init__(self, name):
        super().__init__(f"missing column: {name!r}")
        self.name = name


class ParseError(LaurentMTRError):
    def __init__(self, row, col, value=None):
        super().__init__(f"cannot parse value {value!r} at row {row}, column {col!r}")
        self.row = row
        self.col = col


class TooFewRows(LaurentMTRError):
    pass


# model / symbolic / gradients
class NonPositiveInput(LaurentMTRError):
    pass


class ShapeMismatch(LaurentMTRError):
    pass


class UnknownFormat(LaurentMTRError):
    pass


# training
class NoGrowthWindow(LaurentMTRError):
    pass


class DivergenceDetected(LaurentMTRError):
    pass


class ConfigError(LaurentMTRError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


# metrics
class LengthMismatch(LaurentMTRError):
    pass


class EmptyInput(LaurentMTRError):
    pass


class AllExcluded(LaurentMTRError):
    pass


# baseline
class SingularSystem(LaurentMTRError):
    pass


# cli
class MissingArtifact(LaurentMTRError):
    pass
