"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ItineraryError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(ItineraryError, ValueError):
    pass


class MissingFile(ItineraryError, FileNotFoundError):
    def __init__(self, path) -> None:
        super().__init__(f"missing file: {path}")
        self.path = path


class SchemaError(ItineraryError):
    """A CSV header does not match the expected columns."""


class RowError(ItineraryError):
    """A data row failed validation; ``line`` is the 1-based file line."""

    def __init__(self, path, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class UnknownCity(RowError):
    def __init__(self, path, line: int, city_id: str) -> None:
        super().__init__(path, line, f"unknown city_id {city_id!r}")
        self.city_id = city_id


class EmptyMatrix(ItineraryError):
    pass


class TooFewRows(ItineraryError):
    pass


class ConstantColumn(ItineraryError):
    def __init__(self, name: str) -> None:
        super().__init__(f"criterion {name!r} is constant")
        self.name = name


class SingularMatrix(ItineraryError):
    pass


class EigenFailure(ItineraryError):
    pass


class WeightMismatch(ItineraryError):
    pass


class EmptyCandidateSet(ItineraryError):
    pass


class TooManyCities(ItineraryError):
    pass
