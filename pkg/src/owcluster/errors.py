"""Exception types raised by the toolkit.

Every error carries enough positional context (row/column indices, cluster
ids) to be actionable from the CLI without a debugger.
"""

from __future__ import annotations


class OwclusterError(Exception):
    """Base class for all toolkit errors."""


class EmptyMatrix(OwclusterError):
    pass


class NonFiniteValue(OwclusterError):
    def __init__(self, row: int, col: int):
        self.row = int(row)
        self.col = int(col)
        super().__init__(f"non-finite value at ({self.row}, {self.col})")


class DimensionMismatch(OwclusterError):
    pass


class GeodesicNotPointwise(OwclusterError):
    def __init__(self):
        super().__init__(
            "geodesic distance is defined on a neighbor graph, not on a pair "
            "of vectors; build a KnnGraph and use geodesic_distance_matrix"
        )


class KTooLarge(OwclusterError):
    pass


class KOutOfRange(OwclusterError):
    pass


class ZeroRow(OwclusterError):
    def __init__(self, row: int):
        self.row = int(row)
        super().__init__(f"row {self.row} is a zero vector and has no direction")


class DimsTooLarge(OwclusterError):
    pass


class PerplexityTooLarge(OwclusterError):
    pass


class SingleCluster(OwclusterError):
    pass


class DegenerateAllPoints(OwclusterError):
    pass


class CoincidentCentroids(OwclusterError):
    def __init__(self, i: int, j: int):
        self.i = int(i)
        self.j = int(j)
        super().__init__(f"centroids {self.i} and {self.j} coincide")


class LengthMismatch(OwclusterError):
    pass


class BadRange(OwclusterError):
    pass


class BudgetTooSmall(OwclusterError):
    pass


class BadPercentile(OwclusterError):
    pass


class GraphNotSymmetrized(OwclusterError):
    pass


class GraphDisconnected(OwclusterError):
    pass


class BadMagic(OwclusterError):
    pass


class VersionUnsupported(OwclusterError):
    pass


class TruncatedFile(OwclusterError):
    pass


class CsvParse(OwclusterError):
    def __init__(self, row: int, col: int, detail: str = ""):
        self.row = int(row)
        self.col = int(col)
        msg = f"cannot parse CSV cell at row {self.row}, column {self.col}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class StageError(OwclusterError):
    """Wraps an error with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
