"""Exception hierarchy shared across the package.

Every error the pipeline can surface maps to a distinct CLI exit code
(see cli.EXIT_CODES), so each condition gets its own class.
"""


class BdrError(Exception):
    """Base class for all package-specific errors."""


class ZeroColumn(BdrError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"sample column {index} has zero norm and cannot be normalized")


class SingularDegree(BdrError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"vertex {index} has (near-)zero degree; generalized mode undefined")


class InvalidSpec(BdrError):
    pass


class PositionOutOfRange(BdrError):
    pass


class UnsupportedCorruptionCombination(BdrError):
    pass


class AllOutliers(BdrError):
    def __init__(self):
        super().__init__("every vertex is isolated; nothing left after outlier removal")


class NoSparseCandidate(BdrError):
    pass


class NoFeasibleCandidate(BdrError):
    pass


class NoCandidates(BdrError):
    pass


class VerticalSegment(BdrError):
    def __init__(self):
        super().__init__("segment fit is vertical; slope undefined")


class LengthMismatch(BdrError):
    pass


class EmptyGraph(BdrError):
    def __init__(self):
        super().__init__("graph has zero total edge weight")


class ParseError(BdrError):
    pass
