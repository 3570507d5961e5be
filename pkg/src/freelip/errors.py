"""Exception types.  Each carries the witness of the violated condition."""

from __future__ import annotations


class FreeLipError(Exception):
    """Base class for all library errors."""


class InputError(FreeLipError):
    """Malformed input (schema, file, parse).  CLI exit code 2."""


class NotSymmetric(FreeLipError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"dist[{i}][{j}] != dist[{j}][{i}]")


class NegativeOrZeroOffDiagonal(FreeLipError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"dist[{i}][{j}] must be positive for distinct points")


class NonzeroDiagonal(FreeLipError):
    def __init__(self, i):
        self.index = i
        super().__init__(f"dist[{i}][{i}] must be zero")


class TriangleViolation(FreeLipError):
    def __init__(self, i, j, k):
        self.triple = (i, j, k)
        super().__init__(f"d({i},{j}) > d({i},{k}) + d({k},{j})")


class UnknownBase(FreeLipError):
    def __init__(self, base):
        self.base = base
        super().__init__(f"base point {base!r} is not a label")


class AlphaOutOfRange(FreeLipError):
    pass


class UnknownLabel(FreeLipError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"unknown label {label!r}")


class EqualPoints(FreeLipError):
    pass


class SpaceMismatch(FreeLipError):
    pass


class SolverFailure(FreeLipError):
    pass


class NotALineSpace(FreeLipError):
    pass


class PartialConstantExceedsL(FreeLipError):
    def __init__(self, pair, ratio, bound):
        self.pair, self.ratio, self.bound = pair, ratio, bound
        super().__init__(f"partial slope {ratio} on {pair} exceeds L={bound}")


class NotMonotone(FreeLipError):
    pass


class ModuliHypothesisViolated(FreeLipError):
    def __init__(self, pair, detail=""):
        self.pair = pair
        super().__init__(f"modulus inequality fails on pair {pair}: {detail}")


class OverlappingIntervals(FreeLipError):
    pass


class BaseNotPreserved(FreeLipError):
    pass


class NotComposable(FreeLipError):
    pass


class StageTooLarge(FreeLipError):
    pass


class WidthOverflow(FreeLipError):
    pass


class DimensionTooLargeForExact(FreeLipError):
    pass
