"""Exception hierarchy shared by every module."""


class TreeCongruenceError(ValueError):
    """Base class for all errors raised by this package."""


class NewickError(TreeCongruenceError):
    """Malformed Newick input. ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class UnbalancedParentheses(NewickError):
    pass


class DuplicateLeafLabel(NewickError):
    pass


class EmptyLabel(NewickError):
    pass


class TrailingGarbage(NewickError):
    pass


class LeafNotFound(TreeCongruenceError):
    pass


class TooFewLeaves(TreeCongruenceError):
    pass


class InsufficientOverlap(TreeCongruenceError):
    pass


class LeafSetMismatch(TreeCongruenceError):
    pass


class NonBinaryInput(TreeCongruenceError):
    pass


class TooLarge(TreeCongruenceError):
    pass


class TooSmall(TreeCongruenceError):
    pass


class LengthMismatch(TreeCongruenceError):
    pass


class LabelSetMismatch(TreeCongruenceError):
    pass


class DegenerateTarget(TreeCongruenceError):
    pass


class DegenerateAllTies(TreeCongruenceError):
    pass


class ValueOutOfRange(TreeCongruenceError):
    pass
