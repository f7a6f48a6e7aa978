"""
Kirby Errors
Exception hierarchy shared by the front kernel, the move engine and the word rewriter
"""


class KirbyError(Exception):
    """Base class for every error raised by the engine."""


# --- Front parsing and validation ---
class FrontSyntaxError(KirbyError):
    pass


class FrontValidationError(KirbyError):
    pass


# --- Surgery decorations ---
class MissingOrientation(KirbyError):
    pass


class MissingCoefficient(KirbyError):
    pass


class ParityViolation(KirbyError):
    """Q(i,i) and r(i) disagree mod 2."""


# --- Linear algebra ---
class DimensionMismatch(KirbyError):
    pass


class NotSolvable(KirbyError):
    pass


class NotTorsion(NotSolvable):
    """Q x = r has no rational solution, so c1 is not torsion."""


class SingularBlock(KirbyError):
    pass


class RequiresAllMinus(KirbyError):
    pass


# --- Moves ---
class PatternMismatch(KirbyError):
    pass


class SupportViolation(KirbyError):
    pass


class CoefficientMismatch(KirbyError):
    pass


class BlockMismatch(KirbyError):
    pass


class HalfIntegerLinking(KirbyError):
    pass


class MoveIndexError(KirbyError, IndexError):
    pass


class CoherenceError(KirbyError):
    """Diagram-level result disagrees with the matrix-level transform."""


# --- Words and scripts ---
class RuleMismatch(KirbyError):
    pass


class UndeclaredFact(KirbyError):
    pass


class ScriptError(KirbyError):
    pass
