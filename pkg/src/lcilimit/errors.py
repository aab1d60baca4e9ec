"""Exception hierarchy. Every error raised on bad input derives from ``LciError``."""


class LciError(ValueError):
    pass


class NonPositiveMass(LciError):
    pass


class NotNormalized(LciError):
    pass


class TooShort(LciError):
    pass


class AlphabetMismatch(LciError):
    pass


class TooLarge(LciError):
    pass


class BadComposition(LciError):
    pass


class NotOnto(LciError):
    pass


class TooManyBlocks(LciError):
    pass


class InadmissiblePair(LciError):
    pass


class GridTooLarge(LciError):
    pass


class EmptyGrid(LciError):
    pass


class WrongCase(LciError):
    pass


class NoValidCut(LciError):
    pass


class BadPerturbation(LciError):
    pass


class PointNotInJ(LciError):
    pass


class PointNotInK(LciError):
    pass


class EmptySample(LciError):
    pass


class LpFailure(RuntimeError):
    pass


class InconsistentSpan(RuntimeError):
    """The (s, t) pair does not span the all-ones vector on I."""


class InconsistentAnalysis(RuntimeError):
    """Two independent routes to the same analysis quantity disagree."""


class BoxEscape(RuntimeError):
    """The LP optimum kept growing with the box: the functional is unbounded."""
