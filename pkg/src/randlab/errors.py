"""Exception hierarchy shared by all randlab modules."""


class RandlabError(Exception):
    """Base class for every error raised by randlab."""


class DepthExceededError(RandlabError):
    """A string longer than a measure's depth cap was evaluated."""


class ZeroConditionError(RandlabError):
    """Conditioning on a cylinder of zero marginal mass."""


class NonMonotoneTableError(RandlabError):
    pass


class EpsilonRangeError(RandlabError):
    pass


class NegativeValueError(RandlabError):
    pass


class NotMonotoneError(RandlabError):
    """An approximation scheme's g failed strict monotonicity."""


class NonOverlappingError(RandlabError):
    pass


class NoValidIndexError(RandlabError):
    pass


class PreconditionError(RandlabError):
    pass


class FormatError(RandlabError):
    """Malformed input file or field."""
