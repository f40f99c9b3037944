"""Exception taxonomy shared by all solver layers."""


class HzgsvdError(Exception):
    """Base class for solver errors."""


class FileFormatError(HzgsvdError):
    """Matrix file and its sidecar disagree, or the sidecar is malformed."""


class RankError(HzgsvdError):
    """The input pair is numerically rank deficient (zero column, failed
    factorization, or vanishing triangular diagonal)."""


class NotPositiveDefiniteError(RankError):
    """A Cholesky pivot was non-positive or non-finite."""


class ProtocolError(HzgsvdError):
    """A simulated stripe exchange saw a missing or duplicate message tag,
    which indicates a broken communication mapping."""
