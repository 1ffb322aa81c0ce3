"""Exception types shared across the package."""


class HStarError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrix(HStarError):
    pass


class NotFullDimensional(HStarError):
    pass


class DegenerateInput(HStarError):
    pass


class NonGeneric(HStarError):
    """A point that should be generic lies on a spanned hyperplane."""


class OutsideCone(HStarError):
    pass


class WrongCorank(HStarError):
    pass


class GenericSearchFailed(HStarError):
    pass


class ExhaustedRetries(HStarError):
    pass


class InternalError(HStarError):
    pass
