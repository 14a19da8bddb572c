"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions."""


class TooLargeError(ValueError):
    """An exact enumeration would exceed its configured size cap."""


class RetryExhaustedError(RuntimeError):
    """A rejection sampler ran out of attempts."""


class NotGraphicalError(InvalidInputError, RetryExhaustedError):
    # No simple realization exists, so no number of attempts could succeed.
    pass
