class EmbedNormError(Exception):
    """
    Base error. Carries the CLI exit code and a human readable detail,
    the same pair an HTTP error carries as status and detail.
    """

    exit_code = 4

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class VerificationError(EmbedNormError):
    exit_code = 1


class InputError(EmbedNormError):
    exit_code = 2


class DomainError(InputError):
    """Argument outside the domain where a formula is defined."""


class UnsupportedPathError(InputError):
    """Computation requested on a path that does not support the exponent."""


class CapacityError(EmbedNormError):
    exit_code = 3


class InvariantBreach(EmbedNormError):
    exit_code = 4
