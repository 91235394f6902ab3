"""Exception hierarchy. Each class maps to one CLI exit code."""


class FlatwallError(Exception):
    exit_code = 1

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def as_dict(self):
        d = {"code": type(self).__name__, "message": self.message}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


class InputError(FlatwallError):
    """Bad or invalid input data (validation failure)."""
    exit_code = 1


class NoPathError(InputError):
    pass


class UnsupportedError(InputError):
    """A configuration the artifact deliberately rejects."""
    pass


class UsageError(FlatwallError):
    exit_code = 2


class CapacityError(FlatwallError):
    """A desk-scale limit was exceeded. Never silently degraded."""
    exit_code = 3


class InternalError(FlatwallError):
    """A guaranteed property failed to hold. Always a bug, never repaired."""
    exit_code = 4
