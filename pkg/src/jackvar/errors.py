"""Exception hierarchy shared by all jackvar modules."""


class JackvarError(Exception):
    """Base class for every error raised by this package."""


class EmptySample(JackvarError, ValueError):
    pass


class NonFiniteValue(JackvarError, ValueError):
    pass


class SampleFileError(JackvarError, ValueError):
    pass


class OutOfRange(JackvarError, ValueError):
    pass


class TooFewSamples(JackvarError, ValueError):
    pass


class IndexOutOfRange(JackvarError, IndexError):
    pass


class NonFiniteResult(JackvarError, ArithmeticError):
    pass


class QuadratureFailure(JackvarError, ArithmeticError):
    pass


class InvalidB(JackvarError, ValueError):
    pass


class InvalidParams(JackvarError, ValueError):
    pass


class InsufficientMoments(JackvarError, ValueError):
    pass


class TooFewPoints(JackvarError, ValueError):
    pass


class ConfigError(JackvarError, ValueError):
    """A run configuration could not be accepted; ``key`` names the culprit."""

    def __init__(self, key, message=None):
        self.key = key
        super().__init__(message or key)


class UnknownKey(ConfigError):
    def __init__(self, key):
        super().__init__(key, f"unknown key {key!r}")


class MissingRequired(ConfigError):
    def __init__(self, key):
        super().__init__(key, f"missing required key {key!r}")


class TypeMismatch(ConfigError):
    def __init__(self, key, detail=""):
        msg = f"bad value for key {key!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(key, msg)
