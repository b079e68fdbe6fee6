"""Exception hierarchy shared by the solvers and the CLI."""


class GoodwillError(Exception):
    """Base class for all solver errors."""

    exit_code = 1


class ConfigError(GoodwillError):
    exit_code = 2


class StabilityViolation(GoodwillError):
    """The renewal integral of R*D is not below one."""

    exit_code = 3


class NoConvergence(GoodwillError):
    """The sweep hit its iteration cap; ``report`` holds the best iterate."""

    exit_code = 4

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NegativeControl(GoodwillError):
    pass


class InadmissibleControl(GoodwillError):
    pass


class NegativeState(GoodwillError):
    pass


class SingularState(GoodwillError):
    pass


class CflViolation(GoodwillError):
    pass


class SingularStep(GoodwillError):
    pass
