"""Exception types raised by the solver."""


class ModelError(ValueError):
    """Base class for model-level errors (CLI exit code 1)."""


class OutOfRange(ModelError):
    def __init__(self, name, value, bounds):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value!r} outside {bounds}")


class RequiresLambdaOrder(ModelError):
    pass


class NegativeTime(ModelError):
    pass


class TargetAbovePrior(ModelError):
    pass


class StaticBelief(ModelError):
    pass


class NotApprovable(ModelError):
    pass


class ImmediateRegime(ModelError):
    pass


class HorizonExceeded(ModelError):
    pass


class HorizonTooShort(ModelError):
    pass


class MLRViolated(ModelError):
    def __init__(self, interval):
        self.interval = interval
        super().__init__(
            "survival ratio S_a/S_b is not strictly decreasing on "
            f"[{interval[0]:.6g}, {interval[1]:.6g}]"
        )


class InvalidRuleWarning(UserWarning):
    """A deadline that blocks approval; simulated as reject-forever."""
