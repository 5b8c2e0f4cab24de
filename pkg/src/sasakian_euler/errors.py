"""Exception types shared across the package."""


class SingularEvaluation(ArithmeticError):
    """A jet or function was evaluated at a pole or branch point."""


class OrderUnsupported(ValueError):
    """More derivatives were requested than the jets carry."""


class OutsideDomain(ValueError):
    pass


class NearSingular(ValueError):
    """Metric condition number above the accepted threshold."""


class DegenerateSeed(ValueError):
    pass


class FrameInconsistent(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class BothParametersZero(ValueError):
    pass


class UnknownTag(KeyError):
    pass


class AxisPoint(SingularEvaluation):
    """Point on one of the two axis circles where Hopf angles are undefined."""
