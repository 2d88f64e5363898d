"""Exception hierarchy shared by all gframes modules."""


class GFrameError(Exception):
    """Base class for every error raised by gframes."""


class DimensionError(GFrameError, ValueError):
    """Shapes do not conform.

    ``index`` names the offending member or coefficient block when there
    is one.
    """

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class PreconditionError(GFrameError, ValueError):
    """Inputs are well-formed but violate a mathematical precondition.

    ``value`` carries the computed quantity that failed the check.
    """

    def __init__(self, msg, value=None):
        super().__init__(msg)
        self.value = value


class NotAGFrameError(PreconditionError):
    """The family's lower frame bound is not above tolerance."""

    def __init__(self, lower, threshold):
        super().__init__(
            f"family is not a g-frame: lower bound {lower:.3e} <= {threshold:.3e}",
            value=lower,
        )
        self.lower = lower
        self.threshold = threshold


class NotARieszSequenceError(PreconditionError):
    """The family's lower Riesz bound is not above tolerance."""

    def __init__(self, lower, threshold):
        super().__init__(
            f"family is not a g-Riesz sequence: lower bound {lower:.3e} <= {threshold:.3e}",
            value=lower,
        )
        self.lower = lower
        self.threshold = threshold


class DomainError(GFrameError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class NumericalError(GFrameError, ArithmeticError):
    """A numerical kernel failed or returned an unusable result."""


class NoExactTransitionError(NumericalError):
    """A least-squares operator solve left a residual above tolerance."""

    def __init__(self, residual, threshold):
        super().__init__(
            f"no exact solution: residual {residual:.3e} > {threshold:.3e}"
        )
        self.residual = residual
        self.threshold = threshold


class ConstructionError(GFrameError, RuntimeError):
    """A randomized builder exhausted its retry budget."""


class FormatError(GFrameError, ValueError):
    """A serialized family or spec is malformed."""
