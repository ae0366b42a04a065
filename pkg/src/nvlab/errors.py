"""Exception hierarchy shared by all nvlab modules."""

from pathlib import Path


class NVLabError(Exception):
    """Base class for every error raised on purpose by nvlab."""


class DomainError(NVLabError, ValueError):
    """An input lies outside the domain where a formula is defined.

    Raised for singular points of rational expressions, non-finite inputs and
    parameters outside their documented ranges.
    """


class ResolutionInsufficientError(NVLabError):
    """A quadrature did not reach its a-posteriori accuracy target.

    Attributes:
        value: Best available value of the integral.
        estimate: A-posteriori error estimate that failed the target.
    """

    def __init__(self, message: str, value: complex, estimate: float) -> None:
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class BlowUpReachedError(NVLabError):
    """The log-argument of an explicit solution has reached zero.

    Attributes:
        time: Time at which the denominator was found non-positive.
        denominator: Smallest denominator value seen.
    """

    def __init__(self, time: float, denominator: float) -> None:
        super().__init__(
            f"denominator {denominator:.6g} <= 0 at t={time:.6g}: solution has blown up"
        )
        self.time = time
        self.denominator = denominator


class InstabilityDetectedError(NVLabError):
    """The solver saw uncontrolled growth of the L2 norm.

    Attributes:
        time: Simulation time of the rejected step.
        growth: Ratio of L2 norms across the rejected step.
        blowup_suspected: True when halving the step did not remove the growth.
    """

    def __init__(self, time: float, growth: float, blowup_suspected: bool) -> None:
        kind = "blow-up suspected" if blowup_suspected else "unstable step"
        super().__init__(f"{kind} at t={time:.6g} (L2 growth x{growth:.3g})")
        self.time = time
        self.growth = growth
        self.blowup_suspected = blowup_suspected


class OutputError(NVLabError, OSError):
    """Writing or reading an artifact failed.

    Attributes:
        path: The file involved.
    """

    def __init__(self, path: Path | str, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = Path(path)
