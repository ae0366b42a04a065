"""Base class for region integrators."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

from nvlab.errors import ResolutionInsufficientError
from nvlab.integrals.spec import IntegralSpec, IntegralValue, RegionKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSum:
    """Raw result of one resolution level.

    Attributes:
        value: Quadrature value.
        abs_sum: Sum of the moduli of all weighted terms (sets the round-off floor).
        nodes: Number of integrand evaluations.
    """

    value: complex
    abs_sum: float
    nodes: int


class Region(ABC):
    """Abstract integrator for one region of the frequency plane.

    Subclasses implement :meth:`integrate` for a resolution level; the base
    class compares consecutive levels until the difference is below 1% of the
    value (or below the round-off floor).
    """

    kind: ClassVar[RegionKind]
    MAX_LEVEL: ClassVar[int] = 3
    RELATIVE_TARGET: ClassVar[float] = 0.01
    FLOOR_FACTOR: ClassVar[float] = 64 * 2.220446049250313e-16

    def __init__(self, spec: IntegralSpec) -> None:
        """Bind the integrator to an :class:`IntegralSpec`.

        Raises:
            ValueError: If ``spec`` names another region.
        """
        if spec.region is not self.kind:
            raise ValueError(
                f"{type(self).__name__} integrates region '{self.kind}', got '{spec.region}'"
            )
        self.spec = spec

    @abstractmethod
    def integrate(self, level: int) -> QuadratureSum:
        """Evaluate the integral at resolution ``level`` (0 = coarsest)."""
        pass

    def evaluate(self, start_level: int = 0) -> IntegralValue:
        """Evaluate with a-posteriori control.

        Raises:
            ResolutionInsufficientError: If ``MAX_LEVEL`` is reached without
                meeting the target.
        """
        previous = self.integrate(start_level)
        for level in range(start_level + 1, self.MAX_LEVEL + 1):
            current = self.integrate(level)
            err = abs(current.value - previous.value)
            floor = self.FLOOR_FACTOR * max(current.abs_sum, previous.abs_sum)
            logger.debug(
                "%s t=%.4g u=%s level=%d value=%.6g err=%.3g floor=%.3g nodes=%d",
                self.kind,
                self.spec.t,
                self.spec.u,
                level,
                abs(current.value),
                err,
                floor,
                current.nodes,
            )
            if err <= max(self.RELATIVE_TARGET * abs(current.value), 10.0 * floor):
                return IntegralValue(current.value, err, level, floor)
            previous = current
        raise ResolutionInsufficientError(
            f"{self.kind} integral at t={self.spec.t:g}, u={self.spec.u} did not converge: "
            f"a-posteriori error {err:.3g} exceeds 1% of |I| = {abs(current.value):.3g}",
            value=current.value,
            estimate=err,
        )
