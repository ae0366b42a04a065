"""Parameter and result types for the dispersive integrals."""

import cmath
import math
from dataclasses import dataclass, replace
from enum import StrEnum

from nvlab.errors import DomainError
from nvlab.integrals.bump import PROFILES


class RegionKind(StrEnum):
    """Integration region in the frequency plane."""

    FULL = "full"
    INSIDE = "in"
    OUTSIDE = "out"
    LARGE_FREQ = "largefreq"


@dataclass(frozen=True)
class IntegralSpec:
    """Parameters of ``I(t, u; E) = int |xi|^(alpha + i beta) e^{i t S(u, xi; E)} dxi``.

    The integral is understood in the Abel sense over the chosen region. Only
    positive energies are supported.

    Attributes:
        alpha: Smoothing exponent in [0, 1).
        beta: Imaginary power exponent.
        E: Energy, > 0.
        u: Linear phase parameter.
        t: Time, > 0.
        region: Integration region.
        cutoff_R: Inner radius of the large-frequency cutoff, > 2.
        profile: Cutoff profile name (see ``nvlab.integrals.bump.PROFILES``).
    """

    alpha: float = 0.0
    beta: float = 0.0
    E: float = 1.0
    u: complex = 0j
    t: float = 1.0
    region: RegionKind = RegionKind.FULL
    cutoff_R: float = 3.0
    profile: str = "bump"

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < 1.0):
            raise DomainError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not math.isfinite(self.beta):
            raise DomainError("beta must be finite")
        if not (math.isfinite(self.E) and self.E > 0):
            raise DomainError(f"E must be positive, got {self.E}")
        if not cmath.isfinite(complex(self.u)):
            raise DomainError("u must be finite")
        if not (math.isfinite(self.t) and self.t > 0):
            raise DomainError(f"t must be positive, got {self.t}")
        object.__setattr__(self, "u", complex(self.u))
        object.__setattr__(self, "region", RegionKind(self.region))
        if self.region is RegionKind.LARGE_FREQ and not self.cutoff_R > 2.0:
            raise DomainError(f"cutoff_R must exceed 2, got {self.cutoff_R}")
        if self.profile not in PROFILES:
            raise DomainError(
                f"unknown cutoff profile '{self.profile}'; available: {', '.join(PROFILES)}"
            )

    @property
    def gamma(self) -> complex:
        """Complex power ``alpha + i beta``."""
        return complex(self.alpha, self.beta)

    def with_t(self, t: float) -> "IntegralSpec":
        return replace(self, t=t)

    def with_u(self, u: complex) -> "IntegralSpec":
        return replace(self, u=complex(u))


@dataclass(frozen=True)
class IntegralValue:
    """Value of an integral with its accuracy bookkeeping.

    Attributes:
        value: Best value (finest level computed).
        apost_err: Difference between the last two resolution levels.
        level: Finest level used.
        floor: Round-off floor of the quadrature sum.
    """

    value: complex
    apost_err: float
    level: int
    floor: float

    @property
    def below_floor(self) -> bool:
        """True when |value| is indistinguishable from round-off."""
        return abs(self.value) <= 10.0 * self.floor
