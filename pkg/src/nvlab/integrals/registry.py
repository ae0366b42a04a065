"""Region registry and evaluation entry points."""

from nvlab.errors import DomainError
from nvlab.integrals.planar import FullPlane, LargeFrequency, OutsideBall
from nvlab.integrals.region import Region
from nvlab.integrals.spec import IntegralSpec, IntegralValue, RegionKind
from nvlab.integrals.torus import InsideBall

REGIONS: dict[RegionKind, type[Region]] = {
    RegionKind.FULL: FullPlane,
    RegionKind.INSIDE: InsideBall,
    RegionKind.OUTSIDE: OutsideBall,
    RegionKind.LARGE_FREQ: LargeFrequency,
}


def create_region(spec: IntegralSpec) -> Region:
    """Instantiate the integrator for ``spec.region``."""
    return REGIONS[spec.region](spec)


def evaluate(spec: IntegralSpec, start_level: int = 0) -> IntegralValue:
    """Evaluate the integral described by ``spec`` with its error bookkeeping.

    Raises:
        ResolutionInsufficientError: If the a-posteriori estimate stays above 1% of |I|.
    """
    return create_region(spec).evaluate(start_level)


def _require(spec: IntegralSpec, kind: RegionKind) -> None:
    if spec.region is not kind:
        raise DomainError(f"expected region '{kind}', got '{spec.region}'")


def eval_I_full(spec: IntegralSpec) -> complex:
    """Whole-plane integral."""
    _require(spec, RegionKind.FULL)
    return evaluate(spec).value


def eval_I_inside(spec: IntegralSpec) -> complex:
    """Integral over the ball ``|xi| < 2 E^{1/2}``."""
    _require(spec, RegionKind.INSIDE)
    return evaluate(spec).value


def eval_I_outside(spec: IntegralSpec) -> complex:
    """Integral over the complement of the ball ``|xi| <= 2 E^{1/2}``."""
    _require(spec, RegionKind.OUTSIDE)
    return evaluate(spec).value


def eval_I_R(spec: IntegralSpec) -> complex:
    """Large-frequency integral with the cutoff ``psi_R``."""
    _require(spec, RegionKind.LARGE_FREQ)
    return evaluate(spec).value
