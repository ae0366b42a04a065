"""Unbounded-region integrals on a deformed polar surface."""

import math

import numpy as np

from nvlab import stationary
from nvlab.integrals import bump
from nvlab.integrals.deformed import DeformedPolarQuadrature, LambdaPolarPhase, XiPolarPhase
from nvlab.integrals.region import QuadratureSum, Region
from nvlab.integrals.spec import RegionKind


class FullPlane(Region):
    """Whole-plane integral ``int |xi|^gamma e^{i t S(u, xi; E)} d xi`` at any energy."""

    kind = RegionKind.FULL

    def quadrature(self) -> DeformedPolarQuadrature:
        spec = self.spec
        return DeformedPolarQuadrature(
            XiPolarPhase(spec.u, spec.E),
            t=spec.t,
            gamma=spec.gamma,
            r_lo=0.0,
            breakpoints=stationary.critical_radii(spec.u, spec.E),
        )

    def integrate(self, level: int) -> QuadratureSum:
        return self.quadrature().integrate(level)


class OutsideBall(Region):
    """Integral over ``|xi| > 2 E^{1/2}`` in the variable ``xi = lam + 1/conj(lam)``, ``|lam| > 1``.

    The energy is scaled out first; the exterior critical point ``|lambda_0|``
    of the cubic with parameter ``-u/E`` is a radial breakpoint.
    """

    kind = RegionKind.OUTSIDE

    def _scaled(self) -> tuple[float, complex, complex]:
        spec = self.spec
        t0 = spec.E**1.5 * spec.t
        u0 = spec.u / spec.E
        factor = complex(np.exp(0.5 * (spec.gamma + 2.0) * math.log(spec.E)))
        return t0, u0, factor

    def quadrature(self) -> DeformedPolarQuadrature:
        t0, u0, _ = self._scaled()
        sps = stationary.stationary_set(-u0)
        breakpoints = [1.0]
        if sps.case_tag is stationary.CaseTag.EXTERIOR:
            breakpoints.append(abs(sps.lambdas[0]))
        return DeformedPolarQuadrature(
            LambdaPolarPhase(u0),
            t=t0,
            gamma=self.spec.gamma,
            r_lo=1.0,
            breakpoints=breakpoints,
        )

    def integrate(self, level: int) -> QuadratureSum:
        _, _, factor = self._scaled()
        raw = self.quadrature().integrate(level)
        return QuadratureSum(raw.value * factor, raw.abs_sum * abs(factor), raw.nodes)


class LargeFrequency(Region):
    """Integral of ``psi_R(|xi|) |xi|^gamma e^{i t S}`` with the cutoff switching on ``[R, R + 1]``.

    The radial deformation is switched off on the cutoff band edges, where the
    profile is only piecewise analytic.
    """

    kind = RegionKind.LARGE_FREQ

    def quadrature(self) -> DeformedPolarQuadrature:
        spec = self.spec
        R = spec.cutoff_R
        profile = spec.profile
        radii = [r for r in stationary.critical_radii(spec.u, spec.E) if r > R]
        return DeformedPolarQuadrature(
            XiPolarPhase(spec.u, spec.E),
            t=spec.t,
            gamma=spec.gamma,
            r_lo=R,
            breakpoints=[R + 1.0] + radii,
            cutoff=lambda radius, real_radius: bump.cutoff(radius, real_radius, R, profile),
            mobility=lambda r: bump.band_mobility(r, R),
            r_floor=R + 2.0,
        )

    def integrate(self, level: int) -> QuadratureSum:
        return self.quadrature().integrate(level)
