"""Polar quadrature on a complex-deformed integration surface.

The phases used here are entire functions of polar coordinates ``(r, theta)``.
Shifting the real surface to ``(r + i eta_r, theta + i eta_theta)`` along the
normalized phase gradient gives the exponent a positive imaginary part away
from critical points, so ``e^{i t S}`` decays and the Abel-summed integral is
obtained on a bounded radial range. This is the two-dimensional analogue of a
steepest-descent contour (compare the deformed Talbot contour for inverse
Laplace transforms).

The deformation is

    eta_r     = kappa * m(r) * r * S_r / (g + g0)
    eta_theta = kappa * (S_theta / r) / (g + g0),    g = |(S_r, S_theta/r)|

so ``Im S ~ kappa r (m S_r^2 + (S_theta/r)^2)/(g + g0) >= 0``. The radial
mobility ``m`` vanishes where the amplitude is only piecewise analytic.
"""

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from nvlab.errors import ResolutionInsufficientError
from nvlab.integrals.region import QuadratureSum

logger = logging.getLogger(__name__)

DAMPING_CUTOFF = 40.0
DEFAULT_KAPPA = 0.2
MAX_SPLIT_DEPTH = 40
MAX_BACKOFFS = 4
GROWTH_LIMIT = 2.0

Mobility = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
Cutoff = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PhaseDerivatives:
    """Physical gradient ``(P, Q) = (S_r, S_theta / r)`` and its partials."""

    P: np.ndarray
    Q: np.ndarray
    P_r: np.ndarray
    P_t: np.ndarray
    Q_r: np.ndarray
    Q_t: np.ndarray


class PolarPhase(ABC):
    """A phase written in polar coordinates, entire in ``(r, theta)``.

    Attributes:
        g0: Gradient scale regularizing the deformation near critical points.
        length: Natural radial length scale.
    """

    g0: float = 1.0
    length: float = 1.0

    def __init__(self, u: complex) -> None:
        self.u = complex(u)

    def _linear(self, theta):
        u1, u2 = self.u.real, self.u.imag
        c, s = np.cos(theta), np.sin(theta)
        return u1 * c + u2 * s, -u1 * s + u2 * c

    @abstractmethod
    def value(self, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Phase at (complex) coordinates."""
        pass

    @abstractmethod
    def derivatives(self, r: np.ndarray, theta: np.ndarray) -> PhaseDerivatives:
        """Gradient and Hessian data at real coordinates."""
        pass

    @abstractmethod
    def amplitude(self, r: np.ndarray, gamma: complex) -> np.ndarray:
        """Amplitude times area element at (complex) radii."""
        pass

    @abstractmethod
    def gradient_lower_bound(self, r: float) -> float:
        """Lower bound of ``|(P, Q)|`` on the circle of radius ``r``."""
        pass


class XiPolarPhase(PolarPhase):
    """Full phase ``2 cos 3theta (r^3 - 3 E r) + r Re(conj(u) e^{i theta})``."""

    def __init__(self, u: complex, E: float) -> None:
        super().__init__(u)
        self.E = float(E)
        self.g0 = max(self.E, 1e-12)
        self.length = math.sqrt(self.E)

    def value(self, r, theta):
        b = self.u.real * np.cos(theta) + self.u.imag * np.sin(theta)
        return 2.0 * np.cos(3.0 * theta) * (r**3 - 3.0 * self.E * r) + r * b

    def derivatives(self, r, theta):
        E = self.E
        A = 2.0 * np.cos(3.0 * theta)
        A1 = -6.0 * np.sin(3.0 * theta)
        A2 = -18.0 * np.cos(3.0 * theta)
        b, b1 = self._linear(theta)
        r2 = r * r
        return PhaseDerivatives(
            P=A * (3.0 * r2 - 3.0 * E) + b,
            Q=A1 * (r2 - 3.0 * E) + b1,
            P_r=6.0 * A * r,
            P_t=A1 * (3.0 * r2 - 3.0 * E) + b1,
            Q_r=2.0 * A1 * r,
            Q_t=A2 * (r2 - 3.0 * E) - b,
        )

    def amplitude(self, r, gamma):
        return np.exp((gamma + 1.0) * np.log(r))

    def gradient_lower_bound(self, r):
        return 6.0 * (r * r - 3.0 * self.E) - 2.0 * abs(self.u)


class LambdaPolarPhase(PolarPhase):
    """Outer phase after ``xi = lam + 1/conj(lam)`` at unit energy.

    ``S = 2 cos 3theta (rho^3 + rho^-3) + (rho + 1/rho) Re(conj(u) e^{i theta})``
    with amplitude ``(rho^2 + 1)^gamma (rho^4 - 1) rho^(-gamma - 3)``.
    """

    def value(self, r, theta):
        b = self.u.real * np.cos(theta) + self.u.imag * np.sin(theta)
        return 2.0 * np.cos(3.0 * theta) * (r**3 + r**-3) + (r + 1.0 / r) * b

    def derivatives(self, r, theta):
        A = 2.0 * np.cos(3.0 * theta)
        A1 = -6.0 * np.sin(3.0 * theta)
        A2 = -18.0 * np.cos(3.0 * theta)
        b, b1 = self._linear(theta)
        r2 = r * r
        rm2, rm3, rm4, rm5 = r**-2, r**-3, r**-4, r**-5
        return PhaseDerivatives(
            P=A * (3.0 * r2 - 3.0 * rm4) + b * (1.0 - rm2),
            Q=A1 * (r2 + rm4) + b1 * (1.0 + rm2),
            P_r=A * (6.0 * r + 12.0 * rm5) + 2.0 * b * rm3,
            P_t=A1 * (3.0 * r2 - 3.0 * rm4) + b1 * (1.0 - rm2),
            Q_r=A1 * (2.0 * r - 4.0 * rm5) - 2.0 * b1 * rm3,
            Q_t=A2 * (r2 + rm4) - b * (1.0 + rm2),
        )

    def amplitude(self, r, gamma):
        return (
            np.exp(gamma * np.log(r * r + 1.0))
            * (r**4 - 1.0)
            * np.exp(-(gamma + 3.0) * np.log(r))
        )

    def gradient_lower_bound(self, r):
        return 6.0 * (r * r - 1.0) - 3.0 * abs(self.u)


@lru_cache(maxsize=16)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _pow2(n: float) -> int:
    return 1 << max(6, math.ceil(math.log2(max(n, 1.0))))


def graded_panels(points: Sequence[float], w0: float) -> list[tuple[float, float]]:
    """Split each interval between consecutive points into panels graded toward both ends.

    Panel widths start at ``w0`` at each end and double toward the midpoint.
    """
    panels = []
    for a, b in zip(points[:-1], points[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        w = min(w0, 0.25 * (b - a))
        left, x, step = [a], a, w
        while x + step < mid:
            x += step
            left.append(x)
            step *= 2.0
        right, x, step = [b], b, w
        while x - step > mid:
            x -= step
            right.append(x)
            step *= 2.0
        edges = left + [mid] + right[::-1]
        panels.extend(zip(edges[:-1], edges[1:]))
    return panels


class _Backoff(Exception):
    pass


@dataclass
class _Geometry:
    eta_r: np.ndarray
    eta_t: np.ndarray
    det: np.ndarray
    im_est: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    m: np.ndarray


class DeformedPolarQuadrature:
    """Quadrature of ``int amplitude(r) cutoff(r) e^{i t S(r, theta)} dr dtheta``.

    Radial Gauss-Legendre panels are graded toward the lower limit and every
    breakpoint (critical radii, cutoff band edges) and split further until the
    undamped radial phase change per panel is bounded; the angular trapezoid
    size follows the largest undamped angular phase rate.

    Args:
        phase: The phase and amplitude.
        t: Time (frequency of the exponential).
        gamma: Complex power passed to the amplitude.
        r_lo: Lower radial limit; the surface is pinned there.
        breakpoints: Radii to refine toward.
        cutoff: Optional multiplier ``cutoff(r_complex, r_real)``.
        mobility: Optional radial deformation weight ``mobility(r) -> (m, dm/dr)``.
        r_floor: Smallest admissible outer radius.
        kappa: Initial deformation strength.
    """

    def __init__(
        self,
        phase: PolarPhase,
        t: float,
        gamma: complex,
        r_lo: float,
        breakpoints: Sequence[float],
        cutoff: Cutoff | None = None,
        mobility: Mobility | None = None,
        r_floor: float = 0.0,
        kappa: float = DEFAULT_KAPPA,
    ) -> None:
        self.phase = phase
        self.t = float(t)
        self.gamma = complex(gamma)
        self.r_lo = float(r_lo)
        self.breakpoints = sorted(float(b) for b in breakpoints if b > r_lo)
        self.cutoff = cutoff
        self.mobility = mobility
        self.r_floor = r_floor
        self.kappa = kappa

    def integrate(self, level: int) -> QuadratureSum:
        """Integrate at resolution ``level``, halving kappa on exponential growth."""
        kappa = self.kappa
        for _ in range(MAX_BACKOFFS + 1):
            try:
                return self._integrate(level, kappa)
            except _Backoff:
                kappa *= 0.5
                logger.debug("deformation growth at t=%g; kappa -> %g", self.t, kappa)
        raise ResolutionInsufficientError(
            f"deformation could not be stabilized at t={self.t:g}", value=complex("nan"), estimate=math.inf
        )

    def _mobility(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.mobility is None:
            return np.ones_like(r), np.zeros_like(r)
        return self.mobility(r)

    def outer_radius(self, kappa: float) -> float:
        """Radius beyond which ``t Im S`` exceeds the damping cutoff everywhere."""
        scale = self.phase.length
        r = max([self.r_lo, self.r_floor] + self.breakpoints) + 0.5 * scale
        for _ in range(400):
            g = self.phase.gradient_lower_bound(r)
            m = float(self._mobility(np.array([r]))[0][0])
            if g >= self.phase.g0 and self.t * kappa * m * r * g / 2.0 >= DAMPING_CUTOFF:
                return r
            r *= 1.1
        raise ResolutionInsufficientError(
            f"no damping radius found at t={self.t:g}", value=complex("nan"), estimate=math.inf
        )

    def _geometry(self, r: np.ndarray, theta: np.ndarray, kappa: float) -> _Geometry:
        d = self.phase.derivatives(r, theta)
        m, dm = self._mobility(r)
        g = np.hypot(d.P, d.Q)
        safe = np.where(g > 0, g, 1.0)
        g_r = np.where(g > 0, (d.P * d.P_r + d.Q * d.Q_r) / safe, 0.0)
        g_t = np.where(g > 0, (d.P * d.P_t + d.Q * d.Q_t) / safe, 0.0)
        denom = g + self.phase.g0
        F = kappa / denom
        F_r = -kappa * g_r / denom**2
        F_t = -kappa * g_t / denom**2
        eta_r = F * m * r * d.P
        eta_t = F * d.Q
        a = F_r * m * r * d.P + F * (dm * r + m) * d.P + F * m * r * d.P_r
        b = F_t * m * r * d.P + F * m * r * d.P_t
        c = F_r * d.Q + F * d.Q_r
        e = F_t * d.Q + F * d.Q_t
        det = (1.0 + 1j * a) * (1.0 + 1j * e) + b * c
        im_est = F * r * (m * d.P * d.P + d.Q * d.Q)
        return _Geometry(eta_r, eta_t, det, im_est, d.P, d.Q, m)

    def _integrate(self, level: int, kappa: float) -> QuadratureSum:
        t = self.t
        phase = self.phase
        r_max = self.outer_radius(kappa)
        points = [self.r_lo] + [b for b in self.breakpoints if b < r_max] + [r_max]
        tau = t * phase.length**3
        w0 = 0.05 * phase.length / math.sqrt(1.0 + tau) / 2**level
        order = 20 + 8 * level
        x, w = _gauss_legendre(order)
        split_limit = 0.5 * order / (1.0 + 0.5 * level)
        n_trial = 1024 * 2**level

        stack = [(a, b, 0) for a, b in reversed(graded_panels(points, w0))]
        total = 0j
        abs_sum = 0.0
        nodes = 0
        panels = 0
        while stack:
            a, b, depth = stack.pop()
            r = (0.5 * (b - a) * x + 0.5 * (a + b))[:, None]
            wr = (0.5 * (b - a) * w)[:, None]
            theta = 2.0 * np.pi * np.arange(n_trial) / n_trial
            geo = self._geometry(r, theta[None, :], kappa)
            undamped = t * geo.im_est < DAMPING_CUTOFF
            omega_r, k_theta = self._rates(r, geo, undamped, kappa)
            if omega_r * (b - a) > split_limit and depth < MAX_SPLIT_DEPTH:
                mid = 0.5 * (a + b)
                stack.append((mid, b, depth + 1))
                stack.append((a, mid, depth + 1))
                continue
            n = _pow2((2.0 * k_theta + 64.0) * 2**level)
            if n != n_trial:
                theta = 2.0 * np.pi * np.arange(n) / n
                geo = self._geometry(r, theta[None, :], kappa)
            r_c = r + 1j * geo.eta_r
            t_c = theta[None, :] + 1j * geo.eta_t
            S = phase.value(r_c, t_c)
            growth = -t * S.imag
            if growth.max() > GROWTH_LIMIT:
                raise _Backoff()
            f = phase.amplitude(r_c, self.gamma) * geo.det * np.exp(1j * t * S)
            if self.cutoff is not None:
                f = f * self.cutoff(r_c, np.broadcast_to(r, r_c.shape))
            weighted = wr * f * (2.0 * np.pi / n)
            total += weighted.sum()
            abs_sum += float(np.abs(weighted).sum())
            nodes += weighted.size
            panels += 1
        logger.debug(
            "deformed quadrature t=%g level=%d kappa=%g r_max=%.4g panels=%d nodes=%d",
            t, level, kappa, r_max, panels, nodes,
        )
        return QuadratureSum(total, abs_sum, nodes)

    def _rates(
        self, r: np.ndarray, geo: _Geometry, undamped: np.ndarray, kappa: float
    ) -> tuple[float, float]:
        """Largest undamped radial and angular phase rates on a panel."""
        t = self.t
        if not undamped.any():
            return 0.0, 0.0
        P = np.abs(geo.P)
        Q = np.abs(geo.Q)
        omega_r = t * float(P[undamped].max())
        k_theta = t * float((np.broadcast_to(r, Q.shape) * Q)[undamped].max())
        # Zones narrower than the trial grid spacing sit next to critical points,
        # where these bounds hold.
        rows = undamped.any(axis=1)
        r_rows = r[rows, 0]
        m_rows = np.maximum(np.broadcast_to(geo.m, r.shape)[rows, 0], 0.05)
        g0 = self.phase.g0
        k_cap = DAMPING_CUTOFF / kappa + np.sqrt(DAMPING_CUTOFF * g0 * t * r_rows / kappa)
        k_row = t * r_rows * Q[rows].max(axis=1)
        k_theta = max(k_theta, float(np.minimum(k_cap, k_row).max()))
        r_safe = np.maximum(r_rows, 1e-12)
        w_cap = (
            DAMPING_CUTOFF / (kappa * r_safe) + np.sqrt(DAMPING_CUTOFF * g0 * t / (kappa * r_safe))
        ) / m_rows
        w_row = t * P[rows].max(axis=1)
        omega_r = max(omega_r, float(np.minimum(w_cap, w_row).max()))
        return omega_r, k_theta
