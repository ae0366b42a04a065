"""Inner-ball integral as a circular convolution on the torus.

With ``xi = e^{i phi1} + e^{i phi2}`` the ball ``|xi| < 2`` is covered twice by
the torus and ``d xi = |sin(phi1 - phi2)| dphi1 dphi2``. The phase splits into
``s(phi1) + s(phi2)`` with ``s(phi) = 2 cos 3phi + u1 cos phi + u2 sin phi``, so

    I_in = 1/2 int int a(phi1 - phi2) g(phi1) g(phi2),   g = e^{i t s},
         = 1/2 (2 pi)^2 sum_m a_m g_m g_{-m}

in Fourier coefficients, where ``a(psi) = |2 cos(psi/2)|^gamma |sin psi|``.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import fft

from nvlab.config import thread_count
from nvlab.integrals.region import QuadratureSum, Region
from nvlab.integrals.spec import RegionKind

logger = logging.getLogger(__name__)

MIN_POINTS = 512
AMPLITUDE_MIN_POINTS = 1 << 18
AMPLITUDE_MAX_POINTS = 1 << 22


def torus_points(t: float, u: complex, level: int = 0) -> int:
    """Grid size per axis: a power of two covering the bandwidth of ``e^{i t s}``."""
    bandwidth = 2.0 * (t * (6.0 + abs(u)) + 16.0 + 8.0 * t ** (1.0 / 3.0))
    n = max(MIN_POINTS, 48 * math.ceil(math.sqrt(t)), bandwidth)
    return (1 << math.ceil(math.log2(n))) << level


@lru_cache(maxsize=8)
def amplitude_coefficients(alpha: float, beta: float, size: int) -> np.ndarray:
    """Fourier coefficients of ``|2 cos(psi/2)|^gamma |sin psi|`` on an oversampled grid."""
    gamma = complex(alpha, beta)
    psi = 2.0 * np.pi * np.arange(size) / size
    base = np.abs(2.0 * np.cos(0.5 * psi))
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(base > 0, np.exp(gamma * np.log(np.where(base > 0, base, 1.0))), 0.0)
    samples = power * np.abs(np.sin(psi))
    return fft.fft(samples, workers=thread_count()) / size


def torus_sum(t: float, u: complex, alpha: float, beta: float, n: int) -> QuadratureSum:
    """Trapezoid value of the torus integral at unit energy with ``n`` points per axis."""
    phi = 2.0 * np.pi * np.arange(n) / n
    s = 2.0 * np.cos(3.0 * phi) + u.real * np.cos(phi) + u.imag * np.sin(phi)
    g_hat = fft.fft(np.exp(1j * t * s), workers=thread_count()) / n
    g_neg = np.roll(g_hat[::-1], 1)

    size = min(max(AMPLITUDE_MIN_POINTS, 4 * n), AMPLITUDE_MAX_POINTS)
    size = max(size, n)
    a_hat_full = amplitude_coefficients(float(alpha), float(beta), size)
    modes = np.fft.fftfreq(n, 1.0 / n).astype(int)
    a_hat = a_hat_full[modes % size]
    # The Nyquist mode has no symmetric partner.
    a_hat[n // 2] = 0.0

    terms = 0.5 * (2.0 * np.pi) ** 2 * a_hat * g_hat * g_neg
    return QuadratureSum(complex(terms.sum()), float(np.abs(terms).sum()), n * n)


class InsideBall(Region):
    """Integral over ``|xi| < 2 E^{1/2}`` via the torus parametrization.

    General energies are reduced to ``E = 1`` by
    ``I(t, u; E) = E^{(gamma + 2)/2} I(E^{3/2} t, u/E; 1)``.
    """

    kind = RegionKind.INSIDE

    def integrate(self, level: int) -> QuadratureSum:
        spec = self.spec
        t0 = spec.E**1.5 * spec.t
        u0 = spec.u / spec.E
        n = torus_points(t0, u0, level)
        raw = torus_sum(t0, u0, spec.alpha, spec.beta, n)
        scale = complex(np.exp(0.5 * (spec.gamma + 2.0) * math.log(spec.E)))
        logger.debug("torus t0=%g n=%d", t0, n)
        return QuadratureSum(raw.value * scale, raw.abs_sum * abs(scale), raw.nodes)
