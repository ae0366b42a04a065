"""Invariant checks for the closed-form families: mass, blow-up, L2 growth, residual."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from nvlab import spectral
from nvlab.errors import DomainError
from nvlab.integrals.bump import smooth_bump
from nvlab.integrals.decay import fit_loglog
from nvlab.solutions.families import Q2c, Qn0, Scaled, Solution
from nvlab.solutions.gould_hopper import gh_eval

logger = logging.getLogger(__name__)

PANEL_ORDER = 16
MASS_THETA_POINTS = 256
MASS_MAX_DOUBLINGS = 14
ROOT_CLUSTER_TOLERANCE = 1e-6
BLOWUP_GRID_POINTS = 64


@lru_cache(maxsize=4)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def polar_quadrature(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    center: complex,
    edges: Sequence[float],
    n_theta: int,
    order: int = PANEL_ORDER,
) -> float:
    """Integrate ``f(x, y)`` over the annuli between consecutive ``edges`` around ``center``.

    Gauss-Legendre in the radius, trapezoid in the angle.
    """
    x, w = _gauss_legendre(order)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    cos, sin = np.cos(theta), np.sin(theta)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r = 0.5 * (b - a) * x + 0.5 * (a + b)
        wr = 0.5 * (b - a) * w * r
        values = f(center.real + r[:, None] * cos, center.imag + r[:, None] * sin)
        total += float(np.sum(wr * values.sum(axis=1))) * (2.0 * np.pi / n_theta)
    return total


def _aitken(m0: float, m1: float, m2: float) -> float:
    d1, d2 = m1 - m0, m2 - m1
    if d1 == 0 or d2 == 0 or d1 * d2 < 0 or abs(d2) >= abs(d1):
        return m2
    q = d2 / d1
    return m2 + d2 * q / (1.0 - q)


def _root_clusters(solution: Qn0, t: float) -> list[tuple[complex, int]]:
    """Distinct roots of ``P_n(t, .)`` with multiplicities."""
    roots = sorted(np.roots(solution.poly.z_coefficients(t)), key=lambda z: (z.real, z.imag))
    scale = max([1.0] + [abs(z) for z in roots])
    clusters: list[list[complex]] = []
    for z in roots:
        for group in clusters:
            if abs(z - group[0]) < ROOT_CLUSTER_TOLERANCE * scale:
                group.append(complex(z))
                break
        else:
            clusters.append([complex(z)])
    return [(complex(np.mean(g)), len(g)) for g in clusters]


def _feature_radius(solution: Solution, t: float) -> float:
    if isinstance(solution, Scaled):
        return _feature_radius(solution.inner, solution.lam**3 * t) / solution.lam
    if isinstance(solution, Qn0):
        return 4.0 + 2.0 * max(abs(z) for z, _ in _root_clusters(solution, t))
    return 4.0


def mass(solution: Solution, t: float = 0.0, rel_tol: float = 1e-3) -> float:
    """Integral of ``v(t)`` over the plane.

    A disk of radius ``R0`` is integrated with fine panels; annuli of doubling
    radius are added until the Aitken-extrapolated tail changes by less than
    ``rel_tol / 10`` of the running value.

    Raises:
        BlowUpReachedError: If the solution has blown up at ``t``.
    """
    def density(x, y):
        return solution.evaluate(t, x, y)[0]

    r0 = _feature_radius(solution, t)
    edges = list(np.linspace(0.0, r0, int(math.ceil(r0 / 0.125)) + 1))
    n_theta = MASS_THETA_POINTS
    cumulative = [polar_quadrature(density, 0j, edges, n_theta)]
    radius = r0
    estimate = cumulative[0]
    for _ in range(MASS_MAX_DOUBLINGS):
        ring = list(np.linspace(radius, 2.0 * radius, 5))
        cumulative.append(cumulative[-1] + polar_quadrature(density, 0j, ring, n_theta))
        radius *= 2.0
        if len(cumulative) >= 3:
            new_estimate = _aitken(*cumulative[-3:])
            if abs(new_estimate - estimate) < 0.1 * rel_tol * abs(new_estimate):
                estimate = new_estimate
                break
            estimate = new_estimate
    logger.debug("mass of %s at t=%g: %.10g (outer radius %g)", solution.family, t, estimate, radius)
    return estimate


@dataclass(frozen=True)
class BlowupResult:
    """Outcome of a blow-up scan of the cubic-quartic family.

    Attributes:
        c: Family parameter.
        min_denominator: Spatial minimum of the log-argument at ``t = 0``.
        location: Point ``(x, y)`` realizing it.
        crossing: Time where the minimum reaches 0, if it lies in the scanned range.
        bracket: Consecutive grid times enclosing the crossing.
        minima: ``(t, min denominator)`` on the scan grid.
    """

    c: float
    min_denominator: float
    location: tuple[float, float]
    crossing: float | None
    bracket: tuple[float, float] | None
    minima: list[tuple[float, float]]

    @property
    def blows_up(self) -> bool:
        return self.crossing is not None


def blowup_scan(solution: Solution, t_grid: Sequence[float] | None = None) -> BlowupResult:
    """Find the first time the spatial minimum of the log-argument reaches 0.

    The log-argument separates as ``m(x, y) - 24 c t``, so the spatial minimum
    ``m0`` is found once (grid search plus Nelder-Mead) and the crossing is
    ``m0 / (24 c)`` for ``c > 0``. This replaces a space-time grid scan: the
    minima reported on ``t_grid`` are exact, and the crossing is the closed form
    rather than the nearest grid time (``bracket`` holds the enclosing grid times).

    Args:
        solution: A :class:`Q2c` member.
        t_grid: Increasing scan times; ``0..100`` in steps of 0.1 by default.

    Raises:
        DomainError: For other families.
    """
    if not isinstance(solution, Q2c):
        raise DomainError(f"blow-up scan applies to q2c only, got {solution.family}")
    c = solution.c
    ts = np.linspace(0.0, 100.0, 1001) if t_grid is None else np.asarray(t_grid, dtype=float)
    if np.any(np.diff(ts) <= 0):
        raise DomainError("t grid must be strictly increasing")

    bound = 1.0 + abs(c)
    axis = np.linspace(-bound, bound, BLOWUP_GRID_POINTS)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    D = solution.denominator(0.0, X, Y)
    i, j = np.unravel_index(int(np.argmin(D)), D.shape)
    polish = optimize.minimize(
        lambda p: float(solution.denominator(0.0, p[0], p[1])),
        x0=[X[i, j], Y[i, j]],
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000},
    )
    if polish.fun <= D[i, j]:
        m0, location = float(polish.fun), (float(polish.x[0]), float(polish.x[1]))
    else:
        m0, location = float(D[i, j]), (float(X[i, j]), float(Y[i, j]))

    minima = [(float(t), m0 - 24.0 * c * float(t)) for t in ts]
    crossing = None
    bracket = None
    for k, (t, m) in enumerate(minima):
        if m <= 0.0:
            crossing = m0 / (24.0 * c)
            bracket = (minima[k - 1][0] if k else t, t)
            break
    logger.debug("blow-up scan c=%g: m0=%.12g crossing=%s", c, m0, crossing)
    return BlowupResult(c, m0, location, crossing, bracket, minima)


def _require_qn0(solution: Solution) -> Qn0:
    if not isinstance(solution, Qn0):
        raise DomainError(f"expected a qn0 solution, got {solution.family}")
    return solution


def _local_scale(solution: Qn0, t: float, center: complex, multiplicity: int) -> float:
    leading = abs(gh_eval(solution.poly, t, center, multiplicity)) / math.factorial(multiplicity)
    return leading ** (-1.0 / multiplicity) if leading > 0 else 1.0


def _partition(distance: np.ndarray, rho: float) -> np.ndarray:
    s = np.clip((distance - 0.5 * rho) / (0.5 * rho), 0.0, 1.0)
    return 1.0 - smooth_bump(s).real


def l2_norm_squared(solution: Solution, t: float) -> float:
    """``||v(t)||_2^2`` for a Gould-Hopper solution.

    Near each root of ``P_n`` the integrand concentrates on the scale
    ``|P^(m)(z_k)/m!|^{-1/m}``; it is integrated there on graded polar panels
    under a smooth partition of unity, and the remainder on a global polar grid.
    """
    sol = _require_qn0(solution)

    def density(x, y):
        return sol.evaluate(t, x, y)[0] ** 2

    clusters = _root_clusters(sol, t)
    centers = [z for z, _ in clusters]
    radii = []
    for k, (z, m) in enumerate(clusters):
        scale = _local_scale(sol, t, z, m)
        others = [abs(z - w) for j, w in enumerate(centers) if j != k]
        rho = 0.4 * min(others) if others else 8.0 * max(scale, 1.0)
        radii.append((scale, rho))

    total = 0.0
    for (z, m), (scale, rho) in zip(clusters, radii):
        edges = [0.0]
        r = 0.5 * scale
        while r < rho:
            edges.append(r)
            r *= 2.0
        edges.append(rho)

        def local(x, y, z=z, rho=rho):
            return density(x, y) * _partition(np.hypot(x - z.real, y - z.imag), rho)

        total += polar_quadrature(local, z, edges, 128 * m)

    def remainder(x, y):
        weight = np.ones_like(x)
        for z, (_, rho) in zip(centers, radii):
            weight -= _partition(np.hypot(x - z.real, y - z.imag), rho)
        return density(x, y) * weight

    r_max = 2.0 * max(abs(z) for z in centers) + 8.0
    h = min(0.25, min(rho for _, rho in radii) / 8.0)
    edges = list(np.linspace(0.0, r_max, int(math.ceil(r_max / h)) + 1))
    n_theta = 1 << min(14, max(8, math.ceil(math.log2(2.0 * math.pi * r_max / h))))
    total += polar_quadrature(remainder, 0j, edges, n_theta)
    return total


def local_l2_estimate(n: int, t: float) -> float:
    """Large-time approximation ``(64 pi/3) sum |P_n'(z_k)|^2`` over simple roots."""
    sol = Qn0(n)
    simple = [z for z, m in _root_clusters(sol, t) if m == 1]
    return 64.0 * math.pi / 3.0 * sum(abs(gh_eval(sol.poly, t, z, 1)) ** 2 for z in simple)


def nonzero_root_ratio(n: int, t: float) -> float:
    """``|z_0(t)| / |t|^{1/3}`` for the largest root of ``P_n(t, .)``."""
    if t == 0:
        raise DomainError("root ratio is undefined at t = 0")
    sol = Qn0(n)
    largest = max(abs(z) for z, _ in _root_clusters(sol, t))
    return largest / abs(t) ** (1.0 / 3.0)


@dataclass(frozen=True)
class L2Growth:
    """L2 growth measurements of a Gould-Hopper solution.

    Attributes:
        n: Degree.
        samples: ``(t, ||v(t)||^2)``.
        slope: Fitted log-log slope of ``||v||^2`` against ``t``.
        slope_ci: 95% half-width of the slope.
        local_estimates: ``(t, (64 pi/3) sum |P'(z_k)|^2)``.
        root_ratios: ``(t, |z_0(t)|/t^{1/3})``.
    """

    n: int
    samples: list[tuple[float, float]]
    slope: float
    slope_ci: float
    local_estimates: list[tuple[float, float]]
    root_ratios: list[tuple[float, float]]

    @property
    def increasing(self) -> bool:
        values = [v for _, v in self.samples]
        return all(b > a for a, b in zip(values, values[1:]))


def l2_growth(solution: Solution, t_grid: Sequence[float]) -> L2Growth:
    """Measure ``||Q_n(t)||^2`` on positive times and fit its growth exponent.

    Raises:
        DomainError: For other families, ``n < 3`` or a non-positive time.
    """
    sol = _require_qn0(solution)
    if sol.n < 3:
        raise DomainError(f"L2 growth needs n >= 3, got {sol.n}")
    ts = [float(t) for t in t_grid]
    if len(ts) < 3 or any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise DomainError("t grid must hold at least 3 increasing positive times")
    samples = [(t, l2_norm_squared(sol, t)) for t in ts]
    slope, ci = fit_loglog(ts, [v for _, v in samples])
    logger.info("L2 growth n=%d slope=%.4f +- %.4f", sol.n, slope, ci)
    return L2Growth(
        n=sol.n,
        samples=samples,
        slope=slope,
        slope_ci=ci,
        local_estimates=[(t, local_l2_estimate(sol.n, t)) for t in ts],
        root_ratios=[(t, nonzero_root_ratio(sol.n, t)) for t in ts],
    )


def time_derivative(solution: Solution, t: float, x, y, h: float = 1e-3) -> np.ndarray:
    """Fourth-order central difference of ``v`` in time."""
    v = [solution.evaluate(t + k * h, x, y)[0] for k in (-2, -1, 1, 2)]
    return (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h)


def nv_residual(solution: Solution, t: float, N: int = 512, L: float = 60.0) -> float:
    """Relative residual of the zero-energy equation on a periodic box.

    ``d_t v - 2[d_x(d_x^2 - 3 d_y^2) v + div(v (Re W, Im W))]`` with spatial
    derivatives taken spectrally from samples, ``d_t v`` by finite differences
    and ``W`` from its closed form, divided by ``||d_t v|| + ||linear part||``.
    """
    spectral.check_grid(N, L)
    X, Y = spectral.meshgrid(N, L)
    k1, k2 = spectral.wavenumbers(N, L)
    v, _ = solution.evaluate(t, X, Y)
    W = solution.w_field(t, X, Y)
    v_hat = spectral.forward(v)
    linear = 2.0 * (
        spectral.derivative(v_hat, k1, k2, 3, 0) - 3.0 * spectral.derivative(v_hat, k1, k2, 1, 2)
    )
    flux = spectral.derivative(spectral.forward(v * W.real), k1, k2, 1, 0) + spectral.derivative(
        spectral.forward(v * W.imag), k1, k2, 0, 1
    )
    v_t = time_derivative(solution, t, X, Y)
    residual = v_t - linear - 2.0 * flux
    scale = spectral.l2_norm(v_t, L) + spectral.l2_norm(linear, L)
    return spectral.l2_norm(residual, L) / scale


def radial_decay_slope(
    solution: Solution, r_min: float = 30.0, r_max: float = 300.0, t: float = 0.0, points: int = 16
) -> float:
    """Log-log slope of ``max_theta |v(t, r, theta)|`` on a log-spaced radius grid."""
    radii = np.geomspace(r_min, r_max, points)
    theta = 2.0 * np.pi * np.arange(256) / 256
    X = radii[:, None] * np.cos(theta)
    Y = radii[:, None] * np.sin(theta)
    v, _ = solution.evaluate(t, X, Y)
    slope, _ = fit_loglog(radii, np.abs(v).max(axis=1))
    return slope
