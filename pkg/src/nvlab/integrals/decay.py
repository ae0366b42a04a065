"""Time-decay fits of the dispersive integrals over grids of t and u."""

import cmath
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from nvlab.config import thread_count
from nvlab.errors import DomainError
from nvlab.integrals.registry import evaluate
from nvlab.integrals.spec import IntegralSpec, IntegralValue

logger = logging.getLogger(__name__)

LARGE_T_MIN = 5.0
MIN_FIT_POINTS = 8
MIN_SMALL_T_POINTS = 4
RING_RADII = (0.0, 6.0, 18.0, 30.0)
RING_POINTS = 24


@dataclass(frozen=True)
class ScanRow:
    """One evaluated grid point."""

    t: float
    u: complex
    result: IntegralValue


@dataclass(frozen=True)
class DecayProbe:
    """Log-log fit of ``|I|`` against ``t``.

    Attributes:
        spec: Specification with the worst-case ``u`` (``t`` is the first grid value).
        samples: ``(t, |I|)`` pairs, strictly increasing in ``t``, recorded as computed.
        slope: Least-squares slope of ``log |I|`` against ``log t``.
        slope_ci: Half-width of the 95% confidence interval of the slope.
        excluded: Times whose value lies below the quadrature round-off floor;
            they are recorded but not fitted.
    """

    spec: IntegralSpec
    samples: list[tuple[float, float]]
    slope: float
    slope_ci: float
    excluded: list[float] = field(default_factory=list)


def vertex_u_grid() -> list[complex]:
    """The six degenerate directions ``+-18 e^{2 pi i k/3}``."""
    return [s * 18.0 * cmath.exp(2j * math.pi * k / 3) for s in (1.0, -1.0) for k in range(3)]


def ring_u_grid(radius: float, points: int = RING_POINTS) -> list[complex]:
    """Equally spaced parameters on the circle ``|u| = radius`` (one point when radius is 0)."""
    if radius < 0 or points < 1:
        raise ValueError(f"ring needs radius >= 0 and points >= 1, got {radius}, {points}")
    if radius == 0:
        return [0j]
    return [radius * cmath.exp(2j * math.pi * k / points) for k in range(points)]


def worst_case_u_grid() -> list[complex]:
    """Vertex directions plus 24-point rings at ``|u| in {0, 6, 18, 30}``."""
    grid = vertex_u_grid()
    for radius in RING_RADII:
        grid.extend(ring_u_grid(radius))
    return grid


def _check_increasing(t_grid: Sequence[float]) -> list[float]:
    ts = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise DomainError("t grid must be strictly increasing")
    if ts and ts[0] <= 0:
        raise DomainError("t grid must be positive")
    return ts


def _check_geometric(ts: list[float]) -> None:
    ratios = [b / a for a, b in zip(ts, ts[1:])]
    if max(ratios) - min(ratios) > 1e-6 * max(ratios):
        raise DomainError("t grid must be geometrically spaced")


def geometric_t_grid(t_min: float, t_max: float, points: int) -> list[float]:
    """Log-uniform grid from ``t_min`` to ``t_max``."""
    if not (0 < t_min < t_max) or points < 2:
        raise DomainError(f"invalid t range [{t_min}, {t_max}] with {points} points")
    return [float(t) for t in np.geomspace(t_min, t_max, points)]


def scan(spec: IntegralSpec, t_grid: Sequence[float], u_grid: Sequence[complex]) -> list[ScanRow]:
    """Evaluate ``spec`` on the product grid, ordered by ``u`` then ``t``.

    Evaluations run on a thread pool of ``thread_count()`` workers; the result
    order does not depend on the pool size.
    """
    ts = _check_increasing(t_grid)
    jobs = [(t, complex(u)) for u in u_grid for t in ts]

    def run(job: tuple[float, complex]) -> ScanRow:
        t, u = job
        return ScanRow(t, u, evaluate(replace(spec, t=t, u=u)))

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        return list(pool.map(run, jobs))


def fit_loglog(ts: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """Slope of ``log values`` against ``log ts`` and its 95% half-width."""
    fit = stats.linregress(np.log(ts), np.log(values))
    n = len(ts)
    ci = float(stats.t.ppf(0.975, n - 2) * fit.stderr) if n > 2 else math.inf
    return float(fit.slope), ci


def probe_from_rows(spec: IntegralSpec, rows: Sequence[ScanRow]) -> DecayProbe:
    """Fit every ``u`` of a scan and keep the slowest decay (largest slope)."""
    by_u: dict[complex, list[ScanRow]] = {}
    for row in rows:
        by_u.setdefault(row.u, []).append(row)
    worst: DecayProbe | None = None
    for u, group in by_u.items():
        kept = [r for r in group if not r.result.below_floor]
        excluded = [r.t for r in group if r.result.below_floor]
        if excluded:
            logger.warning("u=%s: %d samples below the round-off floor", u, len(excluded))
        samples = [(r.t, abs(r.result.value)) for r in group]
        if len(kept) < 3:
            slope, ci = -math.inf, 0.0
        else:
            slope, ci = fit_loglog([r.t for r in kept], [abs(r.result.value) for r in kept])
        probe = DecayProbe(replace(spec, u=u, t=group[0].t), samples, slope, ci, excluded)
        logger.debug("u=%s slope=%.4f ci=%.4f", u, slope, ci)
        if worst is None or probe.slope > worst.slope:
            worst = probe
    if worst is None:
        raise DomainError("empty scan")
    return worst


def fit_decay(
    spec: IntegralSpec, t_grid: Sequence[float], u_grid: Sequence[complex] | None = None
) -> DecayProbe:
    """Worst-case large-time decay slope of ``|I|`` over a u-grid.

    Args:
        spec: Integral parameters; ``t`` and ``u`` are overridden by the grids.
        t_grid: Geometrically spaced times, at least 8, all ``>= 5``.
        u_grid: Parameters to search; defaults to :func:`worst_case_u_grid`.

    Raises:
        DomainError: If the grid violates the requirements.
        ResolutionInsufficientError: Propagated from any evaluation.
    """
    ts = _check_increasing(t_grid)
    if len(ts) < MIN_FIT_POINTS:
        raise DomainError(f"decay fit needs at least {MIN_FIT_POINTS} times, got {len(ts)}")
    if ts[0] < LARGE_T_MIN:
        raise DomainError(f"decay fit needs t >= {LARGE_T_MIN}, got {ts[0]}")
    _check_geometric(ts)
    grid = worst_case_u_grid() if u_grid is None else list(u_grid)
    return probe_from_rows(spec, scan(spec, ts, grid))


def small_time_limit(alpha: float) -> float:
    """Upper end ``e^{-3/(1 - alpha)}`` of the small-time regime."""
    return math.exp(-3.0 / (1.0 - alpha))


def small_time_fit(spec: IntegralSpec, t_grid: Sequence[float]) -> DecayProbe:
    """Growth slope of ``|I|`` as ``t -> 0`` at the parameter ``spec.u``.

    Raises:
        DomainError: If fewer than 4 times are given or one leaves the small-time regime.
    """
    ts = _check_increasing(t_grid)
    if len(ts) < MIN_SMALL_T_POINTS:
        raise DomainError(f"small-time fit needs at least {MIN_SMALL_T_POINTS} times")
    limit = small_time_limit(spec.alpha)
    if ts[-1] > limit:
        raise DomainError(
            f"small-time fit needs t <= e^(-3/(1 - alpha)) = {limit:.4g} at alpha={spec.alpha}, "
            f"got t={ts[-1]:g}; the t^(-(alpha+2)/3) growth only holds below that bound, "
            f"above it the bounded inner-region terms dominate the fit"
        )
    return probe_from_rows(spec, scan(spec, ts, [spec.u]))


def expected_small_time_slope(alpha: float) -> float:
    """Growth exponent ``-(alpha + 2)/3`` of the unbounded regions as ``t -> 0``."""
    return -(alpha + 2.0) / 3.0


def scaling_identity_check(
    t: float, u: complex, E: float, alpha: float, beta: float = 0.0
) -> float:
    """Relative discrepancy in ``I(t, u; E) = E^{(gamma+2)/2} I(E^{3/2} t, u/E; 1)``.

    Both sides are evaluated on the whole plane without internal rescaling.
    """
    if not E > 0:
        raise DomainError(f"E must be positive, got {E}")
    direct = evaluate(IntegralSpec(alpha=alpha, beta=beta, E=E, u=u, t=t)).value
    unit = evaluate(IntegralSpec(alpha=alpha, beta=beta, E=1.0, u=complex(u) / E, t=E**1.5 * t))
    gamma = complex(alpha, beta)
    scaled = complex(np.exp(0.5 * (gamma + 2.0) * math.log(E))) * unit.value
    return abs(direct - scaled) / abs(scaled)


def profile_sensitivity(spec: IntegralSpec, profiles: tuple[str, str] = ("bump", "cosine")) -> float:
    """Relative change of the large-frequency integral when the cutoff profile is swapped."""
    first = evaluate(replace(spec, profile=profiles[0])).value
    second = evaluate(replace(spec, profile=profiles[1])).value
    return abs(first - second) / abs(first)


def beta_sweep(spec: IntegralSpec, betas: Sequence[float]) -> list[tuple[float, float]]:
    """``(beta, |I|)`` at fixed other parameters; recorded, not asserted."""
    return [(float(b), abs(evaluate(replace(spec, beta=b)).value)) for b in betas]
