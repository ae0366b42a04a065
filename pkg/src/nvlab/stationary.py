"""Stationary points of the outer phase and their clustering geometry.

For a parameter ``u_tilde`` the six critical points of the phase are the square
roots of the three roots of

    zeta^3 - (conj(u_tilde)/6) zeta^2 + (u_tilde/6) zeta - 1 = 0.

Their configuration is governed by the closed curve
``6(2 e^{-i phi} + e^{2 i phi})`` (a deltoid with vertices ``18 e^{2 pi i k/3}``):
a triple root sits at the vertices, a double root on the curve, three distinct
unimodular roots inside it and one root on each side of the unit circle
outside it.
"""

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from scipy import optimize

from nvlab.config import make_rng
from nvlab.symbol import ensure_finite

logger = logging.getLogger(__name__)

# Relative parameter-space tolerance for "on the curve" and "at a vertex".
PARAMETER_TOLERANCE = 1e-7
# Tolerance on ||lambda| - 1| for a unimodular critical point.
UNIMODULAR_TOLERANCE = 1e-7
# Distance ties in omega_distances.
TIE_TOLERANCE = 1e-12
# Radius bound K = sqrt(sqrt(2) + 1) used by the clustering estimates.
K_BOUND = math.sqrt(math.sqrt(2.0) + 1.0)

EXCLUDED_PAIR = (2, 5)
_VERTICES = tuple(18.0 * cmath.exp(2j * math.pi * k / 3) for k in range(3))


class CaseTag(StrEnum):
    """Configuration of the critical points (Cases 1 to 4)."""

    TRIPLE_DEGENERATE = "TripleDegenerate"
    ON_CURVE = "OnCurve"
    INTERIOR_NONDEGENERATE = "InteriorNondegenerate"
    EXTERIOR = "Exterior"

    @property
    def number(self) -> int:
        """Case number 1..4."""
        return list(CaseTag).index(self) + 1


@dataclass(frozen=True)
class UCurveSample:
    """A point of the curve together with its parameter."""

    phi: float
    point: complex


@dataclass(frozen=True)
class LemmaReport:
    """Measured clustering constants for one stationary point set.

    Ratios are ``None`` when their hypothesis does not hold (zero denominator or
    a critical point outside the disk of radius ``K_BOUND``).
    """

    common_base: tuple[int, int, int] | None
    cluster_ratio: float | None
    circle_ratio: float | None
    degenerate_ratio: float | None
    omega_order_ok: bool

    @property
    def common_base_ok(self) -> bool:
        return self.common_base is not None

    @property
    def cluster_ok(self) -> bool:
        return self.cluster_ratio is None or self.cluster_ratio <= 2.0 + 1e-9

    @property
    def passed(self) -> bool:
        """All boolean checks hold (measured constants are only recorded)."""
        return self.common_base_ok and self.cluster_ok and self.omega_order_ok

    def to_dict(self) -> dict:
        return {
            "common_base": list(self.common_base) if self.common_base else None,
            "common_base_ok": self.common_base_ok,
            "cluster_ratio": self.cluster_ratio,
            "cluster_ok": self.cluster_ok,
            "circle_ratio": self.circle_ratio,
            "degenerate_ratio": self.degenerate_ratio,
            "omega_order_ok": self.omega_order_ok,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class StationaryPointSet:
    """The six critical points for one parameter, with their classification.

    Attributes:
        u_tilde: The parameter of the cubic.
        lambdas: Critical points, ``lambdas[j + 3] == -lambdas[j]``.
        case_tag: Configuration case.
        omega: ``|lambda_0| - 1`` in the exterior case, 0 otherwise.
        phi: Angle of the configuration (argument of the leading root zeta_0).
        omega1: Smallest admissible pairwise distance.
        omega2: Second smallest admissible pairwise distance.
        realizing_pairs: Index pairs realizing ``omega1`` and ``omega2``.
    """

    u_tilde: complex
    lambdas: tuple[complex, ...]
    case_tag: CaseTag
    omega: float
    phi: float
    omega1: float = field(default=0.0)
    omega2: float = field(default=0.0)
    realizing_pairs: tuple[tuple[int, int], tuple[int, int]] = field(
        default=((0, 1), (0, 2))
    )

    @property
    def in_U(self) -> bool:
        return self.case_tag is not CaseTag.EXTERIOR

    def to_dict(self) -> dict:
        """Structured record with the fields of the ``stationary-points`` command."""
        return {
            "case": self.case_tag.value,
            "lambdas": [[lam.real, lam.imag] for lam in self.lambdas],
            "omega": self.omega,
            "phi": self.phi,
            "omega1": self.omega1,
            "omega2": self.omega2,
            "pairs": [list(pair) for pair in self.realizing_pairs],
            "lemma_report": verify_lemmas(self).to_dict(),
        }


def _cubic(u_tilde: complex) -> np.ndarray:
    return np.array([1.0, -u_tilde.conjugate() / 6.0, u_tilde / 6.0, -1.0], dtype=complex)


def roots_zeta(u_tilde: complex) -> tuple[complex, complex, complex]:
    """Roots of the critical-point cubic, polished by Newton's method.

    Companion-matrix eigenvalues are refined by Newton steps that are kept only
    while they reduce the residual, so clustered roots near the vertices are
    never pushed apart.
    """
    u_tilde = ensure_finite(u_tilde, "u_tilde")
    coeffs = _cubic(u_tilde)
    deriv = np.polyder(coeffs)
    polished = []
    for root in np.roots(coeffs):
        z = complex(root)
        residual = abs(np.polyval(coeffs, z))
        for _ in range(3):
            slope = np.polyval(deriv, z)
            if slope == 0:
                break
            candidate = z - np.polyval(coeffs, z) / slope
            candidate_residual = abs(np.polyval(coeffs, candidate))
            if candidate_residual >= residual:
                break
            z, residual = complex(candidate), candidate_residual
        polished.append(z)
    return tuple(polished)


def u_curve(phi: float) -> UCurveSample:
    """Point ``6(2 e^{-i phi} + e^{2 i phi})`` of the curve."""
    return UCurveSample(phi=phi, point=6.0 * (2.0 * cmath.exp(-1j * phi) + cmath.exp(2j * phi)))


def _curve_points(phi: np.ndarray) -> np.ndarray:
    return 6.0 * (2.0 * np.exp(-1j * phi) + np.exp(2j * phi))


def distance_to_curve(u_tilde: complex) -> tuple[float, float]:
    """Distance from ``u_tilde`` to the curve and the closest parameter phi."""
    grid = np.linspace(-math.pi, math.pi, 721)
    dist = np.abs(u_tilde - _curve_points(grid))
    best = int(np.argmin(dist))
    h = grid[1] - grid[0]
    result = optimize.minimize_scalar(
        lambda p: abs(u_tilde - _curve_points(np.asarray(p))),
        bounds=(grid[best] - h, grid[best] + h),
        method="bounded",
        options={"xatol": 1e-13},
    )
    phi = float(result.x)
    return float(min(result.fun, dist[best])), math.remainder(phi, 2.0 * math.pi)


def _closest_pair(zetas: tuple[complex, ...]) -> tuple[int, int, float]:
    pairs = [(i, j, abs(zetas[i] - zetas[j])) for i, j in itertools.combinations(range(3), 2)]
    return min(pairs, key=lambda p: p[2])


def _with_antipodes(first: tuple[complex, complex, complex]) -> tuple[complex, ...]:
    return tuple(first) + tuple(-lam for lam in first)


def stationary_set(u_tilde: complex) -> StationaryPointSet:
    """Compute, label and classify the six critical points for ``u_tilde``.

    Labels follow the normalization ``lambda_0 lambda_1 lambda_2 = 1``:

    * vertex ``18 e^{2 pi i k/3}``: all three equal ``e^{-i pi k/3}``;
    * on the curve: ``lambda_0 = lambda_2`` is the root of the double zeta,
      ``lambda_1 = 1/lambda_0^2``;
    * inside: zeta roots sorted by argument, ``lambda_2 = 1/(lambda_0 lambda_1)``;
    * outside: ``lambda_0`` largest, ``lambda_2`` smallest on the same ray,
      ``lambda_1 = e^{-i phi}`` unimodular.
    """
    u_tilde = ensure_finite(u_tilde, "u_tilde")
    scale = max(1.0, abs(u_tilde))
    tol = PARAMETER_TOLERANCE * scale
    zetas = roots_zeta(u_tilde)
    omega = 0.0

    vertex_dist = [abs(u_tilde - v) for v in _VERTICES]
    k = int(np.argmin(vertex_dist))
    i, j, separation = _closest_pair(zetas)
    near_curve = separation < 0.05 * math.sqrt(scale)
    curve_dist = distance_to_curve(u_tilde)[0] if near_curve else math.inf

    if vertex_dist[k] < tol:
        case = CaseTag.TRIPLE_DEGENERATE
        lam = cmath.exp(-1j * math.pi * k / 3)
        first = (lam, lam, lam)
        phi = cmath.phase(lam * lam)
    elif curve_dist < tol:
        case = CaseTag.ON_CURVE
        double = 0.5 * (zetas[i] + zetas[j])
        lam0 = cmath.sqrt(double)
        first = (lam0, 1.0 / (lam0 * lam0), lam0)
        phi = cmath.phase(double)
    elif max(abs(math.sqrt(abs(z)) - 1.0) for z in zetas) < UNIMODULAR_TOLERANCE:
        case = CaseTag.INTERIOR_NONDEGENERATE
        ordered = sorted(zetas, key=cmath.phase)
        lam0 = cmath.sqrt(ordered[0])
        lam1 = cmath.sqrt(ordered[1])
        first = (lam0, lam1, 1.0 / (lam0 * lam1))
        phi = cmath.phase(ordered[0])
    else:
        case = CaseTag.EXTERIOR
        ordered = sorted(zetas, key=abs)
        big, small = ordered[2], ordered[0]
        lam0 = cmath.sqrt(big)
        lam2 = cmath.sqrt(small)
        if (lam2 * lam0.conjugate()).real < 0:
            lam2 = -lam2
        first = (lam0, 1.0 / (lam0 * lam2), lam2)
        omega = abs(lam0) - 1.0
        phi = cmath.phase(big)

    lambdas = _with_antipodes(first)
    omega1, omega2, pairs = _omega_from_lambdas(lambdas)
    logger.debug("u_tilde=%s case=%s omega1=%.3g omega2=%.3g", u_tilde, case, omega1, omega2)
    return StationaryPointSet(
        u_tilde=u_tilde,
        lambdas=lambdas,
        case_tag=case,
        omega=omega,
        phi=phi,
        omega1=omega1,
        omega2=omega2,
        realizing_pairs=pairs,
    )


def in_U(u_tilde: complex) -> bool:
    """True when ``u_tilde`` lies inside or on the curve (root-moduli criterion)."""
    return stationary_set(u_tilde).in_U


def antipodal_pair(pair: tuple[int, int]) -> tuple[int, int]:
    """Index pair of the negated points."""
    a, b = (pair[0] + 3) % 6, (pair[1] + 3) % 6
    return (min(a, b), max(a, b))


def _argmin_pair(distances: dict[tuple[int, int], float]) -> tuple[tuple[int, int], float]:
    best = min(distances.values())
    for pair in sorted(distances):
        if distances[pair] <= best + TIE_TOLERANCE:
            return pair, distances[pair]
    raise AssertionError("unreachable")


def _omega_from_lambdas(
    lambdas: tuple[complex, ...],
) -> tuple[float, float, tuple[tuple[int, int], tuple[int, int]]]:
    admissible = {
        (i, j): abs(lambdas[i] - lambdas[j])
        for i, j in itertools.combinations(range(6), 2)
        if (i, j) != EXCLUDED_PAIR
    }
    pair1, omega1 = _argmin_pair(admissible)
    removed = {pair1, antipodal_pair(pair1)}
    second = {pair: d for pair, d in admissible.items() if pair not in removed}
    pair2, omega2 = _argmin_pair(second)
    return omega1, omega2, (pair1, pair2)


def omega_distances(
    sps: StationaryPointSet,
) -> tuple[float, float, tuple[tuple[int, int], tuple[int, int]]]:
    """First and second minimal admissible distances with realizing pairs.

    The admissible pairs exclude ``(2, 5)``; the second minimum additionally
    excludes the first realizing pair and its antipodal copy. Ties go to the
    lexicographically smallest pair.
    """
    if len(sps.lambdas) != 6:
        raise ValueError("stationary point set must hold six points")
    return _omega_from_lambdas(sps.lambdas)


def degenerate_points() -> tuple[complex, ...]:
    """The six points ``e^{-i pi k/3}`` where the configuration collapses."""
    return tuple(cmath.exp(-1j * math.pi * k / 3) for k in range(6))


def lemma_phase(u_tilde: complex, lam: complex) -> float:
    """Phase whose critical points are the roots of the cubic.

    ``-2 Re(lam^3 + lam^-3) + Re(conj(u_tilde)(lam + 1/conj(lam)))``.
    """
    return (
        -2.0 * (lam**3 + lam**-3).real
        + (u_tilde.conjugate() * (lam + 1.0 / lam.conjugate())).real
    )


def phase_derivative(u_tilde: complex, lam: complex) -> complex:
    """Holomorphic derivative ``conj(u)/2 - u/(2 lam^2) - 3 lam^2 + 3/lam^4``."""
    return u_tilde.conjugate() / 2.0 - u_tilde / (2.0 * lam * lam) - 3.0 * lam * lam + 3.0 / lam**4


def phase_second_derivative(u_tilde: complex, lam: complex) -> complex:
    """Second holomorphic derivative ``u/lam^3 - 6 lam - 12/lam^5``."""
    return u_tilde / lam**3 - 6.0 * lam - 12.0 / lam**5


def factorized_derivative(sps: StationaryPointSet, lam: complex) -> complex:
    """``-(3/lam^4) prod_j (lam^2 - lambda_j^2)`` over the first three points."""
    product = 1.0 + 0j
    for lam_j in sps.lambdas[:3]:
        product *= lam * lam - lam_j * lam_j
    return -3.0 / lam**4 * product


def critical_points_plane(u: complex, E: float = 1.0) -> list[complex]:
    """Critical points of the full phase ``S(u, .; E)`` in the frequency plane.

    Points outside the ball of radius ``2 E^{1/2}`` come from exterior critical
    points ``lam`` via ``xi = lam + 1/conj(lam)``; points inside come from pairs
    of unimodular critical points via ``xi = lam + lam'``. Both use the cubic with
    ``u_tilde = -u/E``; results are scaled by ``E^{1/2}``.
    """
    if E <= 0:
        raise ValueError(f"E must be positive, got {E}")
    u = ensure_finite(u, "u")
    sps = stationary_set(-u / E)
    root_e = math.sqrt(E)
    points: list[complex] = []
    unimodular = [lam for lam in sps.lambdas if abs(abs(lam) - 1.0) < 1e-6]
    for a, b in itertools.combinations(unimodular, 2):
        # antipodal pairs land on the singular origin
        if abs(a + b) > 1e-9:
            points.append(root_e * (a + b))
    if sps.case_tag is CaseTag.EXTERIOR:
        for lam in (sps.lambdas[0], sps.lambdas[3]):
            points.append(root_e * (lam + 1.0 / lam.conjugate()))
    return points


def critical_radii(u: complex, E: float = 1.0) -> list[float]:
    """Sorted distinct moduli of :func:`critical_points_plane`, with 0 and the ball radius."""
    radii = {0.0, 2.0 * math.sqrt(E)}
    radii.update(abs(p) for p in critical_points_plane(u, E))
    merged: list[float] = []
    for r in sorted(radii):
        if not merged or r - merged[-1] > 1e-9 * max(1.0, r):
            merged.append(r)
    return merged


def _common_base(sps: StationaryPointSet, tol: float) -> tuple[int, int, int] | None:
    pair1, _ = sps.realizing_pairs
    blocked = {pair1, antipodal_pair(pair1), EXCLUDED_PAIR}
    lam = sps.lambdas
    for j0, j1, j2 in itertools.permutations(range(6), 3):
        if tuple(sorted((j0, j1))) == EXCLUDED_PAIR:
            continue
        if tuple(sorted((j0, j2))) in blocked:
            continue
        if abs(abs(lam[j0] - lam[j1]) - sps.omega1) > tol:
            continue
        if abs(abs(lam[j0] - lam[j2]) - sps.omega2) > tol:
            continue
        return (j0, j1, j2)
    return None


def verify_lemmas(sps: StationaryPointSet) -> LemmaReport:
    """Measure the clustering statements for one stationary point set.

    Checks:
        * a common base point ``j0`` with ``omega1 = |l_j0 - l_j1|`` and
          ``omega2 = |l_j0 - l_j2|`` (lexicographically first triple);
        * the cluster ``{j0, j1, j2}`` has diameter at most ``2 omega2``, and so
          does its complement when ``u_tilde`` lies inside or on the curve;
        * ``max dist(l_j, S^1)/omega1`` when ``omega1 > 0`` and all points lie in the
          disk of radius ``K_BOUND``;
        * ``max_j min_k |l_j - e^{-i pi k/3}|/omega2`` under the same conditions;
        * ``omega1 <= omega2 < 2``.
    """
    tol = 1e-9 * max(1.0, sps.omega2)
    base = _common_base(sps, tol)
    lam = sps.lambdas
    small = max(abs(z) for z in lam) < K_BOUND

    cluster_ratio = None
    if base is not None and sps.omega2 > 0:
        groups = [base]
        if sps.in_U:
            groups.append(tuple(j for j in range(6) if j not in base))
        diameter = max(
            max(abs(lam[a] - lam[b]) for a, b in itertools.combinations(group, 2))
            for group in groups
        )
        cluster_ratio = diameter / sps.omega2

    circle_ratio = None
    if sps.omega1 > 0 and small:
        circle_ratio = max(abs(abs(z) - 1.0) for z in lam) / sps.omega1

    degenerate_ratio = None
    if sps.omega2 > 0 and small:
        stars = degenerate_points()
        degenerate_ratio = max(min(abs(z - s) for s in stars) for z in lam) / sps.omega2

    order_ok = sps.omega1 <= sps.omega2 + TIE_TOLERANCE and sps.omega2 < 2.0
    return LemmaReport(
        common_base=base,
        cluster_ratio=cluster_ratio,
        circle_ratio=circle_ratio,
        degenerate_ratio=degenerate_ratio,
        omega_order_ok=order_ok,
    )


@dataclass(frozen=True)
class LemmaSample:
    """One row of a Monte-Carlo lemma sweep."""

    index: int
    u_tilde: complex
    sps: StationaryPointSet
    report: LemmaReport


@dataclass(frozen=True)
class LemmaSweep:
    """Seeded Monte-Carlo sweep over parameters in a disk."""

    samples: list[LemmaSample]

    def _sup(self, attr: str) -> float | None:
        values = [getattr(s.report, attr) for s in self.samples]
        values = [v for v in values if v is not None]
        return max(values) if values else None

    @property
    def max_circle_ratio(self) -> float | None:
        return self._sup("circle_ratio")

    @property
    def max_degenerate_ratio(self) -> float | None:
        return self._sup("degenerate_ratio")

    @property
    def max_cluster_ratio(self) -> float | None:
        return self._sup("cluster_ratio")

    @property
    def all_passed(self) -> bool:
        return all(s.report.passed for s in self.samples)


def lemma_sweep(samples: int, seed: int, radius: float = 30.0) -> LemmaSweep:
    """Run :func:`verify_lemmas` on ``samples`` parameters drawn uniformly in a disk.

    Args:
        samples: Number of random parameters.
        seed: Command seed; one Philox stream drives the whole sweep.
        radius: Radius of the sampling disk.
    """
    if samples < 0:
        raise ValueError(f"samples must be >= 0, got {samples}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    rng = make_rng(seed)
    moduli = radius * np.sqrt(rng.uniform(0.0, 1.0, samples))
    angles = rng.uniform(0.0, 2.0 * math.pi, samples)
    rows = []
    for index, (r, a) in enumerate(zip(moduli, angles)):
        u_tilde = complex(cmath.rect(float(r), float(a)))
        sps = stationary_set(u_tilde)
        rows.append(LemmaSample(index, u_tilde, sps, verify_lemmas(sps)))
    return LemmaSweep(rows)
