"""Tests for the stationary points of the outer phase."""

import cmath
import itertools
import math

import numpy as np
import pytest

from nvlab.stationary import (
    CaseTag,
    critical_points_plane,
    critical_radii,
    degenerate_points,
    factorized_derivative,
    in_U,
    lemma_sweep,
    omega_distances,
    phase_derivative,
    roots_zeta,
    stationary_set,
    u_curve,
    verify_lemmas,
)
from nvlab.symbol import symbol_gradient


def random_parameters(count, radius=30.0, seed=11):
    rng = np.random.default_rng(seed)
    moduli = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    angles = rng.uniform(0.0, 2.0 * math.pi, count)
    return [cmath.rect(float(r), float(a)) for r, a in zip(moduli, angles)]


def brute_force_omegas(lambdas):
    """Independent enumeration of the two admissible minimal distances."""
    pairs = [(i, j) for i, j in itertools.combinations(range(6), 2) if (i, j) != (2, 5)]
    dist = {p: abs(lambdas[p[0]] - lambdas[p[1]]) for p in pairs}
    first = min(pairs, key=lambda p: (dist[p], p))
    anti = tuple(sorted(((first[0] + 3) % 6, (first[1] + 3) % 6)))
    rest = [p for p in pairs if p not in (first, anti)]
    return dist[first], min(dist[p] for p in rest)


class TestRoots:
    """Test the critical-point cubic."""

    def test_vertex_has_triple_root(self):
        """u = 18 gives the triple root 1."""
        for z in roots_zeta(18.0):
            assert abs(z - 1.0) < 1e-4

    def test_origin_gives_cube_roots_of_unity(self):
        """u = 0 reduces the cubic to zeta^3 = 1."""
        roots = sorted(roots_zeta(0j), key=cmath.phase)
        expected = sorted((cmath.exp(2j * math.pi * k / 3) for k in range(3)), key=cmath.phase)
        for z, e in zip(roots, expected):
            assert abs(z - e) < 1e-12

    def test_on_curve_double_root(self):
        """At phi = pi/2 the curve point has double root e^{i phi} and simple root e^{-2i phi}."""
        phi = math.pi / 2
        roots = roots_zeta(u_curve(phi).point)
        near_double = [z for z in roots if abs(z - cmath.exp(1j * phi)) < 1e-6]
        near_simple = [z for z in roots if abs(z - cmath.exp(-2j * phi)) < 1e-10]
        assert len(near_double) == 2
        assert len(near_simple) == 1

    def test_residuals_and_product(self):
        """Every root solves the cubic and the product of roots is 1."""
        for u in random_parameters(500):
            roots = roots_zeta(u)
            for z in roots:
                residual = z**3 - (u.conjugate() / 6) * z**2 + (u / 6) * z - 1
                assert abs(residual) < 1e-10
            assert abs(roots[0] * roots[1] * roots[2] - 1.0) < 1e-10


class TestStationarySet:
    """Test classification and labeling of the six critical points."""

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_vertices_are_triple_degenerate(self, k):
        """At 18 e^{2 pi i k/3} all three points equal e^{-i pi k/3}."""
        sps = stationary_set(18.0 * cmath.exp(2j * math.pi * k / 3))
        assert sps.case_tag is CaseTag.TRIPLE_DEGENERATE
        assert sps.case_tag.number == 1
        for lam in sps.lambdas[:3]:
            assert abs(lam - cmath.exp(-1j * math.pi * k / 3)) < 1e-6
        assert sps.omega1 == 0.0
        assert sps.omega2 == 0.0

    def test_origin_is_interior(self):
        """u = 0 gives three distinct unimodular points."""
        sps = stationary_set(0j)
        assert sps.case_tag is CaseTag.INTERIOR_NONDEGENERATE
        first = sps.lambdas[:3]
        assert all(abs(abs(lam) - 1.0) < 1e-12 for lam in first)
        assert min(abs(a - b) for a, b in itertools.combinations(first, 2)) > 0.5

    def test_far_real_parameter_is_exterior(self):
        """u = 30 lies outside the curve; lambda_0 and lambda_2 share a ray."""
        sps = stationary_set(30.0)
        assert sps.case_tag is CaseTag.EXTERIOR
        assert sps.omega > 0
        lam0, lam1, lam2 = sps.lambdas[:3]
        assert abs(lam0) == pytest.approx(1.0 + sps.omega)
        assert abs(abs(lam0) * abs(lam2) - 1.0) < 1e-10
        assert abs(lam0 / abs(lam0) - lam2 / abs(lam2)) < 1e-8
        assert abs(abs(lam1) - 1.0) < 1e-8

    def test_on_curve_omegas(self):
        """On the curve omega1 = 0 and omega2 is the smaller distance to +-e^{-i phi}."""
        phi = math.pi / 2
        sps = stationary_set(u_curve(phi).point)
        assert sps.case_tag is CaseTag.ON_CURVE
        assert sps.omega1 == pytest.approx(0.0, abs=1e-12)
        half = cmath.exp(0.5j * phi)
        expected = min(abs(half - cmath.exp(-1j * phi)), abs(half + cmath.exp(-1j * phi)))
        assert sps.omega2 == pytest.approx(expected, rel=1e-6)

    def test_normalization_and_antipodes(self):
        """lambda_0 lambda_1 lambda_2 = 1 and the last three points are the negated first three."""
        for u in random_parameters(500):
            sps = stationary_set(u)
            lam = sps.lambdas
            assert abs(lam[0] * lam[1] * lam[2] - 1.0) < 1e-10
            for j in range(3):
                assert lam[j + 3] == -lam[j]

    def test_points_are_critical(self):
        """Each point squared is a root of the cubic."""
        for u in random_parameters(200, seed=2):
            sps = stationary_set(u)
            for lam in sps.lambdas:
                z = lam * lam
                residual = z**3 - (u.conjugate() / 6) * z**2 + (u / 6) * z - 1
                assert abs(residual) < 1e-8 * max(1.0, abs(u))

    def test_factorization_matches_derivative(self):
        """-(3/l^4) prod (l^2 - l_j^2) reproduces the derivative of the phase."""
        rng = np.random.default_rng(4)
        for u in random_parameters(40, seed=3):
            sps = stationary_set(u)
            for _ in range(50):
                lam = cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * math.pi))
                a = factorized_derivative(sps, lam)
                b = phase_derivative(u, lam)
                assert abs(a - b) <= 1e-8 * max(abs(b), 1.0)

    def test_in_U_criterion(self):
        """The origin is inside, vertices are on the boundary, u = 30 is outside."""
        assert in_U(0j)
        assert in_U(18.0)
        assert not in_U(30.0)

    def test_scaled_curve_points_are_inside(self):
        """Shrunken curve points s * U(phi) with s in [0, 0.9] lie in the closed region."""
        phis = np.linspace(0.0, 2.0 * math.pi, 360, endpoint=False)
        for s in np.linspace(0.0, 0.9, 10):
            for phi in phis:
                assert in_U(s * u_curve(float(phi)).point)

    def test_curve_points_are_on_boundary(self):
        """Points of the curve away from the vertices classify as OnCurve."""
        for phi in (0.4, 1.3, 2.5, 4.0, 5.5):
            assert stationary_set(u_curve(phi).point).case_tag is CaseTag.ON_CURVE


class TestOmegaDistances:
    """Test the minimal admissible distances."""

    def test_matches_exhaustive_enumeration(self):
        """omega1 and omega2 equal an independent pair enumeration."""
        for u in random_parameters(1000, seed=8):
            sps = stationary_set(u)
            omega1, omega2, _ = omega_distances(sps)
            expected1, expected2 = brute_force_omegas(sps.lambdas)
            assert omega1 == pytest.approx(expected1, abs=1e-12)
            assert omega2 == pytest.approx(expected2, abs=1e-12)

    def test_ordering(self):
        """0 <= omega1 <= omega2 < 2."""
        for u in random_parameters(1000, seed=12):
            sps = stationary_set(u)
            assert 0.0 <= sps.omega1 <= sps.omega2 + 1e-12
            assert sps.omega2 < 2.0

    def test_excluded_pair_never_realizes(self):
        """The pair (2, 5) is never a realizing pair."""
        for u in random_parameters(200, seed=13):
            pair1, pair2 = stationary_set(u).realizing_pairs
            assert (2, 5) not in (pair1, pair2)


class TestLemmas:
    """Test the clustering report."""

    def test_vertex_passes_trivially(self):
        """At a vertex every distance is 0 and the ratios are not defined."""
        report = verify_lemmas(stationary_set(18.0))
        assert report.passed
        assert report.circle_ratio is None
        assert report.degenerate_ratio is None

    def test_report_fields(self):
        """The report serializes its booleans and ratios."""
        report = verify_lemmas(stationary_set(3.0 + 4.0j)).to_dict()
        assert set(report) == {
            "common_base",
            "common_base_ok",
            "cluster_ratio",
            "cluster_ok",
            "circle_ratio",
            "degenerate_ratio",
            "omega_order_ok",
            "passed",
        }

    def test_sweep_is_reproducible(self):
        """The same seed draws the same parameters."""
        first = lemma_sweep(50, seed=7)
        second = lemma_sweep(50, seed=7)
        assert [s.u_tilde for s in first.samples] == [s.u_tilde for s in second.samples]
        assert [s.u_tilde for s in lemma_sweep(50, seed=8).samples] != [s.u_tilde for s in first.samples]

    def test_sweep_ordering_and_constants(self):
        """Every sample satisfies omega1 <= omega2 < 2; the measured constants are finite."""
        sweep = lemma_sweep(500, seed=1)
        assert len(sweep.samples) == 500
        assert all(s.report.omega_order_ok for s in sweep.samples)
        for value in (sweep.max_circle_ratio, sweep.max_degenerate_ratio):
            assert value is None or math.isfinite(value)

    def test_base_cluster_measured_outside_curve(self):
        """Outside the curve only the base cluster is bounded, and it always is."""
        for u in (40.0 + 5.0j, -25.0 + 3.0j, 2.0 + 29.0j):
            sps = stationary_set(u)
            assert not sps.in_U
            report = verify_lemmas(sps)
            assert report.cluster_ratio is not None
            assert report.cluster_ratio <= 2.0 + 1e-9
            assert report.passed

    @pytest.mark.slow
    def test_full_sweep_passes(self):
        """Ten thousand random parameters pass every check of the report."""
        sweep = lemma_sweep(10_000, seed=2024)
        assert len(sweep.samples) == 10_000
        assert any(s.sps.in_U for s in sweep.samples)
        assert any(not s.sps.in_U for s in sweep.samples)
        failures = [s.u_tilde for s in sweep.samples if not s.report.passed]
        assert failures == []
        assert all(s.report.common_base_ok for s in sweep.samples)
        assert sweep.max_cluster_ratio <= 2.0 + 1e-9

    def test_degenerate_points(self):
        """The six collapse points are the sixth roots e^{-i pi k/3}."""
        points = degenerate_points()
        assert len(points) == 6
        assert all(abs(p**6 - 1.0) < 1e-12 for p in points)

    def test_sweep_rejects_bad_arguments(self):
        """Negative counts and non-positive radii are rejected."""
        with pytest.raises(ValueError):
            lemma_sweep(-1, seed=0)
        with pytest.raises(ValueError):
            lemma_sweep(10, seed=0, radius=0.0)


class TestPlaneCriticalPoints:
    """Test the critical points of the full phase in the frequency plane."""

    @pytest.mark.parametrize("u", [0j, 5.0 + 2.0j, 30.0, -40.0 + 10.0j])
    def test_gradient_vanishes(self, u):
        """grad w(xi) + u = 0 at every returned point."""
        points = critical_points_plane(u, 1.0)
        assert points
        for xi in points:
            d1, d2 = symbol_gradient(xi, 1.0)
            assert abs(complex(d1 + u.real, d2 + u.imag)) < 1e-6 * (1.0 + abs(u))

    def test_radii_include_ball_radius(self):
        """Breakpoint radii are sorted and include 0 and 2 E^{1/2}."""
        radii = critical_radii(30.0, 4.0)
        assert radii == sorted(radii)
        assert radii[0] == 0.0
        assert 4.0 in radii
