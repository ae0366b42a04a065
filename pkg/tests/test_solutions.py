"""Tests for the closed-form solution families and their invariants."""

import math

import numpy as np
import pytest

from nvlab.errors import BlowUpReachedError, DomainError
from nvlab.solutions import (
    C0,
    Q1ab,
    Q2c,
    Qn0,
    Scaled,
    Solution,
    blowup_scan,
    create_solution,
    eval_solution,
    l2_growth,
    l2_norm_squared,
    local_l2_estimate,
    mass,
    nonzero_root_ratio,
    nv_residual,
    radial_decay_slope,
    w_field,
)


def sample_points(count=100, half=2.0, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-half, half, count), rng.uniform(-half, half, count)


def finite_difference_w(solution, t, x, y, h=1e-4):
    """24 d_z^2 log F by central differences, d_z^2 = (d_xx - 2i d_xy - d_yy)/4."""

    def logF(dx, dy):
        return np.log(solution.denominator(t, x + dx, y + dy))

    f_xx = (logF(h, 0) - 2 * logF(0, 0) + logF(-h, 0)) / h**2
    f_yy = (logF(0, h) - 2 * logF(0, 0) + logF(0, -h)) / h**2
    f_xy = (logF(h, h) - logF(h, -h) - logF(-h, h) + logF(-h, -h)) / (4 * h * h)
    return 24.0 * (f_xx - 2j * f_xy - f_yy) / 4.0


class TestFamilies:
    """Test family construction and evaluation."""

    def test_parameter_domains(self):
        """Positivity conditions are enforced at construction."""
        with pytest.raises(DomainError):
            Q1ab(2.0, 0.0)
        with pytest.raises(DomainError):
            Q1ab(1.5, 1.5)
        with pytest.raises(DomainError):
            Q2c(C0)
        with pytest.raises(DomainError):
            Q2c(-2.0)
        with pytest.raises(DomainError):
            Qn0(0)
        Q1ab(1.0, 1.0)
        Q2c(1.7)

    def test_threshold_value(self):
        """C0 = 4/3^{3/4} exceeds 1."""
        assert C0 == pytest.approx(4.0 / 3.0**0.75)
        assert C0 > 1.0

    def test_create_solution(self):
        """Families are built from positional parameters."""
        assert isinstance(create_solution("q1ab", [0.5, -0.5]), Q1ab)
        assert create_solution("q2c", [0.5]).c == 0.5
        assert create_solution("QN0", [3]).n == 3
        assert create_solution("q1ab").to_dict() == {"family": "q1ab", "a": 0.0, "b": 0.0}
        with pytest.raises(ValueError):
            create_solution("kdv", [])
        with pytest.raises(ValueError):
            create_solution("q2c", [0.1, 0.2])
        with pytest.raises(DomainError):
            create_solution("qn0", [2.5])

    def test_lump_at_origin(self):
        """Q1_00 is -8/(1 + r^2)^2."""
        x, y = sample_points()
        v, F = eval_solution(Q1ab(), 0.0, x, y)
        np.testing.assert_allclose(v, -8.0 / (1.0 + x * x + y * y) ** 2, rtol=1e-12)
        np.testing.assert_allclose(F, 1.0 + x * x + y * y)

    def test_first_gould_hopper_is_the_lump(self):
        """Q_{1,0} coincides with Q1_00 at every time."""
        x, y = sample_points()
        for t in (0.0, 2.0):
            np.testing.assert_allclose(
                Qn0(1).evaluate(t, x, y)[0], Q1ab().evaluate(t, x, y)[0], rtol=1e-12
            )

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_direct_formula_matches_log_potential(self, n):
        """The |P'|^2 formula equals -2 Delta log(1 + |P|^2)."""
        sol = Qn0(n)
        x, y = sample_points(seed=n)
        direct, _ = sol.evaluate(0.7, x, y)
        generic, _ = Solution.evaluate(sol, 0.7, x, y)
        np.testing.assert_allclose(direct, generic, rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(
            sol.w_field(0.7, x, y), Solution.w_field(sol, 0.7, x, y), rtol=1e-8, atol=1e-10
        )

    @pytest.mark.parametrize("solution", [Qn0(2), Q1ab(0.5, -1.0), Q2c(-0.5)])
    def test_w_matches_finite_differences(self, solution):
        """W = 24 d_z^2 log F agrees with finite differences."""
        x, y = sample_points(seed=3)
        W = w_field(solution, 0.3, x, y)
        fd = finite_difference_w(solution, 0.3, x, y)
        assert np.max(np.abs(W - fd)) < 1e-5 * np.max(np.abs(W))

    def test_scaled_family(self):
        """v_lam(t, x, y) = lam^2 v(lam^3 t, lam x, lam y)."""
        inner = Qn0(2)
        scaled = Scaled(2.0, inner)
        x, y = sample_points()
        v, _ = scaled.evaluate(0.1, x, y)
        expected, _ = inner.evaluate(0.8, 2.0 * x, 2.0 * y)
        np.testing.assert_allclose(v, 4.0 * expected, rtol=1e-8)
        assert scaled.to_dict()["inner"] == {"family": "qn0", "n": 2}
        with pytest.raises(DomainError):
            Scaled(0.0, inner)

    def test_evaluation_past_blowup_raises(self):
        """A non-positive log-argument raises BlowUpReachedError."""
        sol = Q2c(0.5)
        result = blowup_scan(sol)
        x, y = result.location
        with pytest.raises(BlowUpReachedError):
            sol.evaluate(result.crossing + 0.01, np.array([x]), np.array([y]))


class TestBlowup:
    """Test the blow-up scan of the cubic-quartic family."""

    @pytest.mark.parametrize("c", [0.5, 1.0, 1.5])
    def test_positive_c_blows_up(self, c):
        """The minimum 1 - 27c^4/256 reaches 0 at t = (1 - 27c^4/256)/(24c)."""
        result = blowup_scan(Q2c(c))
        m0 = 1.0 - 27.0 * c**4 / 256.0
        assert result.blows_up
        assert result.min_denominator == pytest.approx(m0, rel=1e-8)
        assert result.crossing == pytest.approx(m0 / (24.0 * c), rel=1e-8)
        lo, hi = result.bracket
        assert lo <= result.crossing <= hi
        x, y = result.location
        assert min(abs(x), abs(y)) < 1e-4
        assert min(x, y) == pytest.approx(-0.75 * c, abs=1e-4)

    @pytest.mark.parametrize("c", [-0.5, 0.0])
    def test_nonpositive_c_is_global(self, c):
        """No crossing on [0, 100] for c <= 0."""
        result = blowup_scan(Q2c(c))
        assert not result.blows_up
        assert result.bracket is None
        assert all(m > 0 for _, m in result.minima)

    def test_minima_match_a_space_time_grid(self):
        """The reported minima agree with a 64^2 spatial grid at each scan time."""
        solution = Q2c(1.0)
        result = blowup_scan(solution, [0.0, 0.02, 0.05, 0.1])
        axis = np.linspace(-2.0, 2.0, 64)
        X, Y = np.meshgrid(axis, axis, indexing="ij")
        for t, m in result.minima:
            grid_min = float(np.min(solution.denominator(t, X, Y)))
            assert m <= grid_min + 1e-12
            assert grid_min - m < 1e-2
        assert result.bracket == (0.02, 0.05)

    def test_other_families_rejected(self):
        """The scan is specific to the cubic-quartic family."""
        with pytest.raises(DomainError):
            blowup_scan(Q1ab())


class TestMass:
    """Test the mass integral."""

    def test_lump_mass(self):
        """mass(Q1_00) = -8 pi."""
        assert mass(Q1ab()) == pytest.approx(-8.0 * math.pi, rel=2e-3)

    def test_shifted_lump_mass(self):
        """The mass does not depend on (a, b)."""
        assert mass(Q1ab(1.0, -0.5)) == pytest.approx(-8.0 * math.pi, rel=2e-3)

    def test_quartic_mass(self):
        """mass(Q2_0) = -16 pi."""
        assert mass(Q2c(0.0)) == pytest.approx(-16.0 * math.pi, rel=2e-3)

    def test_scaling_preserves_mass(self):
        """lam^2 v(lam x) has the same integral."""
        assert mass(Scaled(3.0, Q1ab())) == pytest.approx(-8.0 * math.pi, rel=2e-3)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_gould_hopper_masses(self, n):
        """mass(Q_{n,0}) = -8 n pi."""
        sol = Qn0(n)
        assert mass(sol) == pytest.approx(sol.expected_mass, rel=2e-3)
        assert sol.expected_mass == pytest.approx(-8.0 * n * math.pi)


class TestDecayAndResidual:
    """Test spatial decay and the equation residual."""

    @pytest.mark.parametrize(
        "solution,exponent",
        [(Q1ab(), 4.0), (Q2c(0.0), 6.0), (Q2c(0.5), 3.0), (Qn0(2), 6.0), (Qn0(3), 8.0)],
    )
    def test_radial_decay(self, solution, exponent):
        """max |v| decays like r^{-p} with the family exponent."""
        assert solution.decay_exponent == exponent
        assert radial_decay_slope(solution) == pytest.approx(-exponent, abs=0.1)

    @pytest.mark.slow
    def test_lump_is_stationary(self):
        """Q1_00 solves the equation with zero time derivative."""
        assert nv_residual(Q1ab(), 0.0, N=1024, L=60.0) < 1e-3

    @pytest.mark.slow
    def test_gould_hopper_solves_equation(self):
        """Q_{2,0} solves the zero-energy equation."""
        assert nv_residual(Qn0(2), 0.5, N=1024, L=60.0) < 1e-3


class TestL2Growth:
    """Test the L2 growth of the Gould-Hopper family."""

    def test_root_ratio(self):
        """Roots of z^3 + 48 t have modulus (48 t)^{1/3}."""
        for t in (1.0, 8.0, 64.0):
            assert nonzero_root_ratio(3, t) == pytest.approx(48.0 ** (1.0 / 3.0), rel=1e-8)
        with pytest.raises(DomainError):
            nonzero_root_ratio(3, 0.0)

    def test_local_formula_at_large_time(self):
        """For well separated simple roots the L2 norm follows (64 pi/3) sum |P'(z_k)|^2."""
        value = l2_norm_squared(Qn0(3), 64.0)
        assert value == pytest.approx(local_l2_estimate(3, 64.0), rel=1e-2)

    def test_requires_degree_three(self):
        """Growth needs n >= 3 and a Gould-Hopper solution."""
        with pytest.raises(DomainError):
            l2_growth(Qn0(2), [1, 2, 4])
        with pytest.raises(DomainError):
            l2_growth(Q1ab(), [1, 2, 4])
        with pytest.raises(DomainError):
            l2_growth(Qn0(3), [1, 2])

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [3, 4])
    def test_growth_on_dyadic_times(self, n):
        """||Q_{n,0}(t)||^2 increases on t = 1..64 with slope at least 1/3."""
        growth = l2_growth(Qn0(n), [1, 2, 4, 8, 16, 32, 64])
        assert growth.increasing
        assert growth.slope >= 1.0 / 3.0
