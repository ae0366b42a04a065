"""Tests for the pseudospectral solver."""

import math

import numpy as np
import pytest

from nvlab import spectral
from nvlab.errors import DomainError, InstabilityDetectedError
from nvlab.solutions import Q1ab, Q2c
from nvlab.solver import (
    DealiasRule,
    FieldState,
    Scheme,
    StepperConfig,
    check_config,
    dt_max,
    evolve,
    lifespan_survey,
    observe,
    rhs,
    scaling_symmetry_check,
    step,
)


def gaussian(amplitude, width, x0=0.0, y0=0.0):
    def f(x, y):
        return amplitude * np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / width**2)

    return f


def smooth_state(E=0.0, N=32, L=16.0, amplitude=1.0):
    """A broad, well resolved bump with nonlinear time scale of order one."""
    return FieldState.from_function(gaussian(amplitude, 4.0, 1.0, -0.5), N, L, E)


def lump_state(N, L, solution=None):
    solution = solution or Q1ab()
    return FieldState.from_function(lambda x, y: solution.evaluate(0.0, x, y)[0], N, L, 0.0)


def relative_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


class TestFieldState:
    """Test state validation and diagnostics."""

    def test_rejects_bad_values(self):
        """Non-square, complex or non-finite samples are refused."""
        with pytest.raises(DomainError):
            FieldState(np.zeros((8, 16)), 1.0)
        with pytest.raises(DomainError):
            FieldState(np.zeros((8, 8), dtype=complex), 1.0)
        bad = np.zeros((8, 8))
        bad[1, 1] = math.nan
        with pytest.raises(DomainError):
            FieldState(bad, 1.0)
        with pytest.raises(DomainError):
            FieldState(np.zeros((12, 12)), 1.0)

    def test_diagnostics(self):
        """Mass and L2 norm of a constant field."""
        state = FieldState(np.full((8, 8), 2.0), 1.0)
        assert state.N == 8
        assert state.dx == 0.25
        assert state.mass() == pytest.approx(8.0)
        assert state.l2() == pytest.approx(4.0)
        obs = observe(state)
        assert obs.linf == 2.0
        assert obs.time == 0.0


class TestConfig:
    """Test stepper configuration."""

    def test_rejects_bad_values(self):
        """dt must be positive and cfl_safety in (0, 1]."""
        with pytest.raises(DomainError):
            StepperConfig(dt=0.0)
        with pytest.raises(DomainError):
            StepperConfig(dt=1e-3, cfl_safety=1.5)
        with pytest.raises(ValueError):
            StepperConfig(dt=1e-3, scheme="Euler")

    def test_enums_from_strings(self):
        """Scheme and dealias rule accept their names."""
        config = StepperConfig(dt=1e-3, scheme="ETDRK4", dealias_rule="None")
        assert config.scheme is Scheme.ETDRK4
        assert config.dealias_rule is DealiasRule.NONE

    def test_step_bound(self):
        """dt_max shrinks like dx^3 and steps above it are refused."""
        coarse = dt_max(32, 16.0, 0.0)
        fine = dt_max(64, 16.0, 0.0)
        assert fine == pytest.approx(coarse / 8.0, rel=0.15)
        state = smooth_state()
        check_config(state, StepperConfig(dt=coarse))
        with pytest.raises(DomainError):
            check_config(state, StepperConfig(dt=2.0 * coarse))


class TestRhs:
    """Test the right-hand side."""

    @pytest.mark.parametrize("E", [0.0, 1.0, -2.0])
    def test_linear_part_on_plane_wave(self, E):
        """For cos(kx) the linear flow gives w(k; E) sin(kx)."""
        k = 2.0
        state = FieldState.from_function(lambda x, y: np.cos(k * x), 16, math.pi, E)
        X, _ = spectral.meshgrid(16, math.pi)
        expected = 2.0 * k**3 * (1.0 - 3.0 * E / k**2) * np.sin(k * X)
        np.testing.assert_allclose(rhs(state, nonlinear=False), expected, atol=1e-10)

    @pytest.mark.slow
    def test_lump_is_stationary(self):
        """The lump has a vanishing right-hand side."""
        state = lump_state(1024, 40.0)
        assert np.linalg.norm(rhs(state)) / np.linalg.norm(state.values) < 1e-3


class TestStepping:
    """Test time stepping."""

    @pytest.mark.parametrize("scheme", list(Scheme))
    @pytest.mark.parametrize("E", [0.0, 1.0])
    def test_linear_flow_is_isometry(self, scheme, E):
        """Without the quadratic term the L2 norm is preserved."""
        rng = np.random.default_rng(2)
        state = FieldState(rng.normal(size=(32, 32)), 8.0, E)
        config = StepperConfig(dt=dt_max(32, 8.0, E), scheme=scheme, nonlinear=False)
        final = evolve(state, config, 50 * config.dt).final
        assert final.l2() == pytest.approx(state.l2(), rel=1e-10)

    @pytest.mark.parametrize("E", [0.0, 1.0, -1.0])
    def test_mass_is_conserved(self, E):
        """The integral of v drifts by less than 1e-6 over 100 steps."""
        state = FieldState.from_function(
            lambda x, y: gaussian(0.3, 1.0)(x, y) + gaussian(-0.1, 0.7, 2.0, 1.0)(x, y), 64, 10.0, E
        )
        config = StepperConfig(dt=dt_max(64, 10.0, E))
        final = evolve(state, config, 100 * config.dt).final
        assert abs(final.mass() - state.mass()) < 1e-6 * abs(state.mass())

    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_fourth_order_self_convergence(self, scheme):
        """Halving dt shrinks the terminal difference by at least 2^3.5."""
        state = smooth_state()
        dt0 = dt_max(32, 16.0, 0.0) / 2.0
        t_final = 32 * dt0
        finals = [
            evolve(state, StepperConfig(dt=dt0 / 2**j, scheme=scheme), t_final).final.values for j in range(3)
        ]
        e1 = np.linalg.norm(finals[0] - finals[1])
        e2 = np.linalg.norm(finals[1] - finals[2])
        assert math.log2(e1 / e2) >= 3.5

    def test_schemes_agree(self):
        """Both schemes converge to the same solution."""
        state = smooth_state(E=0.5)
        dt = dt_max(32, 16.0, 0.5) / 4.0
        a = evolve(state, StepperConfig(dt=dt), 40 * dt).final
        b = evolve(state, StepperConfig(dt=dt, scheme=Scheme.ETDRK4), 40 * dt).final
        assert relative_l2(a.values, b.values) < 1e-6

    def test_single_step(self):
        """step advances the time by dt and keeps the grid."""
        state = smooth_state()
        config = StepperConfig(dt=dt_max(32, 16.0, 0.0))
        after = step(state, config)
        assert after.time == pytest.approx(config.dt)
        assert after.values.shape == state.values.shape
        assert after.L == state.L

    def test_overflow_is_reported(self):
        """Non-finite growth raises InstabilityDetectedError without a blow-up flag."""
        state = FieldState.from_function(gaussian(1e200, 1.0), 16, 4.0)
        with pytest.raises(InstabilityDetectedError) as info:
            step(state, StepperConfig(dt=dt_max(16, 4.0, 0.0)))
        assert info.value.blowup_suspected is False


class TestEvolve:
    """Test the driver loop."""

    def test_observers_and_snapshots(self):
        """Observers see every step; snapshots every k steps and at the end."""
        state = smooth_state()
        config = StepperConfig(dt=dt_max(32, 16.0, 0.0))
        seen, snaps = [], []
        traj = evolve(state, config, 7 * config.dt, observers=[seen.append], snapshot=snaps.append, snapshot_every=3)
        assert traj.steps == 7
        assert len(seen) == 7
        assert traj.observations == seen
        assert [s.time for s in snaps] == pytest.approx([3 * config.dt, 6 * config.dt, 7 * config.dt])
        assert traj.final.time == pytest.approx(7 * config.dt)

    def test_last_step_lands_on_final_time(self):
        """The step is shrunk so the final time is hit exactly."""
        state = smooth_state()
        config = StepperConfig(dt=dt_max(32, 16.0, 0.0))
        traj = evolve(state, config, 2.5 * config.dt)
        assert traj.steps == 3
        assert traj.final.time == pytest.approx(2.5 * config.dt)

    def test_time_must_advance(self):
        """A final time before the state time is refused; equal time is a no-op."""
        state = smooth_state()
        config = StepperConfig(dt=dt_max(32, 16.0, 0.0))
        with pytest.raises(DomainError):
            evolve(state, config, -1.0)
        traj = evolve(state, config, 0.0)
        assert traj.steps == 0
        assert traj.final is state

    def test_scaling_symmetry(self):
        """lam^2 v(lam^3 t, lam x) evolves like the rescaled data on the rescaled box."""
        state = smooth_state(E=0.5)
        config = StepperConfig(dt=dt_max(32, 8.0, 2.0) / 2.0)
        assert scaling_symmetry_check(state, 2.0, 10 * config.dt, config) < 1e-9

    def test_lifespan_survey_small_data(self):
        """Small data live through the whole window at every energy."""
        state = smooth_state(amplitude=0.1)
        config = StepperConfig(dt=dt_max(32, 16.0, 0.0))
        results = lifespan_survey(state, [0.0, 1.0], config, 0.05)
        assert results == [(0.0, 0.05), (1.0, 0.05)]


@pytest.mark.slow
class TestExplicitSolutions:
    """Compare evolutions against closed-form solutions."""

    def test_lump_drift(self):
        """The lump drifts by less than 1e-4 in L2 over [0, 0.1]."""
        state = lump_state(512, 40.0)
        config = StepperConfig(dt=dt_max(512, 40.0, 0.0))
        final = evolve(state, config, 0.1).final
        assert relative_l2(final.values, state.values) < 1e-4

    def test_cubic_quartic_family(self):
        """q2c with c = -0.5 follows its closed form over [0, 0.05]."""
        solution = Q2c(-0.5)
        state = lump_state(512, 40.0, solution)
        config = StepperConfig(dt=dt_max(512, 40.0, 0.0))
        final = evolve(state, config, 0.05).final
        X, Y = spectral.meshgrid(512, 40.0)
        expected, _ = solution.evaluate(0.05, X, Y)
        assert relative_l2(final.values, expected) < 1e-2
