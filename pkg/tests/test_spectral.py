"""Tests for periodic grids and spectral operators."""

import math

import numpy as np
import pytest

from nvlab import spectral
from nvlab.errors import DomainError


class TestGrid:
    """Test grid construction and validation."""

    @pytest.mark.parametrize("N,L", [(4, 1.0), (100, 1.0), (64, 0.0), (64, -2.0), (64, math.inf)])
    def test_rejects_bad_grids(self, N, L):
        """N must be a power of two >= 8 and L positive."""
        with pytest.raises(DomainError):
            spectral.check_grid(N, L)

    def test_axis_is_periodic_sampling(self):
        """Samples start at -L with spacing 2L/N."""
        axis = spectral.grid_axis(8, 2.0)
        assert axis[0] == -2.0
        np.testing.assert_allclose(np.diff(axis), 0.5)
        assert axis[-1] < 2.0

    def test_nyquist_is_zeroed(self):
        """The unpaired Nyquist wavenumber is 0 on both axes."""
        k1, k2 = spectral.wavenumbers(16, math.pi)
        assert np.all(k1[8, :] == 0.0)
        assert np.all(k2[:, 8] == 0.0)
        assert k1[1, 0] == pytest.approx(1.0)

    def test_dealias_mask(self):
        """Modes with |m| < N/3 are kept on both axes."""
        mask = spectral.dealias_mask(8)
        assert mask.shape == (8, 8)
        assert mask.sum() == 25
        assert mask[0, 0]
        assert not mask[4, 0]


class TestOperators:
    """Test the spectral operators on trigonometric fields."""

    def test_derivative_of_mode(self):
        """d_x^3 cos(2x) = 8 sin(2x), d_x d_y^2 of cos(x) cos(2y) = 4 sin(x) cos(2y)."""
        N, L = 32, math.pi
        X, Y = spectral.meshgrid(N, L)
        k1, k2 = spectral.wavenumbers(N, L)
        v_hat = spectral.forward(np.cos(2 * X))
        np.testing.assert_allclose(spectral.derivative(v_hat, k1, k2, 3, 0), 8 * np.sin(2 * X), atol=1e-12)
        v_hat = spectral.forward(np.cos(X) * np.cos(2 * Y))
        np.testing.assert_allclose(
            spectral.derivative(v_hat, k1, k2, 1, 2), 4 * np.sin(X) * np.cos(2 * Y), atol=1e-12
        )

    def test_companion_field_on_axis_modes(self):
        """W = -3v for modes along x and +3v for modes along y."""
        N, L = 32, math.pi
        X, Y = spectral.meshgrid(N, L)
        k1, k2 = spectral.wavenumbers(N, L)
        W = spectral.companion_field(spectral.forward(np.cos(3 * X)), k1, k2)
        np.testing.assert_allclose(W, -3 * np.cos(3 * X), atol=1e-12)
        W = spectral.companion_field(spectral.forward(np.cos(3 * Y)), k1, k2)
        np.testing.assert_allclose(W, 3 * np.cos(3 * Y), atol=1e-12)

    def test_companion_field_of_constant_vanishes(self):
        """The zero mode is mapped to 0."""
        k1, k2 = spectral.wavenumbers(16, 1.0)
        W = spectral.companion_field(spectral.forward(np.ones((16, 16))), k1, k2)
        np.testing.assert_allclose(W, 0.0)

    def test_norms(self):
        """Box integral of 1 is 4L^2 and its L2 norm is 2L."""
        ones = np.ones((16, 16))
        assert spectral.integral(ones, 3.0) == pytest.approx(36.0)
        assert spectral.l2_norm(ones, 3.0) == pytest.approx(6.0)

    def test_hs_proxy_at_order_zero_is_l2(self):
        """Parseval: s = 0 gives the L2 norm."""
        rng = np.random.default_rng(1)
        v = rng.normal(size=(16, 16))
        k1, k2 = spectral.wavenumbers(16, 2.0)
        assert spectral.hs_proxy(spectral.forward(v), k1, k2, 2.0, s=0.0) == pytest.approx(
            spectral.l2_norm(v, 2.0)
        )
        assert spectral.hs_proxy(spectral.forward(v), k1, k2, 2.0) > spectral.l2_norm(v, 2.0)

    def test_linear_operator_is_imaginary(self):
        """-i w(k; E) has no real part."""
        k1, k2 = spectral.wavenumbers(16, 4.0)
        op = spectral.linear_operator(k1, k2, 1.5)
        assert np.all(op.real == 0.0)
