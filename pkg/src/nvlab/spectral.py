"""Periodic-box grids, wavenumbers and spectral operators.

The box is ``[-L, L)^2`` with ``N`` points per axis; axis 0 is ``x`` and
axis 1 is ``y``. Fourier modes are ``e^{+i k . x}``.
"""

import math

import numpy as np
from numpy.typing import NDArray
from scipy import fft

from nvlab.config import thread_count
from nvlab.errors import DomainError
from nvlab.symbol import dbar_inv_dz_multiplier, linear_symbol_on_grid


def check_grid(N: int, L: float) -> None:
    """Validate a grid size and half-length.

    Raises:
        DomainError: If ``N`` is not a power of two >= 8 or ``L`` is not positive.
    """
    if not isinstance(N, (int, np.integer)) or N < 8 or N & (N - 1):
        raise DomainError(f"N must be a power of two >= 8, got {N!r}")
    if not (math.isfinite(L) and L > 0):
        raise DomainError(f"L must be positive, got {L}")


def grid_axis(N: int, L: float) -> NDArray[np.float64]:
    """Sample coordinates ``-L + 2 L j / N``."""
    return -L + 2.0 * L * np.arange(N) / N


def meshgrid(N: int, L: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    axis = grid_axis(N, L)
    return np.meshgrid(axis, axis, indexing="ij")


def wavenumbers(N: int, L: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Wavenumber arrays ``(k1, k2)`` with the Nyquist component set to 0.

    Zeroing the unpaired Nyquist wavenumber keeps every real multiplier
    conjugate-symmetric, so real fields stay real.
    """
    k = np.fft.fftfreq(N, d=2.0 * L / N) * 2.0 * np.pi
    k[N // 2] = 0.0
    return np.meshgrid(k, k, indexing="ij")


def dealias_mask(N: int) -> NDArray[np.bool_]:
    """Two-thirds rule: keep modes with ``|m| < N/3`` on both axes."""
    m = np.abs(np.fft.fftfreq(N, d=1.0 / N))
    keep = m < N / 3.0
    return keep[:, None] & keep[None, :]


def forward(values: NDArray) -> NDArray[np.complex128]:
    return fft.fft2(values, workers=thread_count())


def inverse(values_hat: NDArray) -> NDArray[np.complex128]:
    return fft.ifft2(values_hat, workers=thread_count())


def inverse_real(values_hat: NDArray) -> NDArray[np.float64]:
    return inverse(values_hat).real


def derivative(values_hat: NDArray, k1: NDArray, k2: NDArray, dx: int, dy: int) -> NDArray:
    """Spectral ``d_x^dx d_y^dy`` of a real field given its transform."""
    return inverse_real((1j * k1) ** dx * (1j * k2) ** dy * values_hat)


def companion_field(values_hat: NDArray, k1: NDArray, k2: NDArray) -> NDArray[np.complex128]:
    """``W = -3 dbar^{-1} d_z v`` in physical space (complex)."""
    return inverse(-3.0 * dbar_inv_dz_multiplier(k1, k2) * values_hat)


def linear_operator(k1: NDArray, k2: NDArray, E: float) -> NDArray[np.complex128]:
    """Diagonal linear operator ``-i w(k; E)`` of ``d_t v_hat``."""
    return -1j * linear_symbol_on_grid(k1, k2, E)


def integral(values: NDArray, L: float) -> float:
    """Trapezoid integral over the periodic box."""
    N = values.shape[0]
    return float(values.sum()) * (2.0 * L / N) ** 2


def l2_norm(values: NDArray, L: float) -> float:
    N = values.shape[0]
    return math.sqrt(float(np.sum(np.abs(values) ** 2))) * (2.0 * L / N)


def hs_proxy(values_hat: NDArray, k1: NDArray, k2: NDArray, L: float, s: float = 1.0) -> float:
    """Sobolev norm ``||(1 + |k|^2)^{s/2} v_hat||`` scaled so that ``s = 0`` gives the L2 norm."""
    N = values_hat.shape[0]
    weight = (1.0 + k1 * k1 + k2 * k2) ** s
    return math.sqrt(float(np.sum(weight * np.abs(values_hat) ** 2))) * (2.0 * L / N) / N
