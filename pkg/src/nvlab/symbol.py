"""Linear symbol, phase, nonlocal multiplier and resonance function of the NV flow.

Points of the plane are plain Python ``complex`` numbers (``xi = xi1 + 1j*xi2``);
array variants accept separate real component arrays.
"""

import cmath
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from nvlab.errors import DomainError


def ensure_finite(value: complex | float, name: str) -> complex:
    """Return ``value`` as complex, rejecting NaN and infinities."""
    z = complex(value)
    if not (cmath.isfinite(z)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return z


def symbol_values(k1: ArrayLike, k2: ArrayLike, E: float) -> NDArray[np.float64]:
    """Evaluate w(k) = 2(k1^3 - 3 k1 k2^2)(1 - 3E/|k|^2) elementwise.

    The origin takes the value 0, the continuous extension of w.

    Args:
        k1: First frequency component.
        k2: Second frequency component.
        E: Energy parameter (any real).

    Returns:
        Array of symbol values broadcast from ``k1`` and ``k2``.
    """
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    rho = k1 * k1 + k2 * k2
    cubic = k1 * k1 * k1 - 3.0 * k1 * k2 * k2
    safe = np.where(rho > 0.0, rho, 1.0)
    out = 2.0 * cubic * (1.0 - 3.0 * E / safe)
    return np.where(rho > 0.0, out, 0.0)


def linear_symbol_on_grid(k1: ArrayLike, k2: ArrayLike, E: float) -> NDArray[np.float64]:
    """Symbol on a wavenumber grid; alias of :func:`symbol_values` for solver code."""
    return symbol_values(k1, k2, E)


def eval_symbol(xi: complex, E: float) -> float:
    """Evaluate the rational symbol w at a single frequency.

    Args:
        xi: Frequency as ``xi1 + 1j*xi2``.
        E: Energy parameter.

    Returns:
        The real value w(xi; E); 0 at the origin.

    Example:
        >>> eval_symbol(1 + 0j, 1.0)
        -4.0
    """
    xi = ensure_finite(xi, "xi")
    return float(symbol_values(xi.real, xi.imag, E))


def eval_phase(u: complex, xi: complex, E: float) -> float:
    """Evaluate the full phase (xi^3 + conj(xi)^3)(1 - 3E/|xi|^2) + Re(conj(u) xi).

    The cubic part equals the symbol w, so ``eval_phase(u, xi, E) ==
    eval_symbol(xi, E) + Re(conj(u) * xi)``; at ``xi = 0`` it returns 0.
    """
    u = ensure_finite(u, "u")
    xi = ensure_finite(xi, "xi")
    return eval_symbol(xi, E) + (u.conjugate() * xi).real


def dbar_inv_dz_multiplier(k1: ArrayLike, k2: ArrayLike) -> NDArray[np.complex128]:
    """Return (k1 - i k2)/(k1 + i k2) with the zero mode mapped to 0."""
    k = np.asarray(k1, dtype=float) + 1j * np.asarray(k2, dtype=float)
    nonzero = k != 0
    safe = np.where(nonzero, k, 1.0)
    return np.where(nonzero, np.conj(safe) / safe, 0.0)


def apply_dbar_inv_dz(
    field_hat: ArrayLike, k1: ArrayLike, k2: ArrayLike
) -> NDArray[np.complex128]:
    """Apply the Fourier multiplier of dbar^{-1} d to spectral coefficients.

    Args:
        field_hat: Fourier coefficients on the simulation grid.
        k1: First wavenumber component, broadcastable to ``field_hat``.
        k2: Second wavenumber component, broadcastable to ``field_hat``.

    Returns:
        The multiplied coefficients. Every nonzero mode keeps its modulus; the
        zero mode is set to 0.
    """
    field_hat = np.asarray(field_hat, dtype=complex)
    return field_hat * dbar_inv_dz_multiplier(k1, k2)


def symbol_gradient(xi: complex, E: float) -> tuple[float, float]:
    """Closed-form gradient of w at a nonzero frequency.

    Raises:
        DomainError: If ``xi`` is 0 and ``E`` is nonzero.
    """
    xi = ensure_finite(xi, "xi")
    x1, x2 = xi.real, xi.imag
    rho = x1 * x1 + x2 * x2
    if rho == 0.0:
        if E != 0.0:
            raise DomainError("symbol gradient is singular at xi = 0 for E != 0")
        return 0.0, 0.0
    cubic = x1**3 - 3.0 * x1 * x2 * x2
    factor = 1.0 - 3.0 * E / rho
    d1 = 6.0 * (x1 * x1 - x2 * x2) * factor + 12.0 * E * x1 * cubic / rho**2
    d2 = -12.0 * x1 * x2 * factor + 12.0 * E * x2 * cubic / rho**2
    return d1, d2


def resonance_H(xi: complex, xi_tilde: complex, E: float) -> float:
    """Resonance function H[xi, xi_tilde] = w(xi_tilde) - w(xi) - w(xi_tilde - xi)."""
    xi = ensure_finite(xi, "xi")
    xi_tilde = ensure_finite(xi_tilde, "xi_tilde")
    return eval_symbol(xi_tilde, E) - eval_symbol(xi, E) - eval_symbol(xi_tilde - xi, E)


def resonance_H_gradient(xi: complex, xi_tilde: complex, E: float) -> tuple[float, float]:
    """Partial derivatives of H with respect to xi1 and xi2.

    With eta = xi_tilde - xi and rho = |xi|^2:

        dH/dxi1 = -6[(xi1^2 - xi2^2)(1 - 3E/rho) - (eta1^2 - eta2^2)(1 - 3E/|eta|^2)
                     + 2E xi1^2 (xi1^2 - 3 xi2^2)/rho^2 - 2E eta1^2 (eta1^2 - 3 eta2^2)/|eta|^4]
        dH/dxi2 = -12[-xi1 xi2 (1 - 3E/rho) + eta1 eta2 (1 - 3E/|eta|^2)
                      + E xi1 xi2 (xi1^2 - 3 xi2^2)/rho^2 - E eta1 eta2 (eta1^2 - 3 eta2^2)/|eta|^4]

    Raises:
        DomainError: At ``xi = 0`` or ``xi_tilde = xi``.
    """
    xi = ensure_finite(xi, "xi")
    xi_tilde = ensure_finite(xi_tilde, "xi_tilde")
    eta = xi_tilde - xi
    if xi == 0:
        raise DomainError("resonance gradient is singular at xi = 0")
    if eta == 0:
        raise DomainError("resonance gradient is singular at xi_tilde = xi")
    x1, x2 = xi.real, xi.imag
    e1, e2 = eta.real, eta.imag
    rho = x1 * x1 + x2 * x2
    rho_eta = e1 * e1 + e2 * e2
    fx = 1.0 - 3.0 * E / rho
    fe = 1.0 - 3.0 * E / rho_eta
    d1 = -6.0 * (
        (x1 * x1 - x2 * x2) * fx
        - (e1 * e1 - e2 * e2) * fe
        + 2.0 * E * x1 * x1 * (x1 * x1 - 3.0 * x2 * x2) / rho**2
        - 2.0 * E * e1 * e1 * (e1 * e1 - 3.0 * e2 * e2) / rho_eta**2
    )
    d2 = -12.0 * (
        -x1 * x2 * fx
        + e1 * e2 * fe
        + E * x1 * x2 * (x1 * x1 - 3.0 * x2 * x2) / rho**2
        - E * e1 * e2 * (e1 * e1 - 3.0 * e2 * e2) / rho_eta**2
    )
    return d1, d2


def resonance_gradient_sweep(
    E: float,
    levels: tuple[int, ...] = (8, 16, 32, 64, 128),
    samples: int = 200,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Measure the constants of |dH/dxi2| ~ E * Nc^2 in the high-low regime.

    For each dyadic level ``Nc`` the output frequency ``xi`` has size
    ``E^{1/2} Nc/64`` and the difference ``xi_tilde - xi`` has size
    ``E^{1/2} Nc`` with comparable components (angle in [pi/8, 3pi/8] modulo
    quadrants).

    Args:
        E: Positive energy.
        levels: Dyadic values of the large frequency scale, each >= 8.
        samples: Random samples per level.
        rng: Generator; a fixed-seed Philox stream when omitted.

    Returns:
        ``(c1, c2)``, the smallest and largest observed |dH/dxi2|/(E Nc^2).
    """
    if E <= 0:
        raise DomainError(f"E must be positive, got {E}")
    if any(level < 8 for level in levels):
        raise ValueError("levels must all be >= 8")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(0))
    ratios = []
    root_e = math.sqrt(E)
    for level in levels:
        small = level / 64.0
        for _ in range(samples):
            r_xi = root_e * small * rng.uniform(1.0, 2.0)
            xi = cmath.rect(r_xi, rng.uniform(0.0, 2.0 * math.pi))
            quadrant = rng.integers(0, 4) * math.pi / 2.0
            angle = quadrant + rng.uniform(math.pi / 8.0, 3.0 * math.pi / 8.0)
            eta = cmath.rect(root_e * level * rng.uniform(1.0, 2.0), angle)
            _, d2 = resonance_H_gradient(xi, xi + eta, E)
            ratios.append(abs(d2) / (E * level * level))
    return float(min(ratios)), float(max(ratios))
