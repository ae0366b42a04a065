"""Gould-Hopper polynomials ``P_n(t, z) = n! sum_k (8t)^k z^(n-3k) / (k! (n-3k)!)``.

Coefficients are exact Python integers; floats appear only at evaluation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

# Largest coefficient that still converts to a finite float.
MAX_COEFFICIENT_BITS = 1023

Poly = dict[tuple[int, int], int]


@dataclass(frozen=True)
class GHPoly:
    """Exact Gould-Hopper polynomial.

    Attributes:
        n: Degree in ``z``.
        coeffs: ``coeffs[k]`` multiplies ``z^(n-3k) t^k`` for ``k = 0..n//3``.
    """

    n: int
    coeffs: tuple[int, ...] = field(repr=False)

    def terms(self) -> Poly:
        """Coefficients keyed by ``(t power, z power)``."""
        return {(k, self.n - 3 * k): c for k, c in enumerate(self.coeffs)}

    def z_coefficients(self, t: float) -> list[float]:
        """Coefficients of the polynomial in ``z`` at fixed ``t``, highest power first."""
        out = [0.0] * (self.n + 1)
        for k, c in enumerate(self.coeffs):
            out[3 * k] = float(c) * t**k
        return out


def gh_poly(n: int) -> GHPoly:
    """Build ``P_n`` with exact integer coefficients.

    Raises:
        ValueError: If ``n`` is negative or not an integer.
        OverflowError: If a coefficient does not fit a double.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    n = int(n)
    coeffs = []
    for k in range(n // 3 + 1):
        c = math.factorial(n) * 8**k // (math.factorial(k) * math.factorial(n - 3 * k))
        if c.bit_length() > MAX_COEFFICIENT_BITS:
            raise OverflowError(f"coefficient {k} of P_{n} exceeds the double range")
        coeffs.append(c)
    return GHPoly(n, tuple(coeffs))


def _z_derivative_coefficients(coeffs: list[float], order: int) -> list[float]:
    out = list(coeffs)
    for _ in range(order):
        degree = len(out) - 1
        if degree == 0:
            return [0.0]
        out = [c * (degree - i) for i, c in enumerate(out[:-1])]
    return out


def gh_eval(p: GHPoly, t: float, z, order: int = 0):
    """Evaluate ``d^order P_n / dz^order`` at time ``t`` by Horner's rule in ``z``.

    ``z`` may be a complex scalar or array.
    """
    coeffs = _z_derivative_coefficients(p.z_coefficients(float(t)), order)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in coeffs:
        acc = acc * z + c
    return acc if acc.ndim else complex(acc)


def _add(a: Poly, b: Poly, scale: int = 1) -> Poly:
    out = dict(a)
    for key, c in b.items():
        out[key] = out.get(key, 0) + scale * c
    return {key: c for key, c in out.items() if c != 0}


def dz(poly: Poly) -> Poly:
    return {(i, j - 1): j * c for (i, j), c in poly.items() if j > 0}


def dt(poly: Poly) -> Poly:
    return {(i - 1, j): i * c for (i, j), c in poly.items() if i > 0}


def _times_z(poly: Poly) -> Poly:
    return {(i, j + 1): c for (i, j), c in poly.items()}


def _times_t(poly: Poly) -> Poly:
    return {(i + 1, j): c for (i, j), c in poly.items()}


@dataclass(frozen=True)
class GHIdentityReport:
    """Outcome of the exact identity checks, one entry per failing ``n``.

    Attributes:
        n_max: Largest degree checked.
        recurrence_failures: ``n`` with ``(z + 24 t dz^2) P_{n-1} != P_n``.
        derivative_failures: ``n`` with ``dz P_n != n P_{n-1}``.
        airy_failures: ``n`` with ``dt P_n != 8 dz^3 P_n``.
    """

    n_max: int
    recurrence_failures: list[int]
    derivative_failures: list[int]
    airy_failures: list[int]

    @property
    def passed(self) -> bool:
        return not (self.recurrence_failures or self.derivative_failures or self.airy_failures)


def gh_identities_check(n_max: int) -> GHIdentityReport:
    """Check the recurrence, derivative and Airy identities exactly for ``n = 1..n_max``."""
    if n_max < 3:
        raise ValueError(f"n_max must be >= 3, got {n_max}")
    recurrence, derivative, airy = [], [], []
    previous = gh_poly(0).terms()
    for n in range(1, n_max + 1):
        current = gh_poly(n).terms()
        raised = _add(_times_z(previous), {k: 24 * c for k, c in _times_t(dz(dz(previous))).items()})
        if _add(raised, current, -1):
            recurrence.append(n)
        if _add(dz(current), {k: n * c for k, c in previous.items()}, -1):
            derivative.append(n)
        if _add(dt(current), {k: 8 * c for k, c in dz(dz(dz(current))).items()}, -1):
            airy.append(n)
        previous = current
    return GHIdentityReport(n_max, recurrence, derivative, airy)
