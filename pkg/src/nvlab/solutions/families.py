"""Closed-form zero-energy solution families of log type.

Every family is written through a positive function ``F(t, x, y)``:

    v = -2 Delta log F = -2 (F Delta F - |grad F|^2) / F^2
    W = 24 d_z^2 log F = 24 (F F_zz - F_z^2) / F^2

with ``d_z = (d_x - i d_y)/2``. The companion field ``W = -3 dbar^{-1} d_z v``
gives the real vector ``(Re W, Im W)`` of the evolution equation.
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from nvlab.errors import BlowUpReachedError, DomainError
from nvlab.solutions.gould_hopper import GHPoly, gh_eval, gh_poly

# Positivity threshold 4/3^{3/4} of the cubic-quartic family at t = 0.
C0 = 4.0 / 3.0**0.75


@dataclass(frozen=True)
class LogPotential:
    """``F`` and its first and second spatial partial derivatives."""

    F: np.ndarray
    F_x: np.ndarray
    F_y: np.ndarray
    F_xx: np.ndarray
    F_xy: np.ndarray
    F_yy: np.ndarray

    @property
    def F_z(self) -> np.ndarray:
        return 0.5 * (self.F_x - 1j * self.F_y)

    @property
    def F_zz(self) -> np.ndarray:
        return 0.25 * (self.F_xx - 2j * self.F_xy - self.F_yy)

    @property
    def laplacian(self) -> np.ndarray:
        return self.F_xx + self.F_yy

    @classmethod
    def from_complex(cls, F, F_z, F_zz, F_zzbar) -> "LogPotential":
        """Build from the Wirtinger derivatives of a real ``F``."""
        F_zz = np.asarray(F_zz, dtype=complex)
        return cls(
            F=np.asarray(F, dtype=float),
            F_x=2.0 * np.real(F_z),
            F_y=-2.0 * np.imag(F_z),
            F_xx=2.0 * (F_zz.real + F_zzbar),
            F_xy=-2.0 * F_zz.imag,
            F_yy=2.0 * (F_zzbar - F_zz.real),
        )


class Solution(ABC):
    """A closed-form solution of the zero-energy equation.

    Subclasses provide :meth:`log_potential`; values, the companion field and
    blow-up monitoring follow from it.
    """

    family: ClassVar[str]

    @abstractmethod
    def log_potential(self, t: float, x, y) -> LogPotential:
        """``F`` and its spatial derivatives at time ``t``."""
        pass

    @property
    @abstractmethod
    def expected_mass(self) -> float:
        """Integral of ``v`` over the plane."""
        pass

    @property
    @abstractmethod
    def decay_exponent(self) -> float:
        """``p`` with ``|v| ~ r^-p`` at infinity at ``t = 0``."""
        pass

    @abstractmethod
    def params(self) -> dict[str, float]:
        pass

    def _potential(self, t: float, x, y) -> LogPotential:
        lp = self.log_potential(float(t), np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        smallest = float(np.min(lp.F))
        if smallest <= 0.0:
            raise BlowUpReachedError(float(t), smallest)
        return lp

    def evaluate(self, t: float, x, y) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(v, F)``.

        Raises:
            BlowUpReachedError: If ``F <= 0`` at some point.
        """
        lp = self._potential(t, x, y)
        F = lp.F
        grad2 = lp.F_x**2 + lp.F_y**2
        v = -2.0 * (F * lp.laplacian - grad2) / F**2
        return v, F

    def w_field(self, t: float, x, y) -> np.ndarray:
        """Companion field ``W = 24 d_z^2 log F``."""
        lp = self._potential(t, x, y)
        return 24.0 * (lp.F * lp.F_zz - lp.F_z**2) / lp.F**2

    def denominator(self, t: float, x, y) -> np.ndarray:
        """The log-argument ``F`` (no positivity check)."""
        return self.log_potential(float(t), np.asarray(x, dtype=float), np.asarray(y, dtype=float)).F

    def to_dict(self) -> dict:
        return {"family": self.family, **self.params()}


class Q1ab(Solution):
    """``F = 1 + a x + b y + x^2 + y^2``; a stationary lump when ``a^2 + b^2 < 4``."""

    family = "q1ab"

    def __init__(self, a: float = 0.0, b: float = 0.0) -> None:
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError("a and b must be finite")
        if a * a + b * b >= 4.0:
            raise DomainError(f"q1ab needs a^2 + b^2 < 4, got a={a}, b={b}")
        self.a = float(a)
        self.b = float(b)

    def log_potential(self, t, x, y):
        one = np.ones(np.broadcast(x, y).shape)
        return LogPotential(
            F=1.0 + self.a * x + self.b * y + x * x + y * y,
            F_x=self.a + 2.0 * x + 0.0 * y,
            F_y=self.b + 2.0 * y + 0.0 * x,
            F_xx=2.0 * one,
            F_xy=0.0 * one,
            F_yy=2.0 * one,
        )

    @property
    def expected_mass(self) -> float:
        return -8.0 * math.pi

    @property
    def decay_exponent(self) -> float:
        return 4.0

    def params(self):
        return {"a": self.a, "b": self.b}


class Q2c(Solution):
    """``F = 1 - 24 c t + c (x^3 + y^3) + (x^2 + y^2)^2``.

    Positive at ``t = 0`` exactly when ``|c| < C0``; for ``c > 0`` the minimum
    of ``F`` reaches 0 in finite positive time.
    """

    family = "q2c"

    def __init__(self, c: float = 0.0) -> None:
        if not math.isfinite(c) or abs(c) >= C0:
            raise DomainError(f"q2c needs |c| < {C0:.6f}, got {c}")
        self.c = float(c)

    def log_potential(self, t, x, y):
        c = self.c
        r2 = x * x + y * y
        return LogPotential(
            F=1.0 - 24.0 * c * t + c * (x**3 + y**3) + r2 * r2,
            F_x=3.0 * c * x * x + 4.0 * x * r2,
            F_y=3.0 * c * y * y + 4.0 * y * r2,
            F_xx=6.0 * c * x + 12.0 * x * x + 4.0 * y * y,
            F_xy=8.0 * x * y,
            F_yy=6.0 * c * y + 4.0 * x * x + 12.0 * y * y,
        )

    @property
    def expected_mass(self) -> float:
        return -16.0 * math.pi

    @property
    def decay_exponent(self) -> float:
        return 6.0 if self.c == 0 else 3.0

    def params(self):
        return {"c": self.c}


class Qn0(Solution):
    """``F = 1 + |P_n(t, z)|^2`` with the Gould-Hopper polynomial ``P_n``.

    ``v = -8 |P_n'|^2 / (1 + |P_n|^2)^2``; global in time with growing L2 norm
    for ``n >= 3``.
    """

    family = "qn0"

    def __init__(self, n: int = 1) -> None:
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        if not isinstance(n, int) or n < 1:
            raise DomainError(f"qn0 needs an integer n >= 1, got {n!r}")
        self.n = n
        self.poly: GHPoly = gh_poly(n)

    def derivatives(self, t: float, z) -> tuple:
        """``(P, P', P'')`` at complex points ``z``."""
        return tuple(gh_eval(self.poly, t, z, order) for order in range(3))

    def log_potential(self, t, x, y):
        P, P1, P2 = self.derivatives(t, x + 1j * y)
        Pc = np.conj(P)
        return LogPotential.from_complex(
            F=1.0 + np.abs(P) ** 2,
            F_z=P1 * Pc,
            F_zz=P2 * Pc,
            F_zzbar=np.abs(P1) ** 2,
        )

    def evaluate(self, t, x, y):
        P, P1, _ = self.derivatives(float(t), np.asarray(x) + 1j * np.asarray(y))
        D = 1.0 + np.abs(P) ** 2
        return -8.0 * np.abs(P1) ** 2 / D**2, D

    def w_field(self, t, x, y):
        P, P1, P2 = self.derivatives(float(t), np.asarray(x) + 1j * np.asarray(y))
        Pc = np.conj(P)
        D = 1.0 + np.abs(P) ** 2
        return 24.0 * Pc * (P2 * D - P1 * P1 * Pc) / D**2

    @property
    def expected_mass(self) -> float:
        return -8.0 * self.n * math.pi

    @property
    def decay_exponent(self) -> float:
        return 2.0 * (self.n + 1)

    def params(self):
        return {"n": self.n}


class Scaled(Solution):
    """``v_lam(t, x, y) = lam^2 v(lam^3 t, lam x, lam y)``."""

    family = "scaled"

    def __init__(self, lam: float, inner: Solution) -> None:
        if not (math.isfinite(lam) and lam > 0):
            raise DomainError(f"scaling factor must be positive, got {lam}")
        self.lam = float(lam)
        self.inner = inner

    def log_potential(self, t, x, y):
        lam = self.lam
        lp = self.inner.log_potential(lam**3 * t, lam * x, lam * y)
        return LogPotential(
            F=lp.F,
            F_x=lam * lp.F_x,
            F_y=lam * lp.F_y,
            F_xx=lam * lam * lp.F_xx,
            F_xy=lam * lam * lp.F_xy,
            F_yy=lam * lam * lp.F_yy,
        )

    @property
    def expected_mass(self) -> float:
        return self.inner.expected_mass

    @property
    def decay_exponent(self) -> float:
        return self.inner.decay_exponent

    def params(self):
        return {"lam": self.lam, **{f"inner_{k}": v for k, v in self.inner.params().items()}}

    def to_dict(self) -> dict:
        return {"family": self.family, "lam": self.lam, "inner": self.inner.to_dict()}


FAMILIES: dict[str, type[Solution]] = {"q1ab": Q1ab, "q2c": Q2c, "qn0": Qn0}

_ARITY = {"q1ab": (0, 2), "q2c": (0, 1), "qn0": (0, 1)}


def create_solution(family: str, params: Sequence[float] = ()) -> Solution:
    """Build a family member from positional parameters.

    Args:
        family: One of ``q1ab`` (a, b), ``q2c`` (c), ``qn0`` (n).
        params: Parameters in the order above; omitted ones take their defaults.

    Raises:
        ValueError: If the family is unknown or the parameter count is wrong.
        DomainError: If the parameters violate the family's positivity condition.
    """
    family = family.lower()
    if family not in FAMILIES:
        raise ValueError(f"Unknown family '{family}'. Available: {', '.join(FAMILIES)}")
    low, high = _ARITY[family]
    if not low <= len(params) <= high:
        raise ValueError(f"{family} takes at most {high} parameters, got {len(params)}")
    if family == "qn0" and params:
        n = params[0]
        if float(n) != int(n):
            raise DomainError(f"qn0 needs an integer n, got {n}")
        return Qn0(int(n))
    return FAMILIES[family](*[float(p) for p in params])


def eval_solution(spec: Solution, t: float, x, y) -> tuple[np.ndarray, np.ndarray]:
    """``(v, log-argument)`` of ``spec`` at ``(t, x, y)``."""
    return spec.evaluate(t, x, y)


def w_field(spec: Solution, t: float, x, y) -> np.ndarray:
    """Closed-form companion field ``W`` of ``spec``."""
    return spec.w_field(t, x, y)
