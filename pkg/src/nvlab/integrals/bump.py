"""Cutoff profiles switching from 0 to 1 on the unit interval.

Profiles accept complex arguments so they can be evaluated on a deformed
integration surface; both are analytic on the open interval (0, 1).
"""

from collections.abc import Callable

import numpy as np


def smooth_bump(s: np.ndarray) -> np.ndarray:
    """C-infinity step ``exp(1 - 1/(1 - (1 - s)^2))`` (flat at s = 0)."""
    s = np.asarray(s, dtype=complex)
    q = s * (2.0 - s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.exp(1.0 - 1.0 / q)
    return np.where(q == 0, 0.0, out)


def raised_cosine(s: np.ndarray) -> np.ndarray:
    """C1 step ``(1 - cos(pi s))/2``."""
    s = np.asarray(s, dtype=complex)
    return 0.5 * (1.0 - np.cos(np.pi * s))


PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "bump": smooth_bump,
    "cosine": raised_cosine,
}


def get_profile(name: str) -> Callable[[np.ndarray], np.ndarray]:
    """Look up a profile by name.

    Raises:
        KeyError: If the name is unknown.
    """
    if name not in PROFILES:
        raise KeyError(f"Unknown cutoff profile '{name}'. Available: {', '.join(PROFILES)}")
    return PROFILES[name]


def cutoff(radius: np.ndarray, real_radius: np.ndarray, R: float, profile: str) -> np.ndarray:
    """Radial cutoff psi_R at (possibly complex) radii.

    The branch is selected by the real radius: 0 below ``R``, the profile on
    ``[R, R + 1)`` and 1 beyond.
    """
    shape = get_profile(profile)
    real_radius = np.broadcast_to(real_radius, np.shape(radius))
    s = np.asarray(radius, dtype=complex) - R
    inside = (real_radius >= R) & (real_radius < R + 1.0)
    values = np.where(inside, shape(np.where(inside, s, 0.5)), 0.0)
    return np.where(real_radius >= R + 1.0, 1.0, values)


def band_mobility(r: np.ndarray, R: float) -> tuple[np.ndarray, np.ndarray]:
    """Radial deformation weight vanishing at ``R`` and ``R + 1``, with its derivative.

    ``4 s (1 - s)`` on the band and ``1 - exp(-4 (s - 1))`` beyond it.
    """
    s = np.asarray(r, dtype=float) - R
    in_band = s < 1.0
    m = np.where(in_band, 4.0 * s * (1.0 - s), 1.0 - np.exp(-4.0 * (s - 1.0)))
    dm = np.where(in_band, 4.0 - 8.0 * s, 4.0 * np.exp(-4.0 * (s - 1.0)))
    return np.where(s >= 0, m, 0.0), np.where(s >= 0, dm, 0.0)
