"""Pseudospectral time integration of the evolution equation on a periodic box.

In Fourier space the equation reads

    d_t v_hat = -i w(k; E) v_hat + 2 i (k1 F[v Re W] + k2 F[v Im W]),
    W = -3 dbar^{-1} d_z v,

so the stiff part is diagonal and is integrated exactly (integrating-factor
RK4) or through exponential time differencing (ETDRK4).
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from nvlab import spectral
from nvlab.errors import DomainError, InstabilityDetectedError
from nvlab.symbol import linear_symbol_on_grid

logger = logging.getLogger(__name__)

GROWTH_LIMIT = 10.0
CONTOUR_POINTS = 32
CONTOUR_RADIUS = 1.0


class Scheme(StrEnum):
    """Time-stepping scheme."""

    IF_RK4 = "IntegratingFactorRK4"
    ETDRK4 = "ETDRK4"


class DealiasRule(StrEnum):
    """Treatment of the quadratic term."""

    TWO_THIRDS = "TwoThirds"
    NONE = "None"


@dataclass
class FieldState:
    """Real field on ``[-L, L)^2`` at one instant.

    Attributes:
        values: ``N x N`` samples, axis 0 along ``x``.
        L: Box half-length.
        E: Energy.
        time: Simulation time.
        dealias: Whether the quadratic term is dealiased.
    """

    values: NDArray[np.float64]
    L: float
    E: float = 0.0
    time: float = 0.0
    dealias: bool = True

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DomainError(f"values must be a square 2D array, got shape {values.shape}")
        if np.iscomplexobj(values):
            raise DomainError("values must be real")
        spectral.check_grid(values.shape[0], self.L)
        if not np.all(np.isfinite(values)):
            raise DomainError("values must be finite")
        if not math.isfinite(self.E):
            raise DomainError("E must be finite")
        self.values = values.astype(float, copy=False)

    @classmethod
    def from_function(
        cls,
        f: Callable[[NDArray, NDArray], NDArray],
        N: int,
        L: float,
        E: float = 0.0,
        time: float = 0.0,
        dealias: bool = True,
    ) -> "FieldState":
        """Sample ``f(x, y)`` on the grid."""
        spectral.check_grid(N, L)
        X, Y = spectral.meshgrid(N, L)
        return cls(np.asarray(f(X, Y), dtype=float), L, E, time, dealias)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    def mass(self) -> float:
        return spectral.integral(self.values, self.L)

    def l2(self) -> float:
        return spectral.l2_norm(self.values, self.L)


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping parameters.

    Attributes:
        dt: Step size.
        scheme: Integration scheme.
        dealias_rule: Treatment of the quadratic term.
        cfl_safety: Fraction of the phase-rotation bound allowed per step.
        nonlinear: Whether the quadratic term is included.
    """

    dt: float
    scheme: Scheme = Scheme.IF_RK4
    dealias_rule: DealiasRule = DealiasRule.TWO_THIRDS
    cfl_safety: float = 0.5
    nonlinear: bool = True

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise DomainError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "dealias_rule", DealiasRule(self.dealias_rule))


def dt_max(N: int, L: float, E: float, cfl_safety: float = 0.5) -> float:
    """Largest step ``2 pi cfl_safety / max |w|`` over the grid."""
    k1, k2 = spectral.wavenumbers(N, L)
    peak = float(np.max(np.abs(linear_symbol_on_grid(k1, k2, E))))
    return math.inf if peak == 0 else 2.0 * math.pi * cfl_safety / peak


def check_config(state: FieldState, config: StepperConfig) -> None:
    """Raise ``DomainError`` when ``config.dt`` exceeds the step bound for ``state``."""
    limit = dt_max(state.N, state.L, state.E, config.cfl_safety)
    if config.dt > limit * (1.0 + 1e-12):
        raise DomainError(f"dt={config.dt:g} exceeds the step bound {limit:g}")


@dataclass(frozen=True)
class Observation:
    """Diagnostics of one accepted step."""

    time: float
    mass: float
    l2: float
    linf: float
    hs_proxy: float


Observer = Callable[[Observation], None]


class Propagator:
    """Precomputed operators for one grid, energy, step size and scheme."""

    def __init__(self, N: int, L: float, E: float, dt: float, config: StepperConfig, dealias: bool) -> None:
        self.N, self.L, self.E, self.dt = N, L, E, dt
        self.config = config
        self.k1, self.k2 = spectral.wavenumbers(N, L)
        self.linear = spectral.linear_operator(self.k1, self.k2, E)
        use_mask = dealias and config.dealias_rule is DealiasRule.TWO_THIRDS
        self.mask = spectral.dealias_mask(N) if use_mask else None
        self.full = np.exp(self.linear * dt)
        self.half = np.exp(self.linear * dt / 2.0)
        if config.scheme is Scheme.ETDRK4:
            self._init_etdrk4()

    def _init_etdrk4(self) -> None:
        """Contour-integral ETDRK4 coefficients, row block by row block."""
        dt = self.dt
        circle = CONTOUR_RADIUS * np.exp(2j * np.pi * (np.arange(1, CONTOUR_POINTS + 1) - 0.5) / CONTOUR_POINTS)
        shape = self.linear.shape
        self.zeta = np.empty(shape, complex)
        self.alpha = np.empty(shape, complex)
        self.beta = np.empty(shape, complex)
        self.gamma = np.empty(shape, complex)
        for start in range(0, shape[0], 64):
            rows = slice(start, start + 64)
            z = dt * self.linear[rows, :, None] + circle
            ez = np.exp(z)
            self.zeta[rows] = dt * ((np.exp(z / 2.0) - 1.0) / z).mean(axis=-1)
            self.alpha[rows] = dt * ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z**3).mean(axis=-1)
            self.beta[rows] = dt * ((2.0 + z + ez * (z - 2.0)) / z**3).mean(axis=-1)
            self.gamma[rows] = dt * ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z**3).mean(axis=-1)

    def nonlinear(self, v_hat: NDArray) -> NDArray:
        """Transform of ``2 div(v (Re W, Im W))``."""
        if not self.config.nonlinear:
            return np.zeros_like(v_hat)
        v = spectral.inverse_real(v_hat)
        W = spectral.companion_field(v_hat, self.k1, self.k2)
        out = 2j * (
            self.k1 * spectral.forward(v * W.real) + self.k2 * spectral.forward(v * W.imag)
        )
        if self.mask is not None:
            out = out * self.mask
        return out

    def rhs(self, v_hat: NDArray) -> NDArray:
        return self.linear * v_hat + self.nonlinear(v_hat)

    def step(self, v_hat: NDArray) -> NDArray:
        dt = self.dt
        N = self.nonlinear
        if self.config.scheme is Scheme.ETDRK4:
            n1 = N(v_hat)
            s1 = self.half * v_hat + self.zeta * n1
            n2 = N(s1)
            s2 = self.half * v_hat + self.zeta * n2
            n3 = N(s2)
            s3 = self.half * s1 + self.zeta * (2.0 * n3 - n1)
            n4 = N(s3)
            return self.full * v_hat + self.alpha * n1 + 2.0 * self.beta * (n2 + n3) + self.gamma * n4
        k1 = N(v_hat)
        k2 = N(self.half * (v_hat + 0.5 * dt * k1))
        k3 = N(self.half * v_hat + 0.5 * dt * k2)
        k4 = N(self.full * v_hat + dt * self.half * k3)
        return self.full * v_hat + dt / 6.0 * (self.full * k1 + 2.0 * self.half * (k2 + k3) + k4)


def rhs(state: FieldState, nonlinear: bool = True) -> NDArray[np.float64]:
    """Time derivative of ``state`` in physical space."""
    config = StepperConfig(dt=1.0, nonlinear=nonlinear)
    prop = Propagator(state.N, state.L, state.E, 1.0, config, state.dealias)
    return spectral.inverse_real(prop.rhs(spectral.forward(state.values)))


def observe(state: FieldState) -> Observation:
    """Diagnostics of ``state``."""
    k1, k2 = spectral.wavenumbers(state.N, state.L)
    v_hat = spectral.forward(state.values)
    return Observation(
        time=state.time,
        mass=state.mass(),
        l2=state.l2(),
        linf=float(np.max(np.abs(state.values))),
        hs_proxy=spectral.hs_proxy(v_hat, k1, k2, state.L),
    )


def _l2_of(v_hat: NDArray, L: float) -> float:
    return spectral.l2_norm(spectral.inverse_real(v_hat), L)


def _advance(prop: Propagator, v_hat: NDArray, substeps: int) -> NDArray:
    for _ in range(substeps):
        v_hat = prop.step(v_hat)
    return v_hat


class _Stepper:
    """Steps with growth monitoring and one dt-halving retry."""

    def __init__(self, state: FieldState, config: StepperConfig, dt: float) -> None:
        self.state = state
        self.config = config
        self.prop = Propagator(state.N, state.L, state.E, dt, config, state.dealias)
        self._half: Propagator | None = None

    def _half_prop(self) -> Propagator:
        if self._half is None:
            s = self.state
            self._half = Propagator(s.N, s.L, s.E, self.prop.dt / 2.0, self.config, s.dealias)
        return self._half

    def advance(self, v_hat: NDArray, time: float) -> NDArray:
        before = _l2_of(v_hat, self.state.L)
        trial = self.prop.step(v_hat)
        after = _l2_of(trial, self.state.L)
        if math.isfinite(after) and after <= GROWTH_LIMIT * max(before, 1e-300):
            return trial
        logger.warning("L2 growth x%.3g at t=%.6g; retrying with dt/2", after / max(before, 1e-300), time)
        retry = _advance(self._half_prop(), v_hat, 2)
        after = _l2_of(retry, self.state.L)
        growth = after / max(before, 1e-300)
        if not math.isfinite(after):
            raise InstabilityDetectedError(time, math.inf, blowup_suspected=False)
        if growth > GROWTH_LIMIT:
            raise InstabilityDetectedError(time, growth, blowup_suspected=True)
        return retry


def step(state: FieldState, config: StepperConfig) -> FieldState:
    """Advance ``state`` by one step of ``config.dt``.

    Raises:
        DomainError: If ``config.dt`` violates the step bound.
        InstabilityDetectedError: If the L2 norm grows more than tenfold even at ``dt/2``.
    """
    check_config(state, config)
    stepper = _Stepper(state, config, config.dt)
    v_hat = stepper.advance(spectral.forward(state.values), state.time)
    return replace(state, values=spectral.inverse_real(v_hat), time=state.time + config.dt)


@dataclass
class Trajectory:
    """Result of :func:`evolve`."""

    final: FieldState
    observations: list[Observation] = field(default_factory=list)
    steps: int = 0


def evolve(
    state: FieldState,
    config: StepperConfig,
    t_final: float,
    observers: Sequence[Observer] = (),
    snapshot: Callable[[FieldState], None] | None = None,
    snapshot_every: int = 0,
) -> Trajectory:
    """Integrate from ``state.time`` to ``t_final``.

    The step is shrunk uniformly so the last step lands on ``t_final``.
    Observers are called synchronously after every accepted step; ``snapshot``
    receives the state every ``snapshot_every`` steps and at the end.

    Raises:
        DomainError: If ``t_final`` precedes ``state.time`` or ``config.dt`` violates the step bound.
        InstabilityDetectedError: Propagated from a rejected step.
    """
    check_config(state, config)
    span = t_final - state.time
    if span < 0:
        raise DomainError(f"t_final={t_final} precedes the state time {state.time}")
    steps = math.ceil(span / config.dt - 1e-9) if span > 0 else 0
    trajectory = Trajectory(final=state)
    if steps == 0:
        return trajectory
    dt = span / steps
    stepper = _Stepper(state, config, dt)
    v_hat = spectral.forward(state.values)
    current = state
    for n in range(1, steps + 1):
        v_hat = stepper.advance(v_hat, current.time)
        time = state.time + n * dt
        current = replace(state, values=spectral.inverse_real(v_hat), time=time)
        if observers:
            obs = observe(current)
            trajectory.observations.append(obs)
            for observer in observers:
                observer(obs)
        if snapshot is not None and snapshot_every > 0 and (n % snapshot_every == 0 or n == steps):
            snapshot(current)
    logger.debug("evolved %d steps of %.3g to t=%.6g", steps, dt, t_final)
    trajectory.final = current
    trajectory.steps = steps
    return trajectory


def scaling_symmetry_check(
    v0: FieldState, lam: float, t: float, config: StepperConfig
) -> float:
    """Compare the evolution of ``v0`` with that of ``lam^2 v0(lam x)``.

    The rescaled data live on the box ``L/lam`` with energy ``lam^2 E`` and are
    evolved to ``t``; the original is evolved to ``lam^3 t`` with step
    ``lam^3 dt``. Returns the relative L2 distance between ``lam^2 v(lam^3 t)``
    and the rescaled run, sample by sample.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise DomainError(f"lam must be positive, got {lam}")
    scaled0 = FieldState(lam * lam * v0.values, v0.L / lam, lam * lam * v0.E, 0.0, v0.dealias)
    original = evolve(replace(v0, time=0.0), replace(config, dt=config.dt * lam**3), lam**3 * t).final
    scaled = evolve(scaled0, config, t).final
    reference = lam * lam * original.values
    return float(np.linalg.norm(scaled.values - reference) / np.linalg.norm(reference))


def lifespan_survey(
    v0: FieldState, energies: Sequence[float], config: StepperConfig, t_max: float
) -> list[tuple[float, float]]:
    """Time to instability for ``v0`` at each energy (``t_max`` when none occurs).

    The step is capped by the step bound of each energy.
    """
    results = []
    for E in energies:
        state = replace(v0, E=float(E), time=0.0)
        dt = min(config.dt, dt_max(state.N, state.L, state.E, config.cfl_safety))
        try:
            evolve(state, replace(config, dt=dt), t_max, observers=[_track_time])
            lifespan = t_max
        except InstabilityDetectedError as exc:
            lifespan = exc.time
        logger.info("lifespan at E=%g: %.6g", E, lifespan)
        results.append((float(E), lifespan))
    lifespans = [life for _, life in results]
    if any(b < a for a, b in zip(lifespans, lifespans[1:])):
        logger.warning("lifespans are not monotone in E: %s", lifespans)
    return results


def _track_time(observation: Observation) -> None:
    logger.debug("t=%.6g l2=%.6g", observation.time, observation.l2)
