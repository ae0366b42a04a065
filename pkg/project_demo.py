#!/usr/bin/env python3
"""
Walk through the nvlab experiments on small, fast settings.

Each section prints a few numbers that can be compared with the closed forms:
- the stationary lump stays put under the solver
- the critical points of the phase cluster near the degeneracy curve
- the cubic-quartic family blows up at (1 - 27 c^4/256)/(24 c)
- the Gould-Hopper solutions carry mass -8 n pi
"""

import math
import os
import sys

# Add the src directory to the path so we can import nvlab
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

import nvlab
from nvlab.integrals import IntegralSpec, RegionKind, evaluate
from nvlab.solutions import Q1ab, Q2c, Qn0, blowup_scan, mass
from nvlab.solver import dt_max


def demonstrate_solver():
    """Evolve the lump for a few steps and report the drift."""
    print("Solver:")
    lump = Q1ab()
    state = nvlab.FieldState.from_function(lambda x, y: lump.evaluate(0.0, x, y)[0], N=128, L=20.0)
    config = nvlab.StepperConfig(dt=dt_max(128, 20.0, 0.0))
    trajectory = nvlab.evolve(state, config, t_final=10 * config.dt)
    drift = math.sqrt(float(((trajectory.final.values - state.values) ** 2).sum())) * state.dx
    print(f"  steps={trajectory.steps} mass={trajectory.final.mass():.6f} drift={drift:.3e}")


def demonstrate_stationary_points():
    """Classify the critical points for a few parameters."""
    print("\nStationary points:")
    for u in (18.0 + 0j, 6.0 + 0j, 40.0 + 5.0j):
        sps = nvlab.stationary_set(u)
        print(f"  u={u}: case={sps.case_tag.value} omega1={sps.omega1:.4f} omega2={sps.omega2:.4f}")


def demonstrate_integrals():
    """Evaluate the oscillatory integral outside the ball."""
    print("\nOscillatory integrals:")
    for t in (10.0, 100.0):
        value = evaluate(IntegralSpec(alpha=0.25, t=t, u=18.0, region=RegionKind.OUTSIDE))
        print(f"  t={t:g}: |I|={abs(value.value):.4e} err={value.apost_err:.1e}")


def demonstrate_solutions():
    """Blow-up time and masses of the explicit families."""
    print("\nExplicit solutions:")
    result = blowup_scan(Q2c(1.0))
    print(f"  Q2c(1): crossing={result.crossing:.8f} expected={(1 - 27 / 256) / 24:.8f}")
    for n in (1, 2):
        print(f"  Qn0({n}): mass/pi={mass(Qn0(n)) / math.pi:.4f} expected={-8 * n}")


if __name__ == "__main__":
    print(f"nvlab {nvlab.__version__}")
    print("=" * 50)

    demonstrate_solver()
    demonstrate_stationary_points()
    demonstrate_integrals()
    demonstrate_solutions()

    print("\nKey commands:")
    print("- uv run pytest tests/          # Run test suite")
    print("- uv run pytest -m 'not slow'   # Skip the long checks")
    print("- uv run mkdocs serve           # Serve docs locally")
    print("- uv run nvlab --help           # Command-line interface")
