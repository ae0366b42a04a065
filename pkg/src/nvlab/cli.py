"""Command-line interface for nvlab."""

import json
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from typing_extensions import Annotated

import nvlab
from nvlab import io, solutions, stationary
from nvlab.config import load_config_file, normalize_key
from nvlab.errors import NVLabError
from nvlab.integrals import IntegralSpec, RegionKind
from nvlab.integrals.decay import (
    geometric_t_grid,
    probe_from_rows,
    ring_u_grid,
    scan,
    vertex_u_grid,
    worst_case_u_grid,
)
from nvlab.solver import (
    DealiasRule,
    FieldState,
    Observation,
    Scheme,
    StepperConfig,
    dt_max,
    evolve,
    observe,
)

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="nvlab",
    help="Numerical experiments for the Novikov-Veselov equation at fixed energy.",
    add_completion=False,
)


class Region(str, Enum):
    full = "full"
    inside = "in"
    outside = "out"
    largefreq = "largefreq"


class Action(str, Enum):
    eval = "eval"
    mass = "mass"
    blowup = "blowup"
    l2growth = "l2growth"
    residual = "residual"


class Toggle(str, Enum):
    on = "on"
    off = "off"


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


@app.callback()
def main_callback(
    ctx: typer.Context,
    config: Annotated[
        Optional[Path], typer.Option("--config", help="key=value file with default flag values")
    ] = None,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log debug messages")] = False,
) -> None:
    """Numerical experiments for the Novikov-Veselov equation at fixed energy."""
    _configure_logging(verbose)
    if config is None or ctx.invoked_subcommand is None:
        return
    try:
        values = load_config_file(config)
    except (OSError, ValueError) as e:
        raise typer.BadParameter(str(e), param_hint="--config")
    command = ctx.command.get_command(ctx, ctx.invoked_subcommand)
    known = {param.name for param in command.params}
    unknown = sorted(set(values) - known)
    if unknown:
        raise typer.BadParameter(
            f"unknown key(s) for '{ctx.invoked_subcommand}': {', '.join(unknown)}",
            param_hint="--config",
        )
    ctx.default_map = {ctx.invoked_subcommand: values}


def _record(ctx: typer.Context, output: Optional[Path], seed: int = 0) -> None:
    """Write the manifest beside a file output."""
    if output is None:
        return
    parameters = {}
    for key, value in ctx.params.items():
        if value is None:
            continue
        if isinstance(value, Enum):
            value = value.value
        parameters[normalize_key(key)] = io.format_value(value)
    manifest = io.ExperimentManifest(
        command=ctx.info_name,
        parameters=parameters,
        seed=seed,
        tool_version=nvlab.__version__,
    )
    io.write_manifest(io.manifest_path(output), manifest)


def _fail(error: Exception) -> None:
    typer.echo(f"Error: {error}", err=True)
    raise typer.Exit(1)


def _floats(text: str, name: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise typer.BadParameter(f"expected comma-separated numbers, got '{text}'", param_hint=name)


def parse_u_grid(text: str) -> list[complex]:
    """Parse ``vertices``, ``worst``, ``ring:<radius>:<n>`` or ``single:<re>:<im>``."""
    parts = text.split(":")
    try:
        if parts == ["vertices"]:
            return vertex_u_grid()
        if parts == ["worst"]:
            return worst_case_u_grid()
        if parts[0] == "ring" and len(parts) == 3:
            return ring_u_grid(float(parts[1]), int(parts[2]))
        if parts[0] == "single" and len(parts) == 3:
            return [complex(float(parts[1]), float(parts[2]))]
    except ValueError:
        pass
    raise typer.BadParameter(
        f"expected vertices, worst, ring:<radius>:<n> or single:<re>:<im>, got '{text}'",
        param_hint="--u-grid",
    )


def parse_grid(text: str) -> tuple[float, int]:
    """Parse ``L:N``."""
    try:
        half, points = text.split(":")
        return float(half), int(points)
    except ValueError:
        raise typer.BadParameter(f"expected L:N, got '{text}'", param_hint="--grid")


def parse_initial_condition(text: str, N: int, L: float, E: float, dealias: bool) -> FieldState:
    """Build the initial state from ``q1ab:a:b``, ``q2c:c``, ``qn0:n``, ``gaussian:amp:width`` or ``file:<path>``."""
    kind, _, rest = text.partition(":")
    if kind == "file":
        state = io.read_snapshot(rest, dealias)
        return FieldState(state.values, state.L, E, state.time, dealias)
    args = _floats(rest.replace(":", ","), "--ic")
    if kind == "gaussian":
        if len(args) != 2 or args[1] <= 0:
            raise typer.BadParameter("gaussian needs amp:width with width > 0", param_hint="--ic")
        amp, width = args
        return FieldState.from_function(
            lambda x, y: amp * np.exp(-(x * x + y * y) / (width * width)), N, L, E, 0.0, dealias
        )
    if kind not in solutions.FAMILIES:
        raise typer.BadParameter(f"unknown initial condition '{text}'", param_hint="--ic")
    family = solutions.create_solution(kind, args)
    return FieldState.from_function(lambda x, y: family.evaluate(0.0, x, y)[0], N, L, E, 0.0, dealias)


@app.command()
def simulate(
    ctx: typer.Context,
    energy: Annotated[float, typer.Option("--energy", "-E", help="Energy E")] = 0.0,
    grid: Annotated[int, typer.Option("--grid", help="Points per axis (power of two)")] = 256,
    box: Annotated[float, typer.Option("--box", help="Box half-length L")] = 40.0,
    dt: Annotated[
        Optional[float], typer.Option("--dt", help="Step size (default: the CFL bound)")
    ] = None,
    t_final: Annotated[float, typer.Option("--t-final", help="Final time")] = 0.1,
    ic: Annotated[
        str,
        typer.Option("--ic", help="q1ab:a:b, q2c:c, qn0:n, gaussian:amp:width or file:<path>"),
    ] = "q1ab:0:0",
    dealias: Annotated[Toggle, typer.Option("--dealias", help="Two-thirds dealiasing")] = Toggle.on,
    scheme: Annotated[Scheme, typer.Option("--scheme", help="Time stepper")] = Scheme.IF_RK4,
    cfl_safety: Annotated[float, typer.Option("--cfl-safety", help="CFL safety factor")] = 0.5,
    snapshot_every: Annotated[
        int, typer.Option("--snapshot-every", help="Write a snapshot every n steps (0: never)")
    ] = 0,
    output: Annotated[
        Optional[Path], typer.Option("--output", "-o", help="Observer CSV (stdout if omitted)")
    ] = None,
) -> None:
    """Evolve initial data and write the observer table time,mass,l2,linf."""
    try:
        if snapshot_every > 0 and output is None:
            raise typer.BadParameter("snapshots need --output", param_hint="--snapshot-every")
        state = parse_initial_condition(ic, grid, box, energy, dealias is Toggle.on)
        step = dt if dt is not None else dt_max(state.N, state.L, state.E, cfl_safety)
        config = StepperConfig(
            dt=step,
            scheme=scheme,
            dealias_rule=DealiasRule.TWO_THIRDS if dealias is Toggle.on else DealiasRule.NONE,
            cfl_safety=cfl_safety,
        )
        rows = []

        def record(obs: Observation) -> None:
            rows.append((obs.time, obs.mass, obs.l2, obs.linf))

        record(observe(state))
        counter = iter(range(1, sys.maxsize))

        def save(current: FieldState) -> None:
            io.write_snapshot(io.snapshot_path(output, next(counter)), current)

        try:
            evolve(state, config, t_final, observers=[record], snapshot=save, snapshot_every=snapshot_every)
        finally:
            io.write_csv(output, io.OBSERVER_HEADER, rows)
        _record(ctx, output)
    except (NVLabError, ValueError) as e:
        _fail(e)


@app.command("stationary-points")
def stationary_points(
    ctx: typer.Context,
    u_re: Annotated[float, typer.Option("--u-re", help="Real part of u")] = 0.0,
    u_im: Annotated[float, typer.Option("--u-im", help="Imaginary part of u")] = 0.0,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="JSON output file")] = None,
) -> None:
    """Classify the critical points of the phase for one parameter (JSON)."""
    try:
        sps = stationary.stationary_set(complex(u_re, u_im))
        record = {"u": [u_re, u_im], **sps.to_dict()}
        io.write_text(output, json.dumps(record, indent=2) + "\n")
        _record(ctx, output)
    except (NVLabError, ValueError) as e:
        _fail(e)


@app.command("dispersion-scan")
def dispersion_scan(
    ctx: typer.Context,
    alpha: Annotated[float, typer.Option("--alpha", help="Smoothing exponent in [0, 1)")] = 0.0,
    beta: Annotated[float, typer.Option("--beta", help="Imaginary power exponent")] = 0.0,
    energy: Annotated[float, typer.Option("--energy", "-E", help="Energy E > 0")] = 1.0,
    region: Annotated[Region, typer.Option("--region", help="Integration region")] = Region.full,
    cutoff_r: Annotated[float, typer.Option("--cutoff-R", "--cutoff-r", help="Cutoff radius R > 2")] = 3.0,
    profile: Annotated[str, typer.Option("--profile", help="Cutoff profile: bump or cosine")] = "bump",
    t_min: Annotated[float, typer.Option("--t-min", help="Smallest time")] = 10.0,
    t_max: Annotated[float, typer.Option("--t-max", help="Largest time")] = 1000.0,
    t_points: Annotated[int, typer.Option("--t-points", help="Number of log-spaced times")] = 12,
    u_grid: Annotated[
        str,
        typer.Option("--u-grid", help="vertices, worst, ring:<radius>:<n> or single:<re>:<im>"),
    ] = "vertices",
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="CSV output file")] = None,
) -> None:
    """Evaluate the dispersive integral on a (t, u) grid and fit the decay slope.

    The CSV goes to the output; the summary line slope=<v>,ci=<v> goes to stderr.
    """
    try:
        us = parse_u_grid(u_grid)
        spec = IntegralSpec(
            alpha=alpha,
            beta=beta,
            E=energy,
            region=RegionKind(region.value),
            cutoff_R=cutoff_r,
            profile=profile,
        )
        ts = geometric_t_grid(t_min, t_max, t_points)
        rows = scan(spec, ts, us)
        io.write_csv(
            output,
            io.SCAN_HEADER,
            [
                (
                    r.t,
                    r.u.real,
                    r.u.imag,
                    abs(r.result.value),
                    r.result.value.real,
                    r.result.value.imag,
                    r.result.apost_err,
                )
                for r in rows
            ],
        )
        probe = probe_from_rows(spec, rows)
        typer.echo(f"slope={io.format_value(probe.slope)},ci={io.format_value(probe.slope_ci)}", err=True)
        _record(ctx, output)
    except (NVLabError, ValueError) as e:
        _fail(e)


@app.command("solutions")
def solutions_command(
    ctx: typer.Context,
    family: Annotated[str, typer.Option("--family", help="q1ab, q2c or qn0")] = "q1ab",
    params: Annotated[str, typer.Option("--params", help="Comma-separated parameters")] = "",
    action: Annotated[Action, typer.Option("--action", help="What to compute")] = Action.eval,
    grid: Annotated[
        Optional[str], typer.Option("--grid", help="Sampling box L:N (eval 10:32, residual 60:512)")
    ] = None,
    t: Annotated[str, typer.Option("--t", help="Comma-separated times")] = "0",
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="CSV output file")] = None,
) -> None:
    """Evaluate a closed-form family or one of its invariants."""
    try:
        solution = solutions.create_solution(family, _floats(params, "--params"))
        times = _floats(t, "--t")
        if action is Action.eval:
            half, points = parse_grid(grid or "10:32")
            axis = -half + 2.0 * half * np.arange(points) / points
            X, Y = np.meshgrid(axis, axis, indexing="ij")
            rows = []
            for time in times:
                v, denominator = solutions.eval_solution(solution, time, X, Y)
                rows.extend(zip([time] * X.size, X.ravel(), Y.ravel(), v.ravel(), denominator.ravel()))
            io.write_csv(output, ("t", "x", "y", "v", "denominator"), rows)
        elif action is Action.mass:
            rows = [(time, solutions.mass(solution, time), solution.expected_mass) for time in times]
            io.write_csv(output, ("t", "mass", "expected"), rows)
        elif action is Action.blowup:
            scan_times = times if len(times) > 1 else None
            result = solutions.blowup_scan(solution, scan_times)
            lo, hi = result.bracket if result.bracket else (None, None)
            io.write_csv(
                output,
                ("c", "min_denominator", "x", "y", "crossing", "bracket_lo", "bracket_hi"),
                [(result.c, result.min_denominator, *result.location, result.crossing, lo, hi)],
            )
        elif action is Action.l2growth:
            growth = solutions.l2_growth(solution, times if len(times) > 1 else [1, 2, 4, 8, 16, 32, 64])
            io.write_csv(
                output,
                ("t", "l2_squared", "local_estimate", "root_ratio"),
                [
                    (ts, value, est, ratio)
                    for (ts, value), (_, est), (_, ratio) in zip(
                        growth.samples, growth.local_estimates, growth.root_ratios
                    )
                ],
            )
            typer.echo(
                f"slope={io.format_value(growth.slope)},ci={io.format_value(growth.slope_ci)}", err=True
            )
        else:
            half, points = parse_grid(grid or "60:512")
            rows = [(time, solutions.nv_residual(solution, time, points, half)) for time in times]
            io.write_csv(output, ("t", "residual"), rows)
        _record(ctx, output)
    except (NVLabError, ValueError) as e:
        _fail(e)


@app.command("verify-lemmas")
def verify_lemmas(
    ctx: typer.Context,
    samples: Annotated[int, typer.Option("--samples", help="Random parameters to test")] = 1000,
    seed: Annotated[int, typer.Option("--seed", help="Seed of the sampling stream")] = 0,
    radius: Annotated[float, typer.Option("--radius", help="Radius of the sampling disk")] = 30.0,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="CSV output file")] = None,
) -> None:
    """Check the clustering statements on random parameters and write a per-sample report."""
    try:
        if seed < 0:
            raise typer.BadParameter("seed must be unsigned", param_hint="--seed")
        sweep = stationary.lemma_sweep(samples, seed, radius)
        rows = [
            (
                s.index,
                s.u_tilde.real,
                s.u_tilde.imag,
                s.sps.case_tag.value,
                s.sps.omega1,
                s.sps.omega2,
                s.report.circle_ratio,
                s.report.degenerate_ratio,
                s.report.cluster_ratio,
                s.report.passed,
            )
            for s in sweep.samples
        ]
        io.write_csv(output, io.LEMMA_HEADER, rows)
        typer.echo(
            f"samples={len(rows)},all_passed={io.format_value(sweep.all_passed)},"
            f"max_circle_ratio={io.format_value(sweep.max_circle_ratio)},"
            f"max_degenerate_ratio={io.format_value(sweep.max_degenerate_ratio)}",
            err=True,
        )
        _record(ctx, output, seed)
    except (NVLabError, ValueError) as e:
        _fail(e)


@app.command()
def replay(
    manifest: Annotated[Path, typer.Argument(help="Manifest written beside an output")],
) -> None:
    """Re-run the command recorded in a manifest."""
    try:
        recorded = io.read_manifest(manifest)
    except NVLabError as e:
        _fail(e)
    code = replay_manifest_argv(recorded.to_argv())
    if code:
        raise typer.Exit(code)


def replay_manifest_argv(argv: list[str]) -> int:
    return main(argv)


def replay_manifest(path: Path | str) -> int:
    """Re-run the command recorded at ``path`` and return its exit code."""
    try:
        recorded = io.read_manifest(path)
    except NVLabError as e:
        typer.echo(f"Error: {e}", err=True)
        return 1
    return main(recorded.to_argv())


def main(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and dispatch; return 0 on success, 1 on runtime errors, 2 on usage errors."""
    command = typer.main.get_command(app)
    try:
        command.main(args=argv, prog_name="nvlab", standalone_mode=True)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    return 0


parse_and_dispatch = main


if __name__ == "__main__":
    sys.exit(main())
