"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 convergence failure (point
mode only), 4 output I/O error.
"""

from __future__ import annotations

import sys
from dataclasses import replace

import click

from .model import SystemParams
from .steady import SolverError
from .sweep import (
    ConfigError,
    _fmt,
    _point_task,
    emit_csv,
    figure_preset,
    parse_config,
    run_sweep,
)
from .witness import ReferenceDarkError

_ROW_FIELDS = (
    "phi_z", "eta", "g", "gamma", "delta_a", "delta_c", "cutoff",
    "n1", "n2", "R", "regime", "g2", "quantumness",
    "semiclassical_intensity", "residual",
)


@click.group()
def main():
    """Steady-state radiance maps for two driven atoms in a lossy cavity."""


@main.command()
@click.option("--g", type=float, required=True, help="Atom-cavity coupling (units of kappa).")
@click.option("--gamma", type=float, required=True, help="Spontaneous emission rate.")
@click.option("--eta", type=float, required=True, help="Coherent pump rate.")
@click.option("--phi-z", type=float, required=True, help="Interatomic phase in radians.")
@click.option("--delta-a", type=float, default=0.0, help="Atom-laser detuning.")
@click.option("--delta-c", type=float, default=0.0, help="Cavity-laser detuning.")
@click.option("--rel-tol", type=float, default=1e-6, help="Cutoff convergence tolerance.")
@click.option("--class-band", type=float, default=1e-3, help="Half-width of the R=0 and R=1 bands.")
def point(g, gamma, eta, phi_z, delta_a, delta_c, rel_tol, class_band):
    """Evaluate the witness pipeline at a single parameter point."""
    try:
        params = SystemParams(
            g=g, gamma=gamma, eta=eta, phi_z=phi_z,
            delta_a=delta_a, delta_c=delta_c, n_atoms=2,
        )
    except ValueError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    if rel_tol <= 0 or class_band <= 0:
        click.echo("configuration error: rel_tol and class_band must be > 0", err=True)
        sys.exit(2)
    try:
        row = _point_task((params, rel_tol, class_band, False))
    except SolverError as exc:
        click.echo(f"convergence failure: {exc}", err=True)
        sys.exit(3)
    if row.regime.startswith("error:"):
        click.echo(f"convergence failure: {row.regime}", err=True)
        sys.exit(3)
    for name in _ROW_FIELDS:
        click.echo(f"{name}={_fmt(getattr(row, name))}")


def _write_rows(rows, out):
    try:
        if out == "-":
            emit_csv(rows, sys.stdout)
        else:
            emit_csv(rows, out)
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(4)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=False), help="Sweep config file.")
@click.option("--out", default="-", help="Output CSV path (default: stdout).")
@click.option("--workers", type=int, default=1, help="Parallel worker processes.")
@click.option("--g", type=float, default=None, help="Override fixed g.")
@click.option("--gamma", type=float, default=None, help="Override fixed gamma.")
@click.option("--eta", type=float, default=None, help="Override fixed eta.")
@click.option("--phi-z", type=float, default=None, help="Override fixed phi_z.")
@click.option("--delta-a", type=float, default=None, help="Override fixed delta_a.")
@click.option("--delta-c", type=float, default=None, help="Override fixed delta_c.")
@click.option("--rel-tol", type=float, default=None, help="Override rel_tol.")
@click.option("--class-band", type=float, default=None, help="Override class_band.")
def sweep(config_path, out, workers, **overrides):
    """Run the sweep described by a config file; CLI flags override the file."""
    try:
        spec = parse_config(config_path)
    except OSError as exc:
        click.echo(f"configuration error: cannot read config: {exc}", err=True)
        sys.exit(2)
    except ConfigError as exc:
        for violation in exc.violations:
            click.echo(f"configuration error: {violation}", err=True)
        sys.exit(2)
    fixed_overrides = {
        k: v for k, v in overrides.items()
        if v is not None and k in ("g", "gamma", "eta", "phi_z", "delta_a", "delta_c")
    }
    try:
        if fixed_overrides:
            spec = replace(spec, fixed=replace(spec.fixed, **fixed_overrides))
        if overrides.get("rel_tol") is not None:
            spec = replace(spec, rel_tol=overrides["rel_tol"])
        if overrides.get("class_band") is not None:
            spec = replace(spec, class_band=overrides["class_band"])
        rows = run_sweep(spec, workers=workers)
    except (ValueError, ConfigError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    _write_rows(rows, out)


@main.command()
@click.argument("name")
@click.option("--out", default=None, help="Output CSV path (default: <name>.csv).")
@click.option("--workers", type=int, default=1, help="Parallel worker processes.")
def figure(name, out, workers):
    """Run one of the built-in figure presets (fig2a..fig2e, fig3, fig4a, fig4b, fig5)."""
    try:
        spec = figure_preset(name)
    except ValueError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    rows = run_sweep(spec, workers=workers)
    _write_rows(rows, out if out is not None else f"{name}.csv")


if __name__ == "__main__":
    main()
