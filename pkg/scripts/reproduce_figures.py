#!/usr/bin/env python3
"""Regenerate the CSV data behind every built-in figure preset.

Each preset maps a region of the (phi_z, eta, g, detuning) parameter space
with the radiance-witness pipeline and writes one CSV per figure. Plotting
is left to downstream tools; the CSV schema is documented in the README.

Example:
    python scripts/reproduce_figures.py --out-dir results --workers 2
    python scripts/reproduce_figures.py --figures fig3 fig5
"""

import argparse
import sys
import time
from pathlib import Path

from hyperrad.sweep import _PRESETS, emit_csv, figure_preset, run_sweep


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--figures", nargs="+", default=sorted(_PRESETS), metavar="NAME",
        help=f"presets to run (default: all of {', '.join(sorted(_PRESETS))})",
    )
    parser.add_argument("--out-dir", default="results", help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.figures:
        try:
            spec = figure_preset(name)
        except ValueError as exc:
            parser.error(str(exc))
        t0 = time.time()
        rows = run_sweep(spec, workers=args.workers)
        failed = sum(r.regime.startswith("error:") for r in rows)
        target = out_dir / f"{name}.csv"
        emit_csv(rows, target)
        print(
            f"{name}: {len(rows)} rows -> {target} "
            f"({time.time() - t0:.1f}s, {failed} failed points)",
            flush=True,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
