"""Grid engine: 1-D/2-D parameter sweeps of the radiance witness pipeline.

A sweep is described by a :class:`SweepSpec`: one or two axes over the
sweepable parameters {phi_z, eta, g, gamma, delta_a, delta_c}, a fixed
two-atom parameter template, and tolerances. Every grid point runs the full
witness pipeline; failed points degrade to rows carrying an error token
instead of aborting the sweep. Output is a deterministic CSV: identical
specs produce byte-identical files regardless of worker count.

Config files are flat ``key = value`` text with ``#`` comments. Axes use
``axis1 = phi_z, 0, 6.2832, 61, linear``; the remaining keys mirror the
fixed parameters (g, gamma, eta, phi_z, delta_a, delta_c) and the sweep
settings (outputs, rel_tol, class_band). Fixed parameters omitted from the
file default to g = 1, gamma = 1, eta = 0.1, zero detuning, phi_z = 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .model import SystemParams
from .steady import (
    CutoffExhaustedError,
    NonUniqueSteadyStateError,
    SingularSystemError,
    SteadyStateResult,
    converge_cutoff,
)
from .witness import (
    DEFAULT_CLASS_BAND,
    RadiancePoint,
    ReferenceDarkError,
    radiance_witness,
)

__all__ = [
    "Axis",
    "SweepSpec",
    "SweepRow",
    "ConfigError",
    "run_sweep",
    "figure_preset",
    "emit_csv",
    "parse_config",
    "CSV_HEADER",
]

AXIS_NAMES = ("phi_z", "eta", "g", "gamma", "delta_a", "delta_c")
OUTPUT_NAMES = ("R", "n1", "n2", "regime", "g2", "quantumness", "semiclassical_intensity")
CSV_HEADER = (
    "phi_z,eta,g,gamma,delta_a,delta_c,cutoff,n1,n2,R,regime,"
    "g2,quantumness,semiclassical_intensity,residual"
)

_ERROR_TOKENS = {
    CutoffExhaustedError: "error:cutoff-exhausted",
    SingularSystemError: "error:singular-system",
    NonUniqueSteadyStateError: "error:non-unique-steady-state",
    ReferenceDarkError: "error:reference-dark",
}


class ConfigError(Exception):
    """Invalid sweep configuration; ``violations`` lists every problem."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Axis:
    """One sweep axis: parameter name, range, point count and scale."""

    name: str
    lo: float
    hi: float
    count: int
    scale: str = "linear"

    def validate(self, label: str) -> list[str]:
        problems = []
        if self.name not in AXIS_NAMES:
            problems.append(
                f"{label}: unknown parameter {self.name!r}; choose from {AXIS_NAMES}"
            )
        if self.count < 2:
            problems.append(f"{label}: count must be >= 2, got {self.count}")
        if not self.lo < self.hi:
            problems.append(f"{label}: need min < max, got {self.lo} >= {self.hi}")
        if self.scale not in ("linear", "log"):
            problems.append(f"{label}: scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            problems.append(f"{label}: log scale requires min > 0, got {self.lo}")
        return problems

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of a sweep over the witness pipeline."""

    axis1: Axis
    axis2: Axis | None
    fixed: SystemParams
    outputs: tuple[str, ...] = ("R",)
    rel_tol: float = 1e-6
    class_band: float = DEFAULT_CLASS_BAND


@dataclass(frozen=True)
class SweepRow:
    """One grid point: parameter values plus observables or an error token.

    ``regime`` holds the lowercase class token, or ``error:<kind>`` when the
    point failed; numeric fields are None in that case.
    """

    phi_z: float
    eta: float
    g: float
    gamma: float
    delta_a: float
    delta_c: float
    cutoff: int | None
    n1: float | None
    n2: float | None
    R: float | None
    regime: str
    g2: float | None
    quantumness: float | None
    semiclassical_intensity: float | None
    residual: float | None


def validate_spec(spec: SweepSpec) -> list[str]:
    problems = spec.axis1.validate("axis1")
    if spec.axis2 is not None:
        problems += spec.axis2.validate("axis2")
        if spec.axis2.name == spec.axis1.name:
            problems.append(f"axis2: duplicates axis1 parameter {spec.axis1.name!r}")
    if spec.fixed.n_atoms != 2:
        problems.append("fixed: the witness pipeline requires n_atoms = 2")
    if spec.rel_tol <= 0:
        problems.append(f"rel_tol must be > 0, got {spec.rel_tol}")
    if spec.class_band <= 0:
        problems.append(f"class_band must be > 0, got {spec.class_band}")
    for name in spec.outputs:
        if name not in OUTPUT_NAMES:
            problems.append(f"outputs: unknown observable {name!r}; choose from {OUTPUT_NAMES}")
    return problems


@lru_cache(maxsize=None)
def _cached_reference(
    g: float, gamma: float, eta: float, delta_a: float, delta_c: float,
    kappa: float, rel_tol: float,
) -> SteadyStateResult:
    params = SystemParams(
        g=g, gamma=gamma, eta=eta, delta_c=delta_c, delta_a=delta_a,
        phi_z=0.0, n_atoms=1, kappa=kappa,
    )
    return converge_cutoff(params, rel_tol)


def _reference_for(params: SystemParams, rel_tol: float, use_cache: bool):
    # The single-atom reference does not depend on phi_z, so it is keyed on
    # the remaining physical parameters only.
    key = (params.g, params.gamma, params.eta, params.delta_a, params.delta_c,
           params.kappa, rel_tol)
    if use_cache:
        return _cached_reference(*key)
    return _cached_reference.__wrapped__(*key)


def _row_from_point(pt: RadiancePoint) -> SweepRow:
    p = pt.params
    sc = None if pt.semiclassical_amp is None else abs(pt.semiclassical_amp) ** 2
    return SweepRow(
        phi_z=p.phi_z, eta=p.eta, g=p.g, gamma=p.gamma,
        delta_a=p.delta_a, delta_c=p.delta_c,
        cutoff=pt.cutoff_used, n1=pt.n1, n2=pt.n2, R=pt.R,
        regime=pt.regime.token, g2=pt.g2, quantumness=pt.quantumness,
        semiclassical_intensity=sc,
        residual=max(pt.residual, pt.residual_ref),
    )


def _error_row(params: SystemParams, exc: Exception) -> SweepRow:
    token = "error:solver-failure"
    for cls, tok in _ERROR_TOKENS.items():
        if isinstance(exc, cls):
            token = tok
            break
    return SweepRow(
        phi_z=params.phi_z, eta=params.eta, g=params.g, gamma=params.gamma,
        delta_a=params.delta_a, delta_c=params.delta_c,
        cutoff=None, n1=None, n2=None, R=None, regime=token,
        g2=None, quantumness=None, semiclassical_intensity=None, residual=None,
    )


def _point_task(task) -> SweepRow:
    params, rel_tol, class_band, use_cache = task
    try:
        ref = _reference_for(params, rel_tol, use_cache)
        pt = radiance_witness(params, rel_tol, class_band=class_band, reference=ref)
        return _row_from_point(pt)
    except tuple(_ERROR_TOKENS) as exc:
        return _error_row(params, exc)


def grid_points(spec: SweepSpec) -> list[SystemParams]:
    """Parameter sets in row-major axis order (axis1 outer, axis2 inner)."""
    points = []
    for v1 in spec.axis1.values():
        fixed1 = replace(spec.fixed, **{spec.axis1.name: float(v1)})
        if spec.axis2 is None:
            points.append(fixed1)
        else:
            for v2 in spec.axis2.values():
                points.append(replace(fixed1, **{spec.axis2.name: float(v2)}))
    return points


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    *,
    use_reference_cache: bool = True,
) -> list[SweepRow]:
    """Evaluate the witness pipeline at every grid point of the sweep spec.

    Rows come back complete and in row-major axis order. Failed points carry
    an error token in the ``regime`` field rather than aborting the sweep.
    Results are independent of ``workers``.
    """
    problems = validate_spec(spec)
    if problems:
        raise ConfigError(problems)
    tasks = [
        (p, spec.rel_tol, spec.class_band, use_reference_cache)
        for p in grid_points(spec)
    ]
    if workers <= 1:
        return [_point_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_point_task, tasks, chunksize=chunk))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.phi_z, r.eta, r.g, r.gamma, r.delta_a, r.delta_c, r.cutoff,
            r.n1, r.n2, r.R, r.regime, r.g2, r.quantumness,
            r.semiclassical_intensity, r.residual,
        )))
    return "\n".join(lines) + "\n"


def emit_csv(rows, destination) -> None:
    """Write rows as CSV; byte-identical across runs for identical inputs.

    ``destination`` is a path or a text file object. Numbers carry 12
    significant digits; absent observables are empty fields.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to emit")
    text = rows_to_csv(rows)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, newline="")


_PHI_FULL = Axis("phi_z", 0.0, 2.0 * math.pi * 60.0 / 61.0, 61, "linear")
_ETA_LIN = Axis("eta", 0.01, 3.0, 60, "linear")
_ETA_LOG = Axis("eta", 0.01, 3.0, 41, "log")
_G_LOG = Axis("g", 0.1, 10.0, 41, "log")
_G_THREE = Axis("g", 0.1, 10.0, 3, "log")


def _fig2(g: float, detuning: float) -> SweepSpec:
    return SweepSpec(
        axis1=_PHI_FULL,
        axis2=_ETA_LIN,
        fixed=SystemParams(g=g, gamma=1.0, eta=0.5, delta_c=detuning, delta_a=detuning),
        outputs=("R",),
        rel_tol=1e-4,
    )


_PRESETS = {
    # (phi_z, eta) regime maps at gamma = kappa for good/bad/intermediate
    # cavities and for two detuned variants.
    "fig2a": lambda: _fig2(10.0, 0.0),
    "fig2b": lambda: _fig2(0.1, 0.0),
    "fig2c": lambda: _fig2(1.0, 0.0),
    "fig2d": lambda: _fig2(10.0, 1.0),
    "fig2e": lambda: _fig2(10.0, 10.0),
    # phi_z profiles at eta = 0.5 for three cavity qualities.
    "fig3": lambda: SweepSpec(
        axis1=_G_THREE,
        axis2=_PHI_FULL,
        fixed=SystemParams(g=10.0, gamma=1.0, eta=0.5),
        outputs=("R",),
        rel_tol=1e-6,
    ),
    # (eta, g) maps for in-phase and out-of-phase atoms.
    "fig4a": lambda: SweepSpec(
        axis1=_ETA_LOG,
        axis2=_G_LOG,
        fixed=SystemParams(g=10.0, gamma=1.0, eta=0.5, phi_z=0.0),
        outputs=("R",),
        rel_tol=1e-4,
    ),
    "fig4b": lambda: SweepSpec(
        axis1=_ETA_LOG,
        axis2=_G_LOG,
        fixed=SystemParams(g=10.0, gamma=1.0, eta=0.5, phi_z=math.pi),
        outputs=("R",),
        rel_tol=1e-4,
    ),
    # classical-vs-quantum intensity ratio along phi_z at weak drive.
    "fig5": lambda: SweepSpec(
        axis1=_PHI_FULL,
        axis2=None,
        fixed=SystemParams(g=10.0, gamma=1.0, eta=0.1),
        outputs=("quantumness",),
        rel_tol=1e-6,
    ),
}


def figure_preset(name: str) -> SweepSpec:
    """Fully populated SweepSpec for one of the built-in figure grids."""
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; known presets: {', '.join(sorted(_PRESETS))}"
        ) from None


_FIXED_KEYS = ("g", "gamma", "eta", "phi_z", "delta_a", "delta_c")
_DEFAULT_FIXED = dict(g=1.0, gamma=1.0, eta=0.1, phi_z=0.0, delta_a=0.0, delta_c=0.0)


def _parse_axis(text: str, label: str, problems: list[str]) -> Axis | None:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        problems.append(
            f"{label}: expected 'name, min, max, count, scale', got {text!r}"
        )
        return None
    name, lo_s, hi_s, count_s, scale = parts
    try:
        lo, hi = float(lo_s), float(hi_s)
        count = int(count_s)
    except ValueError:
        problems.append(f"{label}: non-numeric range or count in {text!r}")
        return None
    return Axis(name, lo, hi, count, scale)


def parse_config(source) -> SweepSpec:
    """Parse the flat key=value config format into a validated SweepSpec.

    Raises :class:`ConfigError` listing every violation at once.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()

    problems: list[str] = []
    axes: dict[str, Axis | None] = {"axis1": None, "axis2": None}
    fixed = dict(_DEFAULT_FIXED)
    outputs: tuple[str, ...] = ("R",)
    settings = {"rel_tol": 1e-6, "class_band": DEFAULT_CLASS_BAND}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key in axes:
            axes[key] = _parse_axis(value, key, problems)
        elif key in _FIXED_KEYS:
            try:
                fixed[key] = float(value)
            except ValueError:
                problems.append(f"line {lineno}: {key} must be a number, got {value!r}")
        elif key == "outputs":
            outputs = tuple(s.strip() for s in value.split(",") if s.strip())
        elif key in settings:
            try:
                settings[key] = float(value)
            except ValueError:
                problems.append(f"line {lineno}: {key} must be a number, got {value!r}")
        else:
            problems.append(f"line {lineno}: unknown key {key!r}")

    if axes["axis1"] is None and not any(p.startswith("axis1") for p in problems):
        problems.append("axis1 is required")

    template = None
    try:
        template = SystemParams(n_atoms=2, **fixed)
    except ValueError as exc:
        problems.append(str(exc))

    if template is not None and axes["axis1"] is not None:
        spec = SweepSpec(
            axis1=axes["axis1"],
            axis2=axes["axis2"],
            fixed=template,
            outputs=outputs,
            rel_tol=settings["rel_tol"],
            class_band=settings["class_band"],
        )
        problems += validate_spec(spec)
        if not problems:
            return spec
    else:
        # the sweep spec cannot be assembled; still surface every checkable issue
        if axes["axis2"] is not None:
            problems += axes["axis2"].validate("axis2")
        if settings["rel_tol"] <= 0:
            problems.append(f"rel_tol must be > 0, got {settings['rel_tol']:g}")
        if settings["class_band"] <= 0:
            problems.append(f"class_band must be > 0, got {settings['class_band']:g}")
        for name in outputs:
            if name not in OUTPUT_NAMES:
                problems.append(
                    f"outputs: unknown observable {name!r}; choose from {OUTPUT_NAMES}"
                )
    raise ConfigError(problems)
