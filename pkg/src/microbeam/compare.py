"""Model/experiment deflection-curve comparison and overlay export.

Curves live on the temperature axis (degC) with midspan deflections in
meters.  The experimental file may carry a drive-current column; it is kept
for labeling but takes no part in any computation.  Model curves are dense
by construction, so deviation against experiment interpolates the model
linearly at each experimental temperature; experimental points outside the
model span are excluded and reported, never extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._ioutil import atomic_write_text, format_float
from .errors import CoverageError, ParseError, ValidationError

MODEL_SOURCES = ("analytic_const", "analytic_tdep", "fem_tdep", "fem_const")
OVERLAY_CSV_HEADER = "series,temperature_c,deflection_m"
EXPERIMENT_CSV_HEADER = "temperature_c,deflection_m"


@dataclass(frozen=True)
class ModelCurve:
    """Ordered (temperature, deflection) samples of one model run.

    ``source`` is the series name; canonical values are listed in
    ``MODEL_SOURCES`` but re-imported overlays may carry free-form names.
    """

    temperatures_c: tuple[float, ...]
    deflections_m: tuple[float, ...]
    source: str

    def __post_init__(self):
        t = tuple(float(x) for x in self.temperatures_c)
        d = tuple(float(x) for x in self.deflections_m)
        if len(t) != len(d):
            raise ValidationError("curve temperature/deflection lengths differ")
        if len(t) < 1:
            raise ValidationError("curve needs at least 1 point")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValidationError(
                f"curve '{self.source}': temperatures must strictly increase"
            )
        object.__setattr__(self, "temperatures_c", t)
        object.__setattr__(self, "deflections_m", d)


@dataclass(frozen=True)
class ExperimentCurve:
    """Ingested experimental points, optionally with a current column."""

    temperatures_c: tuple[float, ...]
    deflections_m: tuple[float, ...]
    currents_a: tuple[float, ...] | None
    label: str

    def __post_init__(self):
        t = tuple(float(x) for x in self.temperatures_c)
        d = tuple(float(x) for x in self.deflections_m)
        if len(t) != len(d):
            raise ValidationError("experiment temperature/deflection lengths differ")
        if len(t) < 2:
            raise ValidationError("experiment needs at least 2 points")
        for row, (a, b) in enumerate(zip(t, t[1:]), start=2):
            if b <= a:
                raise ValidationError(
                    f"experiment row {row}: temperature {b!r} is not strictly "
                    f"greater than row {row - 1} ({a!r})"
                )
        for row, x in enumerate(d, start=1):
            if x < 0.0:
                raise ValidationError(
                    f"experiment row {row}: deflection must be >= 0, got {x!r}"
                )
        if self.currents_a is not None and len(self.currents_a) != len(t):
            raise ValidationError("experiment current column length differs")
        object.__setattr__(self, "temperatures_c", t)
        object.__setattr__(self, "deflections_m", d)


@dataclass(frozen=True)
class RmsResult:
    """Deviation of a model curve from an experiment.

    ``residuals_m`` holds model-minus-experiment per experimental point
    (NaN where the point lies outside the model span); ``included`` is the
    matching inclusion mask.
    """

    rms_m: float
    residuals_m: np.ndarray
    included: np.ndarray

    @property
    def excluded_count(self) -> int:
        return int((~self.included).sum())


def load_experiment(path) -> ExperimentCurve:
    """Read an experimental CSV: ``temperature_c,deflection_m[,current_a]``.

    Raises :class:`ParseError` for structural problems and
    :class:`ValidationError` for rule violations, both with row numbers.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"experiment file {path} does not exist")
    lines = [
        ln.strip()
        for ln in path.read_text(encoding="utf-8").splitlines()
        if ln.strip()
    ]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].replace(" ", "")
    if header == EXPERIMENT_CSV_HEADER:
        has_current = False
    elif header == EXPERIMENT_CSV_HEADER + ",current_a":
        has_current = True
    else:
        raise ParseError(
            f"{path}: header must be '{EXPERIMENT_CSV_HEADER}' with optional "
            f"',current_a', got {lines[0]!r}"
        )
    temps, defls, currents = [], [], []
    want = 3 if has_current else 2
    for row, line in enumerate(lines[1:], start=1):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != want:
            raise ParseError(f"{path} row {row}: expected {want} columns, got {line!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"{path} row {row}: bad number in {line!r}") from exc
        temps.append(values[0])
        defls.append(values[1])
        if has_current:
            currents.append(values[2])
    return ExperimentCurve(
        temperatures_c=tuple(temps),
        deflections_m=tuple(defls),
        currents_a=tuple(currents) if has_current else None,
        label=path.stem,
    )


def rms_deviation(model: ModelCurve, exp: ExperimentCurve) -> RmsResult:
    """Root-mean-square deviation of ``model`` from ``exp``.

    The model curve is interpolated linearly at each experimental
    temperature; experimental points outside the model span are excluded
    from the mean and flagged in the result.

    Raises:
        CoverageError: if fewer than 2 experimental points fall inside the
            model's temperature span.
    """
    mt = np.asarray(model.temperatures_c)
    md = np.asarray(model.deflections_m)
    et = np.asarray(exp.temperatures_c)
    ed = np.asarray(exp.deflections_m)
    included = (et >= mt[0]) & (et <= mt[-1])
    if included.sum() < 2:
        raise CoverageError(
            f"only {int(included.sum())} experimental point(s) fall inside the "
            f"model span [{float(mt[0])!r}, {float(mt[-1])!r}] degC; need at least 2"
        )
    residuals = np.full(et.shape, math.nan)
    residuals[included] = np.interp(et[included], mt, md) - ed[included]
    rms = float(np.sqrt(np.mean(residuals[included] ** 2)))
    return RmsResult(rms_m=rms, residuals_m=residuals, included=included)


def curve_from_states(states, source: str, converged_only: bool = True) -> ModelCurve:
    """Build a (T, gamma_max) curve from sweep states, sorted by temperature."""
    pts = [
        (s.T_c, s.gamma_max_m)
        for s in states
        if (s.converged or not converged_only) and math.isfinite(s.gamma_max_m)
    ]
    pts.sort()
    return ModelCurve(
        temperatures_c=tuple(t for t, _ in pts),
        deflections_m=tuple(g for _, g in pts),
        source=source,
    )


def curve_from_path(path_result, source: str) -> ModelCurve:
    """Build a (T, midspan deflection) curve from a FEM solution path."""
    return ModelCurve(
        temperatures_c=tuple(s.T_c for s in path_result.steps),
        deflections_m=tuple(s.gamma_mid_m for s in path_result.steps),
        source=source,
    )


def model_curve_from_csv(path, source: str | None = None) -> ModelCurve:
    """Load a model curve from a sweep CSV, a FEM path CSV, or a plain
    ``temperature_c,deflection_m`` file (header is sniffed).

    Non-converged sweep rows are skipped.
    """
    from .elastica import SWEEP_CSV_HEADER
    from .fem import PATH_CSV_HEADER

    path = Path(path)
    if not path.exists():
        raise ParseError(f"model curve file {path} does not exist")
    lines = [
        ln.strip()
        for ln in path.read_text(encoding="utf-8").splitlines()
        if ln.strip()
    ]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].replace(" ", "")
    cols = header.split(",")
    if header == SWEEP_CSV_HEADER:
        t_col, d_col, conv_col = cols.index("T_c"), cols.index("gamma_max_m"), cols.index("converged")
    elif header == PATH_CSV_HEADER:
        t_col, d_col, conv_col = cols.index("T_c"), cols.index("gamma_mid_m"), None
    elif header == EXPERIMENT_CSV_HEADER:
        t_col, d_col, conv_col = 0, 1, None
    else:
        raise ParseError(f"{path}: unrecognized curve header {lines[0]!r}")
    pts = []
    for row, line in enumerate(lines[1:], start=1):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != len(cols):
            raise ParseError(
                f"{path} row {row}: expected {len(cols)} columns, got {line!r}"
            )
        if conv_col is not None and parts[conv_col] == "0":
            continue
        try:
            pts.append((float(parts[t_col]), float(parts[d_col])))
        except ValueError as exc:
            raise ParseError(f"{path} row {row}: bad number in {line!r}") from exc
    pts.sort()
    return ModelCurve(
        temperatures_c=tuple(t for t, _ in pts),
        deflections_m=tuple(d for _, d in pts),
        source=source if source is not None else path.stem,
    )


def export_overlay(
    curves: list[ModelCurve],
    exp: ExperimentCurve | None,
    csv_path,
    plot_path,
) -> None:
    """Write the aligned long-format CSV and the static SVG overlay plot."""
    if not curves:
        raise ValidationError("export_overlay needs at least one curve")
    rows = [OVERLAY_CSV_HEADER]
    for curve in curves:
        for t, d in zip(curve.temperatures_c, curve.deflections_m):
            rows.append(f"{curve.source},{format_float(t)},{format_float(d)}")
    if exp is not None:
        for t, d in zip(exp.temperatures_c, exp.deflections_m):
            rows.append(f"{exp.label},{format_float(t)},{format_float(d)}")
    atomic_write_text(csv_path, "\n".join(rows) + "\n")
    _plot_overlay(curves, exp, plot_path)


def load_overlay(csv_path) -> list[ModelCurve]:
    """Re-import an overlay CSV; returns one curve per series, in file order."""
    path = Path(csv_path)
    if not path.exists():
        raise ParseError(f"overlay file {path} does not exist")
    lines = [
        ln.strip()
        for ln in path.read_text(encoding="utf-8").splitlines()
        if ln.strip()
    ]
    if not lines or lines[0].replace(" ", "") != OVERLAY_CSV_HEADER:
        raise ParseError(f"{path}: expected header '{OVERLAY_CSV_HEADER}'")
    series: dict[str, list[tuple[float, float]]] = {}
    for row, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"{path} row {row}: expected 3 columns, got {line!r}")
        try:
            series.setdefault(parts[0], []).append((float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ParseError(f"{path} row {row}: bad number in {line!r}") from exc
    return [
        ModelCurve(
            temperatures_c=tuple(t for t, _ in pts),
            deflections_m=tuple(d for _, d in pts),
            source=name,
        )
        for name, pts in series.items()
    ]


def _plot_overlay(curves, exp, plot_path) -> None:
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    # fixed hash salt + no date metadata keeps SVG output byte-reproducible
    with plt.rc_context({"svg.hashsalt": "microbeam"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for curve in curves:
            ax.plot(
                curve.temperatures_c,
                np.asarray(curve.deflections_m) * 1e6,
                label=curve.source,
            )
        if exp is not None:
            ax.plot(
                exp.temperatures_c,
                np.asarray(exp.deflections_m) * 1e6,
                "ko",
                markersize=4,
                linestyle="none",
                label=exp.label,
            )
        ax.set_xlabel("temperature [degC]")
        ax.set_ylabel("midspan deflection [um]")
        ax.legend()
        fig.tight_layout()
        try:
            fig.savefig(plot_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
