"""Temperature-dependent polysilicon constitutive models.

Young's modulus follows a linear degradation law clamped from below,

    E(T) = max(E_s - c_E * (T - T_s), E_min)

and the thermal-expansion coefficient is a piecewise-linear interpolation of
tabulated knots with constant (clamped) extrapolation outside the knot range.
The table stores the *effective secant* CTE referenced to the strain-free
temperature T_0: total thermal strain is evaluated as ``cte(T) * (T - T_0)``
with no integration of an instantaneous coefficient.

The default table shipped by :func:`default_material` is constant below
450 degC and rises linearly above it.  The rise is ILLUSTRATIVE ONLY: its
knot values are placeholders of plausible magnitude, not calibrated data.
Supply a measured table for quantitative work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError

# Room-temperature secant CTE used by the default model, 1/degC.  Widely
# cited bulk polysilicon values are near 2.6e-6; this library ships 21.6e-6
# as its default because that is the value its reference configuration was
# built around.  Override via the material file for bulk-property studies.
DEFAULT_CTE_20C = 21.6e-6
BULK_POLYSILICON_CTE_20C = 2.6e-6

_REQUIRED_KEYS = ("E_s_pa", "T_s_c", "c_E_pa_per_c", "nu", "T_0_c")
_OPTIONAL_KEYS = ("E_min_pa", "cte_file")
_DEFAULT_E_MIN_PA = 1e9
_CTE_HEADER = "temperature_c,cte_per_c"


@dataclass(frozen=True)
class MaterialModel:
    """Immutable temperature-dependent material description.

    Attributes:
        E_s_pa: Young's modulus at the reference temperature T_s, Pa.
        T_s_c: reference temperature of the modulus law, degC.
        c_E_pa_per_c: modulus degradation slope, Pa/degC (positive means
            E decreases as temperature rises).
        E_min_pa: floor applied to E(T), Pa.
        nu: Poisson's ratio (temperature independent).
        alpha_table: ordered ``(temperature_c, cte_per_c)`` knots.
        T_0_c: strain-free reference temperature, degC.
    """

    E_s_pa: float
    T_s_c: float
    c_E_pa_per_c: float
    nu: float
    alpha_table: tuple[tuple[float, float], ...]
    T_0_c: float
    E_min_pa: float = _DEFAULT_E_MIN_PA
    _knot_t: np.ndarray = field(init=False, repr=False, compare=False)
    _knot_a: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.E_s_pa > 0.0):
            raise ValidationError(f"E_s_pa must be > 0, got {self.E_s_pa!r}")
        if not (self.E_min_pa > 0.0):
            raise ValidationError(f"E_min_pa must be > 0, got {self.E_min_pa!r}")
        if self.E_min_pa > self.E_s_pa:
            raise ValidationError(
                f"E_min_pa ({self.E_min_pa!r}) must not exceed E_s_pa "
                f"({self.E_s_pa!r})"
            )
        if not (0.0 < self.nu < 0.5):
            raise ValidationError(f"nu must lie in (0, 0.5), got {self.nu!r}")
        table = tuple((float(t), float(a)) for t, a in self.alpha_table)
        if len(table) < 1:
            raise ValidationError("alpha_table needs at least 1 knot")
        for row, (t, a) in enumerate(table, start=1):
            if not (a > 0.0):
                raise ValidationError(
                    f"alpha_table row {row}: CTE must be > 0, got {a!r}"
                )
            if row > 1 and not (t > table[row - 2][0]):
                raise ValidationError(
                    f"alpha_table row {row}: knot temperature {t!r} is not "
                    f"strictly greater than row {row - 1} ({table[row - 2][0]!r})"
                )
        object.__setattr__(self, "alpha_table", table)
        object.__setattr__(self, "_knot_t", np.array([t for t, _ in table]))
        object.__setattr__(self, "_knot_a", np.array([a for _, a in table]))


def young_modulus(model: MaterialModel, temperature_c: float) -> float:
    """Young's modulus E(T) in Pa: linear law clamped at ``E_min_pa``.

    Total over all finite temperatures.
    """
    e = model.E_s_pa - model.c_E_pa_per_c * (temperature_c - model.T_s_c)
    return max(e, model.E_min_pa)


def cte(model: MaterialModel, temperature_c: float) -> float:
    """Secant thermal-expansion coefficient at ``temperature_c``, 1/degC.

    Piecewise linear between knots, constant beyond the first/last knot.
    A single-knot table behaves as a constant CTE.
    """
    return float(np.interp(temperature_c, model._knot_t, model._knot_a))


def shear_modulus(model: MaterialModel, temperature_c: float) -> float:
    """Isotropic shear modulus G(T) = E(T) / (2 (1 + nu))."""
    return young_modulus(model, temperature_c) / (2.0 * (1.0 + model.nu))


def constant_material(
    E_pa: float,
    cte_per_c: float,
    nu: float = 0.22,
    T_0_c: float = 20.0,
) -> MaterialModel:
    """Convenience constructor for a temperature-independent material."""
    return MaterialModel(
        E_s_pa=E_pa,
        T_s_c=T_0_c,
        c_E_pa_per_c=0.0,
        nu=nu,
        alpha_table=((T_0_c, cte_per_c),),
        T_0_c=T_0_c,
    )


def default_material() -> MaterialModel:
    """Reference polysilicon model: E_s = 150 GPa at 20 degC, nu = 0.22,
    modulus slope 0.04 GPa/degC, secant CTE 21.6e-6 at room temperature.

    The CTE knots above 450 degC are illustrative placeholders (constant
    below 450 degC, rising above); see the module docstring.
    """
    return MaterialModel(
        E_s_pa=150e9,
        T_s_c=20.0,
        c_E_pa_per_c=0.04e9,
        nu=0.22,
        alpha_table=(
            (20.0, DEFAULT_CTE_20C),
            (450.0, DEFAULT_CTE_20C),
            (600.0, 25.0e-6),
            (750.0, 29.5e-6),
            (900.0, 34.5e-6),
        ),
        T_0_c=20.0,
    )


def _parse_float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ParseError(f"{where}: {raw!r} is not a number") from exc


def _parse_cte_rows(lines: list[tuple[int, str]], where: str):
    """Parse ``T,a`` CSV rows (after the header) into a knot list."""
    knots = []
    for row, (lineno, text) in enumerate(lines, start=1):
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ParseError(
                f"{where} line {lineno}: expected 'temperature_c,cte_per_c', "
                f"got {text!r}"
            )
        t = _parse_float(parts[0], f"{where} row {row} temperature_c")
        a = _parse_float(parts[1], f"{where} row {row} cte_per_c")
        knots.append((t, a))
    return knots


def _read_cte_csv(path: Path) -> list[tuple[float, float]]:
    if not path.exists():
        raise ParseError(f"cte_file {path} does not exist")
    lines = [
        (i, ln.strip())
        for i, ln in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines or lines[0][1].replace(" ", "") != _CTE_HEADER:
        raise ParseError(f"{path}: first line must be header '{_CTE_HEADER}'")
    return _parse_cte_rows(lines[1:], str(path))


def load_material(path) -> MaterialModel:
    """Load and validate a material file.

    The format is UTF-8 text with ``key = value`` lines followed by either an
    inline ``[cte_table]`` CSV block or a ``cte_file`` key naming a sibling
    CSV file.  Lines starting with ``#`` are comments.  Raises
    :class:`ParseError` for malformed files and :class:`ValidationError` when
    a value violates a model invariant; both name the offending key or row.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"material file {path} does not exist")
    keys: dict[str, float] = {}
    cte_file: str | None = None
    table_lines: list[tuple[int, str]] = []
    in_table = False
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[cte_table]":
            if in_table:
                raise ParseError(f"{path} line {lineno}: duplicate [cte_table]")
            in_table = True
            continue
        if in_table:
            table_lines.append((lineno, line))
            continue
        if "=" not in line:
            raise ParseError(f"{path} line {lineno}: expected 'key = value'")
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _REQUIRED_KEYS and key not in _OPTIONAL_KEYS:
            raise ParseError(f"{path} line {lineno}: unknown key {key!r}")
        if key in keys or (key == "cte_file" and cte_file is not None):
            raise ParseError(f"{path} line {lineno}: duplicate key {key!r}")
        if key == "cte_file":
            cte_file = value
        else:
            keys[key] = _parse_float(value, f"{path} key {key}")

    for key in _REQUIRED_KEYS:
        if key not in keys:
            raise ValidationError(f"{path}: missing required key {key!r}")
    if cte_file is not None and table_lines:
        raise ParseError(f"{path}: give either cte_file or [cte_table], not both")
    if cte_file is not None:
        knots = _read_cte_csv(path.parent / cte_file)
    else:
        if not table_lines:
            raise ValidationError(f"{path}: no CTE knots ([cte_table] or cte_file)")
        if table_lines[0][1].replace(" ", "") != _CTE_HEADER:
            raise ParseError(
                f"{path} line {table_lines[0][0]}: [cte_table] must start with "
                f"header '{_CTE_HEADER}'"
            )
        knots = _parse_cte_rows(table_lines[1:], f"{path} [cte_table]")
        if not knots:
            raise ValidationError(f"{path}: [cte_table] has no knots")

    return MaterialModel(
        E_s_pa=keys["E_s_pa"],
        T_s_c=keys["T_s_c"],
        c_E_pa_per_c=keys["c_E_pa_per_c"],
        nu=keys["nu"],
        alpha_table=tuple(knots),
        T_0_c=keys["T_0_c"],
        E_min_pa=keys.get("E_min_pa", _DEFAULT_E_MIN_PA),
    )


def save_material(model: MaterialModel, path) -> None:
    """Write ``model`` in the :func:`load_material` format.

    Floats are written with ``repr`` so that a save/load round trip
    reproduces the model bit-identically.
    """
    lines = [
        f"E_s_pa = {model.E_s_pa!r}",
        f"T_s_c = {model.T_s_c!r}",
        f"c_E_pa_per_c = {model.c_E_pa_per_c!r}",
        f"E_min_pa = {model.E_min_pa!r}",
        f"nu = {model.nu!r}",
        f"T_0_c = {model.T_0_c!r}",
        "",
        "[cte_table]",
        _CTE_HEADER,
    ]
    lines += [f"{t!r},{a!r}" for t, a in model.alpha_table]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
