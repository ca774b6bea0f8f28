"""Run configuration: INI file with geometry, material, solver and output blocks.

Every field has a default that reproduces the reference setup (a 100 um x
1 um x 1.5 um polysilicon beam), so all CLI commands work with no config
file at all.  Validation happens at load time and error messages name the
offending ``section.key``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError
from .geometry import BeamGeometry
from .materials import MaterialModel, default_material, load_material

_SECTIONS = {
    "geometry": {"length_m", "width_m", "thickness_m", "bending_axis"},
    "material": {
        "file",
        "e_s_pa",
        "t_s_c",
        "c_e_pa_per_c",
        "e_min_pa",
        "nu",
        "t_0_c",
        "cte_table",
    },
    "sweep": {
        "mode",
        "p_min_pcr",
        "p_max_pcr",
        "p_min_n",
        "p_max_n",
        "n_points",
        "spacing",
        "tol_t_c",
        "max_iter",
    },
    "fem": {
        "mode",
        "n_elems",
        "t_max_c",
        "n_steps",
        "imperfection_kappa",
        "tol_residual",
        "tol_displacement",
    },
    "output": {"directory"},
}

MODES = ("constant", "tdep", "both")


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully resolved run configuration."""

    geom: BeamGeometry
    mat: MaterialModel
    sweep_mode: str = "tdep"
    sweep_p_min_pcr: float | None = 0.2
    sweep_p_max_pcr: float | None = 5.0
    sweep_p_min_n: float | None = None
    sweep_p_max_n: float | None = None
    sweep_n_points: int = 100
    sweep_spacing: str = "linear"
    sweep_tol_t_c: float = 0.01
    sweep_max_iter: int = 200
    fem_mode: str = "tdep"
    fem_n_elems: int = 64
    fem_t_max_c: float | None = None  # None -> T_0 + 400
    fem_n_steps: int = 200
    fem_imperfection_kappa: float | None = None  # None -> t/1000 rule
    fem_tol_residual: float = 1e-8
    fem_tol_displacement: float = 1e-10
    output_directory: Path = field(default_factory=lambda: Path("."))

    @property
    def fem_t_max_resolved_c(self) -> float:
        if self.fem_t_max_c is not None:
            return self.fem_t_max_c
        return self.mat.T_0_c + 400.0


def _get(parser, section, key, cast, default, where):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ValidationError(f"{where} {section}.{key}: bad value {raw!r}") from exc


def load_config(path=None) -> RunConfig:
    """Load a config file, or return the all-defaults configuration."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    where = "config defaults,"
    base = Path(".")
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ParseError(f"config file {path} does not exist")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ParseError(f"config file {path}: {exc}") from exc
        where = f"config {path}:"
        base = path.parent
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ValidationError(f"{where} unknown section [{section}]")
            for key in parser.options(section):
                if key not in _SECTIONS[section]:
                    raise ValidationError(f"{where} unknown key {section}.{key}")

    geom = BeamGeometry(
        length_m=_get(parser, "geometry", "length_m", float, 100e-6, where),
        width_m=_get(parser, "geometry", "width_m", float, 1e-6, where),
        thickness_m=_get(parser, "geometry", "thickness_m", float, 1.5e-6, where),
        bending_axis=_get(parser, "geometry", "bending_axis", str, "weakest", where),
    )
    mat_file = _get(parser, "material", "file", str, None, where)
    if mat_file is not None:
        mat = load_material(base / mat_file)
    else:
        mat = default_material()

    def mode_of(section):
        mode = _get(parser, section, "mode", str, "tdep", where)
        if mode not in MODES:
            raise ValidationError(
                f"{where} {section}.mode must be one of {MODES}, got {mode!r}"
            )
        return mode

    cfg = RunConfig(
        geom=geom,
        mat=mat,
        sweep_mode=mode_of("sweep"),
        sweep_p_min_pcr=_get(parser, "sweep", "p_min_pcr", float, 0.2, where),
        sweep_p_max_pcr=_get(parser, "sweep", "p_max_pcr", float, 5.0, where),
        sweep_p_min_n=_get(parser, "sweep", "p_min_n", float, None, where),
        sweep_p_max_n=_get(parser, "sweep", "p_max_n", float, None, where),
        sweep_n_points=_get(parser, "sweep", "n_points", int, 100, where),
        sweep_spacing=_get(parser, "sweep", "spacing", str, "linear", where),
        sweep_tol_t_c=_get(parser, "sweep", "tol_t_c", float, 0.01, where),
        sweep_max_iter=_get(parser, "sweep", "max_iter", int, 200, where),
        fem_mode=mode_of("fem"),
        fem_n_elems=_get(parser, "fem", "n_elems", int, 64, where),
        fem_t_max_c=_get(parser, "fem", "t_max_c", float, None, where),
        fem_n_steps=_get(parser, "fem", "n_steps", int, 200, where),
        fem_imperfection_kappa=_get(
            parser, "fem", "imperfection_kappa", float, None, where
        ),
        fem_tol_residual=_get(parser, "fem", "tol_residual", float, 1e-8, where),
        fem_tol_displacement=_get(
            parser, "fem", "tol_displacement", float, 1e-10, where
        ),
        output_directory=Path(
            _get(parser, "output", "directory", str, ".", where)
        ),
    )

    # fail fast on ranges the solvers would reject later
    if cfg.sweep_spacing not in ("linear", "geometric"):
        raise ValidationError(
            f"{where} sweep.spacing must be 'linear' or 'geometric', "
            f"got {cfg.sweep_spacing!r}"
        )
    p_min, p_max = resolve_sweep_range(cfg, check_only=True)
    if not (0.0 < p_min < p_max):
        raise ValidationError(
            f"{where} sweep range invalid: p_min={p_min!r} must be positive "
            f"and less than p_max={p_max!r} (keys sweep.p_min_pcr/p_max_pcr "
            "or sweep.p_min_n/p_max_n)"
        )
    if cfg.sweep_n_points < 2:
        raise ValidationError(f"{where} sweep.n_points must be >= 2")
    if cfg.fem_n_elems < 4 or cfg.fem_n_elems % 2:
        raise ValidationError(f"{where} fem.n_elems must be even and >= 4")
    if cfg.fem_n_steps < 1:
        raise ValidationError(f"{where} fem.n_steps must be >= 1")
    if cfg.fem_t_max_resolved_c < mat.T_0_c:
        raise ValidationError(
            f"{where} fem.t_max_c ({cfg.fem_t_max_resolved_c!r}) must not be "
            f"below the material T_0 ({mat.T_0_c!r})"
        )
    if cfg.fem_imperfection_kappa is not None and cfg.fem_imperfection_kappa < 0:
        raise ValidationError(f"{where} fem.imperfection_kappa must be >= 0")
    return cfg


def resolve_sweep_range(cfg: RunConfig, check_only: bool = False) -> tuple[float, float]:
    """Absolute sweep load range in N (multiples of P_cr are resolved here)."""
    from .elastica import critical_load
    from .materials import young_modulus

    p_cr = critical_load(cfg.geom, young_modulus(cfg.mat, cfg.mat.T_0_c))
    p_min = cfg.sweep_p_min_n if cfg.sweep_p_min_n is not None else cfg.sweep_p_min_pcr * p_cr
    p_max = cfg.sweep_p_max_n if cfg.sweep_p_max_n is not None else cfg.sweep_p_max_pcr * p_cr
    return float(p_min), float(p_max)


def resolve_imperfection_q(cfg: RunConfig) -> float:
    """Imperfection line load in N/m (the t/1000 rule unless kappa is set)."""
    from .fem import default_imperfection_q

    if cfg.fem_imperfection_kappa is not None:
        return cfg.fem_imperfection_kappa * cfg.geom.length_m
    return default_imperfection_q(cfg.geom, cfg.mat)
