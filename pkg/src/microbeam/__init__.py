"""Thermal post-buckling of clamped-clamped micro beams.

Two solvers for the deflection-temperature response of a heated beam with
temperature-dependent Young's modulus and thermal-expansion coefficient:

* :mod:`microbeam.elastica` - analytical elliptic-integral model of the
  first buckling mode with a property fixed-point loop;
* :mod:`microbeam.fem` - geometrically nonlinear corotational Timoshenko
  finite elements with incremental temperature stepping;

plus :mod:`microbeam.materials` (constitutive models and file ingestion),
:mod:`microbeam.compare` (RMS deviation against experimental curves and
overlay export) and :mod:`microbeam.cli` (command-line front end).
"""

from .compare import (
    ExperimentCurve,
    ModelCurve,
    RmsResult,
    curve_from_path,
    curve_from_states,
    export_overlay,
    load_experiment,
    load_overlay,
    model_curve_from_csv,
    rms_deviation,
)
from .config import RunConfig, load_config
from .elastica import (
    ElasticaState,
    critical_load,
    elliptic_e,
    elliptic_k,
    invert_k,
    solve_state,
    solve_state_tdep,
    sweep,
    write_sweep_csv,
)
from .errors import (
    ConvergenceError,
    CoverageError,
    DomainError,
    IoError,
    MicrobeamError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .fem import (
    FemModel,
    FemSolutionPath,
    FemStep,
    build_model,
    default_imperfection_q,
    linear_static_check,
    solve_path,
    tangent_consistency,
    write_path_csv,
)
from .geometry import BeamGeometry
from .materials import (
    MaterialModel,
    constant_material,
    cte,
    default_material,
    load_material,
    save_material,
    shear_modulus,
    young_modulus,
)

__version__ = "0.1.0"

__all__ = [
    "BeamGeometry",
    "ConvergenceError",
    "CoverageError",
    "DomainError",
    "ElasticaState",
    "ExperimentCurve",
    "FemModel",
    "FemSolutionPath",
    "FemStep",
    "IoError",
    "MaterialModel",
    "MicrobeamError",
    "ModelCurve",
    "NumericalError",
    "ParseError",
    "RmsResult",
    "RunConfig",
    "ValidationError",
    "build_model",
    "constant_material",
    "critical_load",
    "cte",
    "curve_from_path",
    "curve_from_states",
    "default_imperfection_q",
    "default_material",
    "elliptic_e",
    "elliptic_k",
    "export_overlay",
    "invert_k",
    "linear_static_check",
    "load_config",
    "load_experiment",
    "load_material",
    "load_overlay",
    "model_curve_from_csv",
    "rms_deviation",
    "save_material",
    "shear_modulus",
    "solve_path",
    "solve_state",
    "solve_state_tdep",
    "sweep",
    "tangent_consistency",
    "write_path_csv",
    "write_sweep_csv",
    "young_modulus",
]
